#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace sparsid {

enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,
    exit_usage = 2,
    exit_parse_error = 3,
    exit_not_converged = 4,
    exit_not_sparse = 5,
    exit_invalid = 6,
    exit_diverged = 7,
};

const std::vector<std::string>& cli_commands();

/// One fully specified run. Flag overrides are folded into `config` by
/// resolve_config; the manifest echoes the resolved document.
struct RunConfig {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    std::optional<std::filesystem::path> input;
    std::filesystem::path out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> solver;
    std::optional<double> lambda;
    std::optional<double> threshold;
    std::optional<int> order;
    std::optional<int> time_order;
    std::optional<std::string> scheme;
};

struct RunResult {
    int exit_code = exit_ok;
    std::string message;
    std::vector<std::filesystem::path> artifacts;
    nlohmann::json manifest;
};

// Complete config document for the command with every default spelled out.
nlohmann::json resolve_config(const RunConfig& run);

// Executes the pipeline; never throws. On error every artifact written by
// this run is removed.
RunResult run(const RunConfig& run);

// Command-line entry point.
int run_cli(int argc, const char* const* argv);

std::uint64_t config_hash(const nlohmann::json& resolved);

}  // namespace sparsid
