#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sparsid/model.hpp"

namespace sparsid {

enum class Outcome { sustained, transient_escape, fixed_point };

std::string to_string(Outcome o);

// Coefficient (row, term) of a recovered model treated as the parameter.
struct CoefficientSelector {
    int row = 0;
    Eigen::Index term = 0;
};

struct ScanConfig {
    CoefficientSelector parameter;
    std::vector<double> grid;
    // Steps per trajectory (iterations for maps).
    long horizon = 10000;
    // Integration step for flows; ignored for maps.
    double step = 0.01;
    // Defaults to 10x the largest fit-data state norm.
    std::optional<double> escape_radius;
    int ensemble = 20;
    // Relative size of the random perturbation applied to anchor states.
    double perturbation = 1e-3;
    std::uint64_t seed = 1;
    double bracket_width = 0.01;
};

struct GridPoint {
    double value = 0.0;
    Outcome outcome = Outcome::sustained;
    // Members that crossed the escape radius before the horizon.
    int escaped = 0;
    // Mean escape time over escaped members (steps x step).
    double mean_lifetime = 0.0;
};

struct BifurcationReport {
    std::string parameter_name;
    std::vector<GridPoint> points;
    bool transition_found = false;
    std::optional<double> critical_value;
    std::optional<std::pair<double, double>> bracket;
    std::string message;
    std::uint64_t seed = 0;
};

// Sweeps one model coefficient over `grid`, classifying each value by
// ensemble escape, then bisects the first sustained/escape boundary down to
// `bracket_width`.
BifurcationReport scan_bifurcation(const RecoveredModel& model, const ScanConfig& config);

// Classification of a single parameter value with the given ensemble.
GridPoint classify_parameter(const RecoveredModel& model, const ScanConfig& config, double value,
                             const Eigen::MatrixXd& ensemble, double escape_radius);

nlohmann::json to_json(const BifurcationReport& report);

}  // namespace sparsid
