#pragma once

#include <filesystem>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "sparsid/game.hpp"
#include "sparsid/network.hpp"
#include "sparsid/timeseries.hpp"
#include "sparsid/weakpde.hpp"

namespace sparsid {

namespace fs = std::filesystem;

// Time series: header `t,<channel names>`, one sample per line.
TimeSeries read_timeseries_csv(const fs::path& path);
void write_timeseries_csv(const fs::path& path, const TimeSeries& series);
TimeSeries parse_timeseries_csv(const std::string& text);
std::string format_timeseries_csv(const TimeSeries& series);

// Games: `round,agent,strategy,payoff` with strategy C or D.
GameRecord read_game_csv(const fs::path& path);
void write_game_csv(const fs::path& path, const GameRecord& record);
GameRecord parse_game_csv(const std::string& text);

// Edge list `i,j,weight`.
struct WeightedEdge {
    int i = 0;
    int j = 0;
    double weight = 0.0;
};
std::vector<WeightedEdge> read_edge_list_csv(const fs::path& path);
void write_edge_list_csv(const fs::path& path, const std::vector<WeightedEdge>& edges);
std::vector<WeightedEdge> edge_list(const NetworkEstimate& estimate);
std::vector<WeightedEdge> edge_list(const SocialNetwork& network);

// Fields in long form `t,x,u`, rows ordered by time then space.
FieldData read_field_csv(const fs::path& path);
void write_field_csv(const fs::path& path, const FieldData& field);

// Fields as a raw little-endian float64 lattice (row = time) plus a JSON
// sidecar at `<path>.json` holding the grid.
void write_field_binary(const fs::path& path, const FieldData& field);
FieldData read_field_binary(const fs::path& path);

nlohmann::json read_json(const fs::path& path);
// Pretty-printed with sorted keys so equal documents are byte-identical.
void write_json(const fs::path& path, const nlohmann::json& doc);
std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

// Shortest decimal text that round-trips the double.
std::string format_double(double v);

}  // namespace sparsid
