#pragma once

#include <cstddef>
#include <optional>

#include <json.hpp>

#include "sparsid/basis.hpp"
#include "sparsid/diff.hpp"
#include "sparsid/model.hpp"
#include "sparsid/solvers.hpp"
#include "sparsid/timeseries.hpp"

namespace sparsid {

enum class MapLibraryKind { polynomial, fourier };

std::string to_string(MapLibraryKind kind);
MapLibraryKind map_library_from_string(const std::string& s);

/// Knobs shared by the ODE, map and time-varying pipelines.
struct DiscoveryConfig {
    int order = 3;
    std::optional<int> max_total_degree;
    int time_order = 2;
    MapLibraryKind map_library = MapLibraryKind::polynomial;
    int max_harmonic = 2;
    int fourier_depth = 1;
    DerivativeScheme scheme = DerivativeScheme::central;
    // Odd moving-average window applied before differentiation (1 = off).
    int smoothing_window = 1;
    SolverConfig solver;
    bool normalize = true;
    // Dimension of the true state; fewer observed channels is an error.
    std::optional<int> expected_dim;
    // Fit only the trailing window of this length (time-varying pipeline).
    std::optional<double> window_length;
    std::size_t max_terms = 200000;
    // Anchor states kept on the model for later simulation.
    int anchors = 20;
};

nlohmann::json to_json(const DiscoveryConfig& c);
DiscoveryConfig discovery_config_from_json(const nlohmann::json& j, DiscoveryConfig base = {});

// One sparse solve per state variable against the shared library matrix.
RecoveredModel discover_ode(const TimeSeries& series, const DiscoveryConfig& config);

// Fits x_{i+1} against the library evaluated at x_i.
RecoveredModel discover_map(const TimeSeries& series, const DiscoveryConfig& config);

// Same as discover_ode over the time-augmented library.
RecoveredModel discover_time_varying(const TimeSeries& series, const DiscoveryConfig& config);

// Lower-level entry: library evaluated at `states`/`times`, one column of
// `targets` per variable.
RecoveredModel fit_sparse_model(ModelKind kind, const TermList& library, const Eigen::MatrixXd& states,
                                const Eigen::VectorXd& times, const Eigen::MatrixXd& targets,
                                const DiscoveryConfig& config);

}  // namespace sparsid
