#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sparsid/basis.hpp"
#include "sparsid/diff.hpp"
#include "sparsid/game.hpp"
#include "sparsid/model.hpp"
#include "sparsid/solvers.hpp"
#include "sparsid/timeseries.hpp"

namespace sparsid {

/// Trajectories of n nodes with d state variables each; channels of node i
/// occupy columns i*d .. i*d + d - 1.
struct NetworkData {
    int n = 0;
    int d = 0;
    TimeSeries series;
    std::vector<std::string> node_labels;

    void validate() const;
};

NetworkData make_network_data(TimeSeries series, int n, int d);

struct NetworkConfig {
    // Per-node polynomial order and optional total-degree filter.
    int order = 3;
    std::optional<int> max_total_degree;
    DerivativeScheme scheme = DerivativeScheme::central;
    // Evenly spaced subset of the derivative rows used for the fit.
    std::optional<Eigen::Index> max_rows;
    SolverConfig solver;
    // Edge threshold as a fraction of the largest cross-block coefficient.
    double edge_fraction = 0.05;
    EdgePolicy symmetrization = EdgePolicy::either;
};

nlohmann::json to_json(const NetworkConfig& c);
NetworkConfig network_config_from_json(const nlohmann::json& j, NetworkConfig base = {});

/// Shared regression library: the constant, then the non-constant terms of
/// each node's own polynomial block, node by node.
struct NetworkLibrary {
    int n = 0;
    int d = 0;
    // Terms of one node in its own d variables; entry 0 is the constant.
    TermList block_terms;
    // Column index of (node, block term); the constant maps to column 0 for
    // every node.
    Eigen::Index column(int node, std::size_t term) const;
    Eigen::Index cols() const;
    // Full descriptors in all n*d variables.
    TermList global_terms() const;
};

NetworkLibrary make_network_library(int n, int d, int order, std::optional<int> max_total_degree = std::nullopt);

/// Regression rows shared by every node: states, library matrix and targets.
struct NetworkSystem {
    NetworkLibrary library;
    BasisLibrary evaluated;
    // rows x (n*d) derivative targets.
    Eigen::MatrixXd targets;
    std::vector<std::string> warnings;
    double coherence = 0.0;
};

NetworkSystem build_network_system(const NetworkData& data, const NetworkConfig& config);

/// The d equations of one node over the shared library.
struct NodeReconstruction {
    int node = 0;
    // d x library columns, original units.
    Eigen::MatrixXd coefficients;
    ModelDiagnostics diagnostics;
};

NodeReconstruction reconstruct_node(const NetworkSystem& system, int node, const SolverConfig& solver);
NodeReconstruction reconstruct_node(const NetworkData& data, int node, const NetworkConfig& config);

struct NetworkEstimate {
    int n = 0;
    int d = 0;
    TermList block_terms;
    // coupling[i][j](a, b): coefficient of x_j,b in the equation of x_i,a.
    std::vector<std::vector<Eigen::MatrixXd>> coupling;
    // nonlinear[i][j]: largest |coefficient| of a higher-order block-j term
    // in node i's equations.
    std::vector<std::vector<double>> nonlinear;
    std::vector<std::vector<bool>> adjacency;
    // Directed detections before symmetrization.
    std::vector<std::vector<bool>> detected;
    // Smallest surviving |entry| / threshold on each edge (0 off-edge).
    std::vector<std::vector<double>> margins;
    // Per node: d x block terms, the own-block coefficients (constant first).
    std::vector<Eigen::MatrixXd> gamma;
    double threshold = 0.0;
    EdgePolicy policy = EdgePolicy::either;
    std::vector<NodeReconstruction> rows;
    std::vector<std::string> warnings;

    std::vector<std::pair<int, int>> edges() const;
    // Largest |C_ij| entry of an edge, over both directions.
    double weight(int i, int j) const;
};

// Fills the coupling grid and thresholds it. `threshold` overrides the
// default edge_fraction * largest cross-block coefficient.
NetworkEstimate assemble_network(std::vector<NodeReconstruction> rows, const NetworkLibrary& library,
                                 double edge_fraction = 0.05, EdgePolicy policy = EdgePolicy::either,
                                 std::optional<double> threshold = std::nullopt);

NetworkEstimate reconstruct_network(const NetworkData& data, const NetworkConfig& config = {});

// Own-block coefficients with sum_j C_ij folded back onto the linear terms.
Eigen::MatrixXd extract_nodal_dynamics(const NetworkEstimate& estimate, int node);

nlohmann::json to_json(const NetworkEstimate& estimate);

}  // namespace sparsid
