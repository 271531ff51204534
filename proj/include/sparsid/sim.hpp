#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sparsid/game.hpp"
#include "sparsid/timeseries.hpp"
#include "sparsid/weakpde.hpp"

namespace sparsid {

enum class SystemKind {
    lorenz,
    roessler,
    standard_map,
    ikeda,
    quadratic_map,
    linear_drift,
    coupled_network,
    game,
    ks_pde,
    heat_pde
};

std::string to_string(SystemKind k);
SystemKind system_kind_from_string(const std::string& s);

/// Everything needed to regenerate one ground-truth data set.
///
/// `horizon` counts steps (map iterations, recorded ODE/PDE steps, game
/// rounds) including the first `transient_discard`, which are dropped.
/// ODE and PDE solvers take `substeps` internal steps per recorded step.
struct SimSpec {
    SystemKind system = SystemKind::lorenz;
    std::map<std::string, double> parameters;
    std::vector<double> initial_state;
    long horizon = 1000;
    double dt = 0.01;
    int substeps = 1;
    std::optional<std::uint64_t> seed;
    long transient_discard = 0;
    // Undirected edges for coupled_network and game.
    std::vector<std::pair<int, int>> edges;
    // Node oscillator for coupled_network: "roessler", "lorenz" or "linear".
    std::string oscillator = "roessler";
    // Coupled state components (0-based) for coupled_network.
    std::vector<int> coupled_components{0};

    double param(const std::string& name, double fallback) const;
    void validate() const;
};

using SimOutput = std::variant<TimeSeries, FieldData, GameRecord>;

SimOutput simulate(const SimSpec& spec);
TimeSeries simulate_series(const SimSpec& spec);
FieldData simulate_field(const SimSpec& spec);
GameRecord simulate_game(const SimSpec& spec);

nlohmann::json to_json(const SimSpec& spec);
SimSpec sim_spec_from_json(const nlohmann::json& j);

// Defining equations, evaluated directly.
Eigen::Vector3d lorenz_rhs(const Eigen::Vector3d& s, double sigma, double rho, double beta);
Eigen::Vector3d roessler_rhs(const Eigen::Vector3d& s, double a, double b, double c);
// (theta, p) -> (theta + p', p') with p' = p + K sin(theta).
Eigen::Vector2d standard_map_step(const Eigen::Vector2d& s, double k);
Eigen::Vector2d ikeda_step(const Eigen::Vector2d& s, double a, double b, double k, double p);
double quadratic_map_step(double x, double a);

enum class TopologyKind { erdos_renyi, ring, edge_list };

struct Topology {
    TopologyKind kind = TopologyKind::erdos_renyi;
    double p = 0.1;
    // Neighbours on each side for rings.
    int k = 1;
    std::vector<std::pair<int, int>> edges;
};

struct NetworkInstance {
    SimSpec spec;
    std::vector<std::vector<bool>> adjacency;
    int state_dim = 0;
};

std::vector<std::vector<bool>> make_graph(int n, const Topology& topology, std::uint64_t seed);

// Graph plus a coupled_network spec whose dynamics are
// x_i' = F(x_i) + c sum_j a_ij H (x_j - x_i), H selecting `components`.
NetworkInstance make_network_instance(int n, const Topology& topology, const std::string& oscillator,
                                      double coupling, std::vector<int> components, std::uint64_t seed);

int oscillator_dim(const std::string& oscillator);

std::vector<std::pair<int, int>> edges_of(const std::vector<std::vector<bool>>& adjacency);

}  // namespace sparsid
