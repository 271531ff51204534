#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sparsid/solvers.hpp"

namespace sparsid {

enum class Strategy : std::uint8_t { cooperate, defect };
enum class GameKind { prisoners_dilemma, snowdrift };

char to_char(Strategy s);
Strategy strategy_from_char(char c);
std::string to_string(GameKind g);
GameKind game_kind_from_string(const std::string& s);

struct GameParams {
    GameKind game = GameKind::prisoners_dilemma;
    // Temptation to defect in the prisoner's dilemma, 1 < b < 2.
    double b = 1.2;
    // Cost-to-benefit ratio of the snowdrift game, 0 < r < 1.
    double r = 0.5;
    // Fermi noise; 0 is fully rational imitation.
    double kappa = 0.1;

    void validate() const;
    // Row = own strategy (C, D), column = opponent strategy.
    Eigen::Matrix2d payoff_matrix() const;
};

// S_self^T P S_other.
double pair_payoff(Strategy self, Strategy other, const GameParams& params);

// Probability that an agent with payoff `own` adopts the strategy of a
// neighbour with payoff `other`: 1 / (1 + exp((own - other) / kappa)).
double fermi_probability(double own, double other, double kappa);

/// Strategies and payoffs of every agent over M rounds.
struct GameRecord {
    int agents = 0;
    // M x n, row = round.
    std::vector<Strategy> strategies;
    Eigen::MatrixXd payoffs;

    Eigen::Index rounds() const { return payoffs.rows(); }
    Strategy strategy(Eigen::Index round, int agent) const {
        return strategies[static_cast<std::size_t>(round * agents + agent)];
    }
    void validate(const GameParams* params = nullptr) const;
    GameRecord first_rounds(Eigen::Index m) const;
};

struct GameReconstructionConfig {
    SolverConfig solver = default_solver();
    // True entries are 0 or 1; estimates at or above this are edges.
    double boolean_threshold = 0.5;

    static SolverConfig default_solver();
};

struct AgentEstimate {
    int agent = 0;
    // Length n; the agent's own entry is always 0 (its column is excluded
    // from the regression).
    Eigen::VectorXd weights;
    std::vector<bool> neighbors;
    Eigen::Index rank = 0;
    std::vector<std::string> warnings;
};

// Builds G_x with F_xy(t) = S_x(t)^T P S_y(t), y != x, and sparse-solves
// G_x A_x = X_x where X_x is the payoff series of agent x.
AgentEstimate reconstruct_agent(const GameRecord& record, const GameParams& params, int agent,
                                const GameReconstructionConfig& config = {});

enum class EdgePolicy { either, both, none };

std::string to_string(EdgePolicy p);
EdgePolicy edge_policy_from_string(const std::string& s);

struct SocialNetwork {
    // n x n, symmetric unless the policy is `none`.
    std::vector<std::vector<bool>> adjacency;
    // Fraction of unordered pairs on which the two row estimates agree.
    double consistency = 1.0;
    std::vector<AgentEstimate> rows;
};

SocialNetwork assemble_social_network(std::vector<AgentEstimate> rows, EdgePolicy policy = EdgePolicy::either);

SocialNetwork reconstruct_social_network(const GameRecord& record, const GameParams& params,
                                         const GameReconstructionConfig& config = {},
                                         EdgePolicy policy = EdgePolicy::either);

nlohmann::json to_json(const GameParams& p);
GameParams game_params_from_json(const nlohmann::json& j, GameParams base = {});

}  // namespace sparsid
