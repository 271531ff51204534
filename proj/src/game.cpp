#include "sparsid/game.hpp"

#include <cmath>

#include "sparsid/basis.hpp"
#include "sparsid/error.hpp"

namespace sparsid {

char to_char(Strategy s) { return s == Strategy::cooperate ? 'C' : 'D'; }

Strategy strategy_from_char(char c) {
    if (c == 'C' || c == 'c') return Strategy::cooperate;
    if (c == 'D' || c == 'd') return Strategy::defect;
    throw ParseError(std::string("strategy must be C or D, got '") + c + "'");
}

std::string to_string(GameKind g) { return g == GameKind::prisoners_dilemma ? "PDG" : "SG"; }

GameKind game_kind_from_string(const std::string& s) {
    if (s == "PDG" || s == "pdg") return GameKind::prisoners_dilemma;
    if (s == "SG" || s == "sg") return GameKind::snowdrift;
    throw InvalidArgument("unknown game '" + s + "' (expected PDG or SG)");
}

void GameParams::validate() const {
    if (game == GameKind::prisoners_dilemma && !(b > 1.0 && b < 2.0))
        throw InvalidArgument("prisoner's dilemma needs 1 < b < 2");
    if (game == GameKind::snowdrift && !(r > 0.0 && r < 1.0)) throw InvalidArgument("snowdrift game needs 0 < r < 1");
    if (!(kappa >= 0.0)) throw InvalidArgument("Fermi noise kappa must be non-negative");
}

Eigen::Matrix2d GameParams::payoff_matrix() const {
    Eigen::Matrix2d p;
    if (game == GameKind::prisoners_dilemma) {
        p << 1.0, 0.0, b, 0.0;
    } else {
        p << 1.0, 1.0 - r, 1.0 + r, 0.0;
    }
    return p;
}

double pair_payoff(Strategy self, Strategy other, const GameParams& params) {
    return params.payoff_matrix()(static_cast<int>(self), static_cast<int>(other));
}

double fermi_probability(double own, double other, double kappa) {
    if (kappa == 0.0) {
        if (other > own) return 1.0;
        if (other < own) return 0.0;
        return 0.5;
    }
    const double z = (own - other) / kappa;
    // Stable logistic for either sign of z.
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

void GameRecord::validate(const GameParams* params) const {
    if (agents < 1) throw InvalidArgument("game record: no agents");
    if (payoffs.cols() != agents) throw InvalidArgument("game record: payoff columns do not match agent count");
    if (static_cast<Eigen::Index>(strategies.size()) != payoffs.rows() * agents)
        throw InvalidArgument("game record: strategy table does not match payoff table");
    if (!payoffs.allFinite()) throw InvalidArgument("game record: non-finite payoffs");
    if (params && params->game == GameKind::prisoners_dilemma && (payoffs.array() < 0.0).any())
        throw InvalidArgument("game record: negative payoff in a prisoner's dilemma record");
}

GameRecord GameRecord::first_rounds(Eigen::Index m) const {
    if (m < 0 || m > rounds()) throw InvalidArgument("game record: round count out of range");
    GameRecord r;
    r.agents = agents;
    r.payoffs = payoffs.topRows(m);
    r.strategies.assign(strategies.begin(), strategies.begin() + m * agents);
    return r;
}

SolverConfig GameReconstructionConfig::default_solver() {
    SolverConfig c;
    c.kind = SolverKind::lasso_cd;
    c.lambda = 1e-3;
    c.lambda_relative = true;
    c.threshold = 0.1;
    c.relative_threshold = false;
    return c;
}

AgentEstimate reconstruct_agent(const GameRecord& record, const GameParams& params, int agent,
                                const GameReconstructionConfig& config) {
    params.validate();
    record.validate(&params);
    const int n = record.agents;
    if (agent < 0 || agent >= n) throw InvalidArgument("game reconstruction: agent index out of range");
    const Eigen::Index m = record.rounds();
    if (m < 1) throw InvalidArgument("game reconstruction: no rounds");

    AgentEstimate est;
    est.agent = agent;
    est.weights = Eigen::VectorXd::Zero(n);
    est.neighbors.assign(static_cast<std::size_t>(n), false);
    if (n == 1) return est;

    Eigen::MatrixXd g(m, n - 1);
    for (Eigen::Index t = 0; t < m; ++t) {
        int col = 0;
        for (int y = 0; y < n; ++y) {
            if (y == agent) continue;
            g(t, col++) = pair_payoff(record.strategy(t, agent), record.strategy(t, y), params);
        }
    }
    const Eigen::VectorXd target = record.payoffs.col(agent);

    est.rank = numerical_rank(g);
    if (est.rank < std::min<Eigen::Index>(m, n - 1))
        est.warnings.push_back("payoff matrix rank " + std::to_string(est.rank) + " below min(rounds, n-1) = " +
                               std::to_string(std::min<Eigen::Index>(m, n - 1)) +
                               "; strategies repeat across rounds");

    Eigen::VectorXd a = Eigen::VectorXd::Zero(n - 1);
    if (target.cwiseAbs().maxCoeff() > 0.0 && g.cwiseAbs().maxCoeff() > 0.0) {
        Eigen::MatrixXd unit = g;
        const Eigen::VectorXd norms = normalize_columns(unit);
        a = solve_normalized(unit, norms, target, config.solver).coefficients;
    }
    int col = 0;
    for (int y = 0; y < n; ++y) {
        if (y == agent) continue;
        est.weights[y] = a[col++];
        est.neighbors[static_cast<std::size_t>(y)] = est.weights[y] >= config.boolean_threshold;
    }
    return est;
}

std::string to_string(EdgePolicy p) {
    switch (p) {
    case EdgePolicy::either: return "or";
    case EdgePolicy::both: return "and";
    case EdgePolicy::none: return "none";
    }
    return "or";
}

EdgePolicy edge_policy_from_string(const std::string& s) {
    if (s == "or" || s == "either") return EdgePolicy::either;
    if (s == "and" || s == "both") return EdgePolicy::both;
    if (s == "none") return EdgePolicy::none;
    throw InvalidArgument("unknown edge policy '" + s + "' (expected or, and, none)");
}

SocialNetwork assemble_social_network(std::vector<AgentEstimate> rows, EdgePolicy policy) {
    const auto n = rows.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].agent != static_cast<int>(i) || rows[i].neighbors.size() != n)
            throw InvalidArgument("social network assembly: rows must cover agents 0..n-1 in order");
    }
    SocialNetwork net;
    net.adjacency.assign(n, std::vector<bool>(n, false));
    std::size_t pairs = 0, agree = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const bool ij = rows[i].neighbors[j];
            const bool ji = rows[j].neighbors[i];
            switch (policy) {
            case EdgePolicy::either: net.adjacency[i][j] = ij || ji; break;
            case EdgePolicy::both: net.adjacency[i][j] = ij && ji; break;
            case EdgePolicy::none: net.adjacency[i][j] = ij; break;
            }
            if (i < j) {
                ++pairs;
                if (ij == ji) ++agree;
            }
        }
    }
    net.consistency = pairs ? static_cast<double>(agree) / static_cast<double>(pairs) : 1.0;
    net.rows = std::move(rows);
    return net;
}

SocialNetwork reconstruct_social_network(const GameRecord& record, const GameParams& params,
                                         const GameReconstructionConfig& config, EdgePolicy policy) {
    std::vector<AgentEstimate> rows;
    for (int x = 0; x < record.agents; ++x) rows.push_back(reconstruct_agent(record, params, x, config));
    return assemble_social_network(std::move(rows), policy);
}

nlohmann::json to_json(const GameParams& p) {
    return {{"game", to_string(p.game)}, {"b", p.b}, {"r", p.r}, {"kappa", p.kappa}};
}

GameParams game_params_from_json(const nlohmann::json& j, GameParams p) {
    try {
        if (j.contains("game")) p.game = game_kind_from_string(j["game"].get<std::string>());
        p.b = j.value("b", p.b);
        p.r = j.value("r", p.r);
        p.kappa = j.value("kappa", p.kappa);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("game parameters: ") + e.what());
    }
    return p;
}

}  // namespace sparsid
