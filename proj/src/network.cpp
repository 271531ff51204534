#include "sparsid/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sparsid/error.hpp"

namespace sparsid {

void NetworkData::validate() const {
    if (n < 1 || d < 1) throw InvalidArgument("network data: node count and node dimension must be positive");
    if (series.channels() != static_cast<Eigen::Index>(n) * d)
        throw PartialObservation("network data: expected " + std::to_string(n * d) + " channels (n*d), got " +
                                 std::to_string(series.channels()));
    if (!node_labels.empty() && node_labels.size() != static_cast<std::size_t>(n))
        throw InvalidArgument("network data: one label per node required");
    series.validate();
}

NetworkData make_network_data(TimeSeries series, int n, int d) {
    NetworkData data;
    data.n = n;
    data.d = d;
    data.series = std::move(series);
    for (int i = 0; i < n; ++i) data.node_labels.push_back("n" + std::to_string(i + 1));
    data.validate();
    return data;
}

nlohmann::json to_json(const NetworkConfig& c) {
    nlohmann::json j{{"order", c.order},
                     {"scheme", to_string(c.scheme)},
                     {"solver", to_json(c.solver)},
                     {"edge_fraction", c.edge_fraction},
                     {"symmetrization", to_string(c.symmetrization)}};
    j["max_total_degree"] = c.max_total_degree ? nlohmann::json(*c.max_total_degree) : nlohmann::json();
    j["max_rows"] = c.max_rows ? nlohmann::json(*c.max_rows) : nlohmann::json();
    return j;
}

NetworkConfig network_config_from_json(const nlohmann::json& j, NetworkConfig c) {
    try {
        c.order = j.value("order", c.order);
        if (j.contains("max_total_degree"))
            c.max_total_degree = j["max_total_degree"].is_null() ? std::nullopt
                                                                 : std::optional<int>(j["max_total_degree"].get<int>());
        if (j.contains("max_rows"))
            c.max_rows = j["max_rows"].is_null() ? std::nullopt
                                                 : std::optional<Eigen::Index>(j["max_rows"].get<Eigen::Index>());
        if (j.contains("scheme")) c.scheme = derivative_scheme_from_string(j["scheme"].get<std::string>());
        if (j.contains("solver")) c.solver = solver_config_from_json(j["solver"], c.solver);
        c.edge_fraction = j.value("edge_fraction", c.edge_fraction);
        if (j.contains("symmetrization"))
            c.symmetrization = edge_policy_from_string(j["symmetrization"].get<std::string>());
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("network config: ") + e.what());
    }
}

Eigen::Index NetworkLibrary::column(int node, std::size_t term) const {
    if (term == 0) return 0;
    return 1 + static_cast<Eigen::Index>(node) * static_cast<Eigen::Index>(block_terms.size() - 1) +
           static_cast<Eigen::Index>(term - 1);
}

Eigen::Index NetworkLibrary::cols() const {
    return 1 + static_cast<Eigen::Index>(n) * static_cast<Eigen::Index>(block_terms.size() - 1);
}

TermList NetworkLibrary::global_terms() const {
    TermList out;
    TermDescriptor constant;
    constant.exponents.assign(static_cast<std::size_t>(n * d), 0);
    out.push_back(constant);
    for (int node = 0; node < n; ++node) {
        for (std::size_t t = 1; t < block_terms.size(); ++t) {
            TermDescriptor g = constant;
            for (int c = 0; c < d; ++c)
                g.exponents[static_cast<std::size_t>(node * d + c)] = block_terms[t].exponents[static_cast<std::size_t>(c)];
            out.push_back(std::move(g));
        }
    }
    return out;
}

NetworkLibrary make_network_library(int n, int d, int order, std::optional<int> max_total_degree) {
    if (n < 1) throw InvalidArgument("network library: need at least one node");
    LibraryOptions opts;
    opts.max_total_degree = max_total_degree;
    NetworkLibrary lib;
    lib.n = n;
    lib.d = d;
    lib.block_terms = build_polynomial_library(d, order, opts);
    if (lib.block_terms.size() < 2) throw InvalidArgument("network library: per-node order must be at least 1");
    if (static_cast<std::size_t>(lib.cols()) > opts.max_terms)
        throw InfeasibleProblem("network library: " + std::to_string(lib.cols()) + " columns exceed the size cap");
    return lib;
}

NetworkSystem build_network_system(const NetworkData& data, const NetworkConfig& config) {
    data.validate();
    NetworkSystem sys;
    sys.library = make_network_library(data.n, data.d, config.order, config.max_total_degree);
    const DerivativeEstimate est = estimate_derivatives(data.series, config.scheme);
    Eigen::MatrixXd states = aligned_states(data.series, est);
    Eigen::MatrixXd targets = est.rates;
    Eigen::VectorXd times = est.times;
    if (config.max_rows) {
        if (*config.max_rows < 1) throw InvalidArgument("network config: max_rows must be positive");
        const Eigen::Index total = states.rows();
        const Eigen::Index keep = std::min(total, *config.max_rows);
        Eigen::MatrixXd s(keep, states.cols()), t(keep, targets.cols());
        Eigen::VectorXd tt(keep);
        for (Eigen::Index r = 0; r < keep; ++r) {
            const Eigen::Index src = keep == 1 ? 0 : r * (total - 1) / (keep - 1);
            s.row(r) = states.row(src);
            t.row(r) = targets.row(src);
            tt[r] = times[src];
        }
        states = std::move(s);
        targets = std::move(t);
        times = std::move(tt);
    }
    sys.evaluated = evaluate_library(sys.library.global_terms(), states, times, true);
    sys.targets = std::move(targets);
    sys.coherence = mutual_coherence(sys.evaluated.matrix);

    // Synchronized nodes produce indistinguishable blocks: every component
    // pair must be correlated.
    for (int i = 0; i < data.n; ++i) {
        for (int j = i + 1; j < data.n; ++j) {
            double worst = 1.0;
            for (int c = 0; c < data.d; ++c) {
                Eigen::VectorXd a = states.col(i * data.d + c), b = states.col(j * data.d + c);
                a.array() -= a.mean();
                b.array() -= b.mean();
                const double na = a.norm(), nb = b.norm();
                worst = std::min(worst, na > 0.0 && nb > 0.0 ? std::abs(a.dot(b)) / (na * nb) : 0.0);
            }
            if (worst > 0.99)
                sys.warnings.push_back("nodes " + std::to_string(i) + " and " + std::to_string(j) +
                                       " look synchronized (coherence " + std::to_string(worst) +
                                       "); their blocks are nearly collinear");
        }
    }
    for (auto z : sys.evaluated.zero_columns)
        sys.warnings.push_back("library column " + std::to_string(z) + " is identically zero");
    return sys;
}

NodeReconstruction reconstruct_node(const NetworkSystem& sys, int node, const SolverConfig& solver) {
    const int n = sys.library.n, d = sys.library.d;
    if (node < 0 || node >= n) throw InvalidArgument("reconstruct_node: node index out of range");
    NodeReconstruction rec;
    rec.node = node;
    rec.coefficients = Eigen::MatrixXd::Zero(d, sys.library.cols());
    rec.diagnostics.samples = sys.targets.rows();
    rec.diagnostics.coherence = sys.coherence;
    for (int a = 0; a < d; ++a) {
        const SparseSolution s = solve_normalized(sys.evaluated.matrix, sys.evaluated.column_norms,
                                                  sys.targets.col(node * d + a), solver);
        rec.coefficients.row(a) = s.coefficients.transpose();
        rec.diagnostics.rows.push_back({s.residual_norm, s.sparsity, s.status, s.iterations, s.lambda});
        if (2 * s.sparsity > sys.targets.rows()) rec.diagnostics.not_sparse = true;
        if (!s.converged)
            rec.diagnostics.warnings.push_back("component " + std::to_string(a) + ": solver ended with status " +
                                               to_string(s.status));
    }
    if (rec.diagnostics.not_sparse)
        rec.diagnostics.warnings.push_back("support exceeds half the number of samples: the expansion is not sparse");
    return rec;
}

NodeReconstruction reconstruct_node(const NetworkData& data, int node, const NetworkConfig& config) {
    return reconstruct_node(build_network_system(data, config), node, config.solver);
}

std::vector<std::pair<int, int>> NetworkEstimate::edges() const {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (adjacency[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] &&
                (policy == EdgePolicy::none || i < j))
                e.emplace_back(i, j);
    return e;
}

double NetworkEstimate::weight(int i, int j) const {
    const auto& cij = coupling[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    const auto& cji = coupling[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    double w = cij.size() ? cij.cwiseAbs().maxCoeff() : 0.0;
    if (policy != EdgePolicy::none && cji.size()) w = std::max(w, cji.cwiseAbs().maxCoeff());
    return w;
}

NetworkEstimate assemble_network(std::vector<NodeReconstruction> rows, const NetworkLibrary& lib,
                                 double edge_fraction, EdgePolicy policy, std::optional<double> threshold) {
    const int n = lib.n, d = lib.d;
    const auto un = static_cast<std::size_t>(n);
    if (rows.size() != un) throw InvalidArgument("assemble_network: expected one reconstruction per node");
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.node < b.node; });
    for (int i = 0; i < n; ++i) {
        if (rows[static_cast<std::size_t>(i)].node != i)
            throw InvalidArgument("assemble_network: missing reconstruction for node " + std::to_string(i));
        if (rows[static_cast<std::size_t>(i)].coefficients.rows() != d ||
            rows[static_cast<std::size_t>(i)].coefficients.cols() != lib.cols())
            throw InvalidArgument("assemble_network: reconstruction shape does not match the library");
    }
    if (!(edge_fraction >= 0.0)) throw InvalidArgument("assemble_network: edge fraction must be non-negative");

    // Linear terms of a block: term index of x_b.
    std::vector<std::size_t> linear(static_cast<std::size_t>(d), 0);
    for (std::size_t t = 0; t < lib.block_terms.size(); ++t)
        for (int b = 0; b < d; ++b)
            if (lib.block_terms[t].is_linear_in(static_cast<std::size_t>(b))) linear[static_cast<std::size_t>(b)] = t;

    NetworkEstimate est;
    est.n = n;
    est.d = d;
    est.block_terms = lib.block_terms;
    est.policy = policy;
    est.coupling.assign(un, std::vector<Eigen::MatrixXd>(un, Eigen::MatrixXd::Zero(d, d)));
    est.nonlinear.assign(un, std::vector<double>(un, 0.0));
    est.adjacency.assign(un, std::vector<bool>(un, false));
    est.detected = est.adjacency;
    est.margins.assign(un, std::vector<double>(un, 0.0));

    double largest = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto& c = rows[static_cast<std::size_t>(i)].coefficients;
        Eigen::MatrixXd gamma(d, static_cast<Eigen::Index>(lib.block_terms.size()));
        for (std::size_t t = 0; t < lib.block_terms.size(); ++t) gamma.col(static_cast<Eigen::Index>(t)) = c.col(lib.column(i, t));
        est.gamma.push_back(std::move(gamma));
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            for (std::size_t t = 1; t < lib.block_terms.size(); ++t) {
                const Eigen::VectorXd col = c.col(lib.column(j, t));
                largest = std::max(largest, col.cwiseAbs().maxCoeff());
                const auto it = std::find(linear.begin(), linear.end(), t);
                if (it != linear.end())
                    est.coupling[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].col(it - linear.begin()) = col;
                else
                    est.nonlinear[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                        std::max(est.nonlinear[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                                 col.cwiseAbs().maxCoeff());
            }
        }
    }
    est.threshold = threshold.value_or(edge_fraction * largest);
    if (!(est.threshold >= 0.0)) throw InvalidArgument("assemble_network: threshold must be non-negative");

    // Smallest surviving |entry| over all block-j terms in node i's equations.
    std::vector<std::vector<double>> smallest(un, std::vector<double>(un, 0.0));
    for (int i = 0; i < n; ++i) {
        const auto& c = rows[static_cast<std::size_t>(i)].coefficients;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            double s = 0.0;
            for (std::size_t t = 1; t < lib.block_terms.size(); ++t)
                for (int a = 0; a < d; ++a) {
                    const double v = std::abs(c(a, lib.column(j, t)));
                    if (v > est.threshold && (s == 0.0 || v < s)) s = v;
                }
            smallest[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s;
            est.detected[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s > 0.0;
        }
    }
    for (std::size_t i = 0; i < un; ++i) {
        for (std::size_t j = 0; j < un; ++j) {
            if (i == j) continue;
            const bool ij = est.detected[i][j], ji = est.detected[j][i];
            bool edge = ij;
            if (policy == EdgePolicy::either) edge = ij || ji;
            if (policy == EdgePolicy::both) edge = ij && ji;
            est.adjacency[i][j] = edge;
            if (!edge) continue;
            double s = policy == EdgePolicy::none ? smallest[i][j] : 0.0;
            if (policy != EdgePolicy::none)
                for (double v : {smallest[i][j], smallest[j][i]})
                    if (v > 0.0 && (s == 0.0 || v < s)) s = v;
            est.margins[i][j] = est.threshold > 0.0 ? s / est.threshold : std::numeric_limits<double>::infinity();
        }
    }
    for (const auto& r : rows)
        for (const auto& w : r.diagnostics.warnings) est.warnings.push_back("node " + std::to_string(r.node) + ": " + w);
    est.rows = std::move(rows);
    return est;
}

NetworkEstimate reconstruct_network(const NetworkData& data, const NetworkConfig& config) {
    const NetworkSystem sys = build_network_system(data, config);
    std::vector<NodeReconstruction> rows;
    for (int i = 0; i < data.n; ++i) rows.push_back(reconstruct_node(sys, i, config.solver));
    NetworkEstimate est = assemble_network(std::move(rows), sys.library, config.edge_fraction, config.symmetrization);
    est.warnings.insert(est.warnings.begin(), sys.warnings.begin(), sys.warnings.end());
    return est;
}

Eigen::MatrixXd extract_nodal_dynamics(const NetworkEstimate& est, int node) {
    if (node < 0 || node >= est.n || static_cast<std::size_t>(node) >= est.gamma.size())
        throw InvalidArgument("extract_nodal_dynamics: node not reconstructed");
    Eigen::MatrixXd f = est.gamma[static_cast<std::size_t>(node)];
    for (int b = 0; b < est.d; ++b) {
        for (std::size_t t = 0; t < est.block_terms.size(); ++t) {
            if (!est.block_terms[t].is_linear_in(static_cast<std::size_t>(b))) continue;
            for (int j = 0; j < est.n; ++j)
                if (j != node)
                    f.col(static_cast<Eigen::Index>(t)) +=
                        est.coupling[static_cast<std::size_t>(node)][static_cast<std::size_t>(j)].col(b);
        }
    }
    return f;
}

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

nlohmann::json to_json(const NetworkEstimate& est) {
    nlohmann::json j;
    j["kind"] = "network";
    j["nodes"] = est.n;
    j["node_dim"] = est.d;
    j["threshold"] = est.threshold;
    j["symmetrization"] = to_string(est.policy);
    j["block_library"] = library_to_json(est.block_terms);
    auto edges = nlohmann::json::array();
    for (auto [a, b] : est.edges())
        edges.push_back({{"i", a},
                         {"j", b},
                         {"weight", est.weight(a, b)},
                         {"margin", est.margins[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]}});
    j["edges"] = edges;
    auto coupling = nlohmann::json::array();
    auto nonlinear = nlohmann::json::array();
    for (int i = 0; i < est.n; ++i)
        for (int k = 0; k < est.n; ++k) {
            if (i == k) continue;
            const auto& c = est.coupling[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            if (c.cwiseAbs().maxCoeff() > 0.0) coupling.push_back({{"i", i}, {"j", k}, {"matrix", matrix_json(c)}});
            const double nl = est.nonlinear[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            if (nl > 0.0) nonlinear.push_back({{"i", i}, {"j", k}, {"max_abs", nl}});
        }
    j["coupling"] = coupling;
    j["nonlinear_coupling_evidence"] = nonlinear;
    auto nodes = nlohmann::json::array();
    std::vector<std::string> names;
    for (const auto& t : est.block_terms) names.push_back(t.name());
    for (int i = 0; i < est.n; ++i) {
        nlohmann::json node{{"node", i},
                            {"term_names", names},
                            {"gamma", matrix_json(est.gamma[static_cast<std::size_t>(i)])},
                            {"local_dynamics", matrix_json(extract_nodal_dynamics(est, i))}};
        if (static_cast<std::size_t>(i) < est.rows.size()) {
            const auto& dg = est.rows[static_cast<std::size_t>(i)].diagnostics;
            auto rows = nlohmann::json::array();
            for (const auto& r : dg.rows)
                rows.push_back({{"residual_norm", r.residual_norm},
                                {"sparsity", r.sparsity},
                                {"status", to_string(r.status)},
                                {"iterations", r.iterations},
                                {"lambda", r.lambda}});
            node["diagnostics"] = {{"rows", rows}, {"samples", dg.samples}, {"not_sparse", dg.not_sparse}};
        }
        nodes.push_back(node);
    }
    j["node_models"] = nodes;
    j["warnings"] = est.warnings;
    return j;
}

}  // namespace sparsid
