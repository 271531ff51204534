// End-to-end acceptance checks, one line per criterion.
//
// Usage: acceptance [--known-failures 5,6]
// Without the flag the exit status is nonzero if any criterion fails. With
// it, the listed criteria are expected to fail (and must), everything else
// must pass.

#include <chrono>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "sparsid/bifurcation.hpp"
#include "sparsid/game.hpp"
#include "sparsid/network.hpp"
#include "sparsid/ode.hpp"
#include "sparsid/sim.hpp"
#include "sparsid/solvers.hpp"
#include "sparsid/weakpde.hpp"

using namespace sparsid;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int precision = 4) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::map<std::string, double> row_terms(const RecoveredModel& m, int row) {
    std::map<std::string, double> out;
    for (auto j : m.support(row)) out[m.library[static_cast<std::size_t>(j)].name(m.channel_names)] = m.coefficients(row, j);
    return out;
}

// 1. Lorenz, dt 0.01, 5000 samples, cubic library, five-point derivatives.
Verdict lorenz() {
    const auto t0 = std::chrono::steady_clock::now();
    SimSpec spec;
    spec.system = SystemKind::lorenz;
    spec.dt = 0.01;
    spec.transient_discard = 1000;
    spec.horizon = 6000;
    const auto ts = simulate_series(spec);
    DiscoveryConfig c;
    c.order = 3;
    c.scheme = DerivativeScheme::five_point;
    const auto m = discover_ode(ts, c);
    const double wall = seconds_since(t0);

    const std::vector<std::map<std::string, double>> truth{
        {{"x", -10.0}, {"y", 10.0}}, {{"x", 28.0}, {"y", -1.0}, {"x*z", -1.0}}, {{"z", -8.0 / 3.0}, {"x*y", 1.0}}};
    bool ok = m.library.size() == 64;
    int terms = 0;
    double worst = 0.0;
    for (int r = 0; r < 3; ++r) {
        const auto got = row_terms(m, r);
        terms += static_cast<int>(got.size());
        for (const auto& [name, value] : got) {
            const auto it = truth[static_cast<std::size_t>(r)].find(name);
            if (it == truth[static_cast<std::size_t>(r)].end()) {
                ok = ok && std::abs(value) < 1e-3;
                continue;
            }
            worst = std::max(worst, std::abs(value / it->second - 1.0));
        }
        for (const auto& [name, value] : truth[static_cast<std::size_t>(r)]) ok = ok && got.count(name);
    }
    ok = ok && terms == 7 && worst < 0.01 && wall < 10.0;
    return {ok, std::to_string(m.library.size()) + " terms, support " + std::to_string(terms) + ", max rel err " +
                    fmt(worst) + ", " + fmt(wall, 3) + " s"};
}

// 2. Standard map, 2000 iterates, Fourier library with two harmonics.
Verdict standard_map() {
    const double k = 0.9;
    SimSpec spec;
    spec.system = SystemKind::standard_map;
    spec.parameters = {{"K", k}, {"wrap", 0.0}};
    spec.initial_state = {0.3, 0.2};
    spec.horizon = 2000;
    DiscoveryConfig c;
    c.map_library = MapLibraryKind::fourier;
    c.max_harmonic = 2;
    const auto m = discover_map(simulate_series(spec), c);
    const auto theta = row_terms(m, 0), p = row_terms(m, 1);
    const std::set<std::string> allowed{"theta", "p", "sin(theta)"};
    bool ok = p.size() == 2 && p.count("sin(theta)") && p.count("p") && std::abs(p.at("p") - 1.0) < 1e-3;
    const double err = p.count("sin(theta)") ? std::abs(p.at("sin(theta)") - k) : 1.0;
    for (const auto& row : {theta, p})
        for (const auto& [name, v] : row) ok = ok && allowed.count(name);
    ok = ok && err < 1e-3;
    return {ok, "|K - c_sin| = " + fmt(err, 3) + ", theta row " + std::to_string(theta.size()) + " terms, p row " +
                    std::to_string(p.size()) + " terms"};
}

// 3. x' = -(1 + 0.1 t) x on [0, 10].
Verdict time_varying() {
    SimSpec spec;
    spec.system = SystemKind::linear_drift;
    spec.initial_state = {1.0};
    spec.dt = 0.01;
    spec.horizon = 1001;
    DiscoveryConfig c;
    c.order = 1;
    c.time_order = 2;
    c.scheme = DerivativeScheme::five_point;
    const auto m = discover_time_varying(simulate_series(spec), c);
    const auto row = row_terms(m, 0);
    const bool ok = row.size() == 2 && row.count("x") && row.count("x*t") &&
                    std::abs(row.at("x") / -1.0 - 1.0) < 0.05 && std::abs(row.at("x*t") / -0.1 - 1.0) < 0.05;
    std::string d = std::to_string(row.size()) + " surviving terms";
    if (row.count("x")) d += ", x " + fmt(row.at("x"), 6);
    if (row.count("x*t")) d += ", x*t " + fmt(row.at("x*t"), 6);
    return {ok, d};
}

// 4. Quadratic map fitted at a = 1.8, boundary crisis scanned on [1.5, 2.5].
Verdict crisis() {
    SimSpec spec;
    spec.system = SystemKind::quadratic_map;
    spec.parameters = {{"a", 1.8}};
    spec.initial_state = {0.1};
    spec.transient_discard = 100;
    spec.horizon = 400;
    DiscoveryConfig c;
    c.order = 3;
    const auto m = discover_map(simulate_series(spec), c);
    ScanConfig sc;
    sc.parameter = {0, 0};
    for (int i = 0; i <= 20; ++i) sc.grid.push_back(1.5 + 0.05 * i);
    sc.horizon = 2000;
    sc.bracket_width = 0.005;
    const auto rep = scan_bifurcation(m, sc);
    if (!rep.transition_found) return {false, "no transition found"};

    // Oracle: iterate the exact map from the attractor's centre; the first
    // grid value whose orbit escapes.
    double oracle = 0.0;
    for (double a = 1.9; a <= 2.1; a += 1e-4) {
        double x = 0.0;
        bool escaped = false;
        for (int i = 0; i < 20000 && !escaped; ++i) {
            x = a - x * x;
            escaped = std::abs(x) > 10.0;
        }
        if (escaped) {
            oracle = a;
            break;
        }
    }
    const double ac = *rep.critical_value;
    return {std::abs(ac - 2.0) <= 0.05,
            "a_c = " + fmt(ac, 5) + " (exact-map oracle " + fmt(oracle, 5) + ", tolerance 0.05)"};
}

// 5. Twenty coupled Lorenz oscillators on G(20, 0.1), x-coupling 0.2.
bool network_exact(std::uint64_t seed, Eigen::Index rows) {
    Topology topo;
    topo.p = 0.1;
    auto inst = make_network_instance(20, topo, "lorenz", 0.2, {0}, seed);
    inst.spec.dt = 0.005;
    inst.spec.transient_discard = 4000;
    inst.spec.horizon = 24000;
    const auto data = make_network_data(simulate_series(inst.spec), 20, 3);
    NetworkConfig cfg;
    cfg.order = 2;
    cfg.max_total_degree = 2;
    cfg.scheme = DerivativeScheme::five_point;
    cfg.max_rows = rows;
    return reconstruct_network(data, cfg).adjacency == inst.adjacency;
}

Verdict network() {
    int exact = 0, exact_120 = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) exact += network_exact(seed, 60);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) exact_120 += network_exact(seed, 120);
    return {exact >= 9, std::to_string(exact) + "/10 exact at 60 samples per node (need 9); for reference " +
                            std::to_string(exact_120) + "/10 at 120"};
}

// 6. Twenty-two agents, mean degree about 4, PDG b = 1.2, kappa = 0.1.
int game_exact(long rounds, double mutation) {
    int exact = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Topology topo;
        topo.p = 4.0 / 21.0;
        const auto adj = make_graph(22, topo, seed);
        SimSpec s;
        s.system = SystemKind::game;
        s.parameters = {{"nodes", 22}, {"b", 1.2}, {"kappa", 0.1}, {"mutation", mutation}};
        s.edges = edges_of(adj);
        s.seed = seed;
        s.horizon = rounds;
        GameParams p;
        p.b = 1.2;
        p.kappa = 0.1;
        exact += reconstruct_social_network(simulate_game(s), p).adjacency == adj;
    }
    return exact;
}

Verdict game() {
    const int m15 = game_exact(15, 0.0), m30 = game_exact(30, 0.0);
    const int mu15 = game_exact(15, 0.5), mu30 = game_exact(30, 0.5);
    return {m15 == 10 && m30 == 10, "pure Fermi: " + std::to_string(m15) + "/10 at M=15, " + std::to_string(m30) +
                                        "/10 at M=30 (need 10/10); with mutation 0.5: " + std::to_string(mu15) +
                                        "/10 and " + std::to_string(mu30) + "/10"};
}

// 7. Kuramoto-Sivashinsky, 128 modes on 32 pi, 5000 samples.
Verdict ks() {
    SimSpec s;
    s.system = SystemKind::ks_pde;
    s.dt = 0.05;
    s.transient_discard = 1000;
    s.horizon = 6000;
    auto field = simulate_field(s);
    const std::vector<Eigen::Index> want{4, 6, 12};
    const auto clean = identify_pde(field, PdeConfig{});
    double worst = 0.0;
    for (Eigen::Index j : want) worst = std::max(worst, std::abs(clean.coefficients[j] + 1.0));

    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    const double rms = std::sqrt(field.u.squaredNorm() / static_cast<double>(field.u.size()));
    for (Eigen::Index i = 0; i < field.u.size(); ++i) field.u.data()[i] += 0.01 * rms * g(rng);
    const auto noisy = identify_pde(field, PdeConfig{});
    const bool ok = clean.support == want && worst < 0.1 && noisy.support == clean.support;
    return {ok, "clean: " + clean.equation(4) + " (max coefficient error " + fmt(worst, 3) + "); 1% noise: " +
                    noisy.equation(4)};
}

// 8. Ikeda iterates with a cubic polynomial library.
Verdict ikeda() {
    SimSpec spec;
    spec.system = SystemKind::ikeda;
    spec.initial_state = {0.1, 0.1};
    spec.transient_discard = 100;
    spec.horizon = 124;
    DiscoveryConfig c;
    c.order = 3;
    const auto m = discover_map(simulate_series(spec), c);
    std::size_t support = 0;
    for (int r = 0; r < m.dim; ++r) support = std::max(support, m.support(r).size());
    return {m.diagnostics.not_sparse, "not-sparse flag " + std::string(m.diagnostics.not_sparse ? "raised" : "not raised") +
                                          ", largest row support " + std::to_string(support) + " from " +
                                          std::to_string(m.diagnostics.samples) + " samples"};
}

// 9. Solver and identity properties.
struct Gaussian {
    Eigen::MatrixXd g;
    Eigen::VectorXd x;
    std::vector<Eigen::Index> support;
};

Gaussian gaussian(Eigen::Index m, Eigen::Index n, int k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> mag(0.5, 2.0);
    Gaussian s;
    s.g.resize(m, n);
    for (Eigen::Index i = 0; i < s.g.size(); ++i) s.g.data()[i] = nd(rng);
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    s.support.assign(idx.begin(), idx.begin() + k);
    std::sort(s.support.begin(), s.support.end());
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (auto j : s.support) a[j] = (rng() % 2 ? 1.0 : -1.0) * mag(rng);
    s.x = s.g * a;
    return s;
}

Verdict properties() {
    int kkt = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto s = gaussian(30, 50, 4, seed);
        const double lmax = lambda_max(s.g, s.x), lambda = 0.05 * lmax;
        const auto it = lasso_coordinate_descent(s.g, s.x, lambda);
        const Eigen::VectorXd grad = s.g.transpose() * (s.x - s.g * it.coefficients) / static_cast<double>(s.g.rows());
        bool ok = it.converged;
        for (Eigen::Index j = 0; j < grad.size(); ++j) {
            const double c = it.coefficients[j];
            ok = ok && (c == 0.0 ? std::abs(grad[j]) <= lambda + 1e-8 * lmax
                                 : std::abs(grad[j] - lambda * (c > 0 ? 1.0 : -1.0)) <= 1e-6 * lambda);
        }
        kkt += ok;
    }

    int monotone = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto s = gaussian(40, 60, 8, seed);
        RegressionProblem p;
        p.matrix = s.g;
        p.target = s.x;
        const auto h = solve_omp(p).residual_history;
        bool ok = !h.empty();
        for (std::size_t i = 1; i < h.size(); ++i) ok = ok && h[i] <= h[i - 1] + 1e-12;
        monotone += ok;
    }

    int agree = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const int k = 1 + static_cast<int>(seed % 15);
        const auto s = gaussian(60, 40, k, seed);
        RegressionProblem p;
        p.matrix = s.g;
        p.target = s.x;
        p.lambda = 1e-7 * lambda_max(s.g, s.x);
        p.threshold = 1e-3;
        p.relative_threshold = true;
        agree += solve_lasso_cd(p).support == s.support && solve_omp(p).support == s.support &&
                 solve_stls(p).support == s.support;
    }

    double fermi = 0.0;
    for (double a = -5.0; a <= 5.0; a += 0.25)
        for (double b = -5.0; b <= 5.0; b += 0.25)
            for (double kappa : {0.0, 0.01, 0.1, 1.0})
                fermi = std::max(fermi, std::abs(fermi_probability(a, b, kappa) + fermi_probability(b, a, kappa) - 1.0));

    // Integration by parts on u = sin(x) e^{-t/4}: weak u_x against the
    // direct integral of w u_x, bound 10 / nt^4 from the cubic time weight.
    FieldData f;
    const Eigen::Index nx = 128, nt = 64;
    f.dx = 2.0 * std::acos(-1.0) / nx;
    f.dt = 0.05;
    f.x = Eigen::VectorXd::LinSpaced(nx, 0.0, f.dx * (nx - 1));
    f.t = Eigen::VectorXd::LinSpaced(nt, 0.0, f.dt * (nt - 1));
    f.u.resize(nt, nx);
    for (Eigen::Index j = 0; j < nt; ++j)
        for (Eigen::Index i = 0; i < nx; ++i) f.u(j, i) = std::sin(f.x[i]) * std::exp(-0.25 * f.t[j]);
    double ibp = 0.0;
    DomainSampling ds;
    ds.count = 20;
    for (const auto& d : sample_domains(f, ds)) {
        const Eigen::MatrixXd w = weight_samples(f, d, 0, 0);
        double direct = 0.0;
        for (Eigen::Index j = 0; j <= d.nt; ++j)
            for (Eigen::Index i = 0; i <= d.nx; ++i) {
                const double cw = (j == 0 || j == d.nt ? 0.5 : 1.0) * (i == 0 || i == d.nx ? 0.5 : 1.0);
                direct += cw * w(j, i) * std::cos(f.x[d.x0 + i]) * std::exp(-0.25 * f.t[d.t0 + j]);
            }
        direct *= f.dx * f.dt;
        const double weak = weak_integral(f, d, PdeTerm{1, 1});
        const double bound = 10.0 / std::pow(static_cast<double>(d.nt), 4) * std::abs(direct) + 1e-12;
        ibp = std::max(ibp, std::abs(weak - direct) / bound);
    }

    const bool ok = kkt == 100 && monotone == 100 && agree >= 99 && fermi < 1e-14 && ibp <= 1.0;
    return {ok, "KKT " + std::to_string(kkt) + "/100, OMP monotone " + std::to_string(monotone) +
                    "/100, solver agreement " + std::to_string(agree) + "/100, Fermi defect " + fmt(fermi, 2) +
                    ", IBP error/bound " + fmt(ibp, 3)};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> expected_fail;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--known-failures") == 0 && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string item;
            while (std::getline(ss, item, ',')) expected_fail.insert(std::stoi(item));
        } else {
            std::cerr << "usage: acceptance [--known-failures 5,6]\n";
            return 2;
        }
    }

    const std::vector<std::pair<const char*, Verdict (*)()>> criteria{
        {"Lorenz recovery", lorenz},           {"standard-map Fourier recovery", standard_map},
        {"time-varying recovery", time_varying}, {"collapse prediction", crisis},
        {"oscillator-network reconstruction", network}, {"game-network reconstruction", game},
        {"weak-form KS identification", ks},  {"Ikeda negative control", ikeda},
        {"solver property suite", properties}};

    int unexpected = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << id << ". " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << ": " << o.detail << "  ["
                  << fmt(seconds_since(t0), 3) << " s]";
        const bool known = expected_fail.count(id) > 0;
        if (known) std::cout << (o.pass ? "  (listed as a known failure but passed)" : "  (known failure)");
        std::cout << std::endl;
        unexpected += o.pass == known;
    }
    return unexpected == 0 ? 0 : 1;
}
