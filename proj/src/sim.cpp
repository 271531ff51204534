#include "sparsid/sim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <set>

#include <unsupported/Eigen/FFT>

#include "sparsid/error.hpp"

namespace sparsid {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct SystemName {
    SystemKind kind;
    const char* name;
};

constexpr SystemName system_names[] = {
    {SystemKind::lorenz, "lorenz"},
    {SystemKind::roessler, "roessler"},
    {SystemKind::standard_map, "standard_map"},
    {SystemKind::ikeda, "ikeda"},
    {SystemKind::quadratic_map, "quadratic_map"},
    {SystemKind::linear_drift, "linear_drift"},
    {SystemKind::coupled_network, "coupled_network"},
    {SystemKind::game, "game"},
    {SystemKind::ks_pde, "ks_pde"},
    {SystemKind::heat_pde, "heat_pde"},
};

}  // namespace

std::string to_string(SystemKind k) {
    for (const auto& s : system_names)
        if (s.kind == k) return s.name;
    return "lorenz";
}

SystemKind system_kind_from_string(const std::string& name) {
    for (const auto& s : system_names)
        if (name == s.name) return s.kind;
    throw InvalidArgument("unknown system '" + name + "'");
}

double SimSpec::param(const std::string& name, double fallback) const {
    const auto it = parameters.find(name);
    return it == parameters.end() ? fallback : it->second;
}

void SimSpec::validate() const {
    if (!(dt > 0.0)) throw InvalidArgument("sim spec: step must be positive");
    if (substeps < 1) throw InvalidArgument("sim spec: substeps must be at least 1");
    if (transient_discard < 0 || horizon <= transient_discard)
        throw InvalidArgument("sim spec: horizon must exceed the transient discard");
    const bool stochastic = system == SystemKind::game ||
                            (system == SystemKind::coupled_network && initial_state.empty());
    if (stochastic && !seed) throw InvalidArgument("sim spec: a seed is required for " + to_string(system));
}

// ---------------------------------------------------------------------------
// Defining equations
// ---------------------------------------------------------------------------

Eigen::Vector3d lorenz_rhs(const Eigen::Vector3d& s, double sigma, double rho, double beta) {
    return {sigma * (s[1] - s[0]), s[0] * (rho - s[2]) - s[1], s[0] * s[1] - beta * s[2]};
}

Eigen::Vector3d roessler_rhs(const Eigen::Vector3d& s, double a, double b, double c) {
    return {-s[1] - s[2], s[0] + a * s[1], b + s[2] * (s[0] - c)};
}

Eigen::Vector2d standard_map_step(const Eigen::Vector2d& s, double k) {
    const double p = s[1] + k * std::sin(s[0]);
    return {s[0] + p, p};
}

Eigen::Vector2d ikeda_step(const Eigen::Vector2d& s, double a, double b, double k, double p) {
    const double phi = p - k / (1.0 + s[0] * s[0] + s[1] * s[1]);
    const double c = std::cos(phi), sn = std::sin(phi);
    return {a + b * (s[0] * c - s[1] * sn), b * (s[0] * sn + s[1] * c)};
}

double quadratic_map_step(double x, double a) { return a - x * x; }

namespace {

using Rhs = std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>;

Eigen::VectorXd rk4(const Rhs& f, const Eigen::VectorXd& x, double t, double h) {
    const Eigen::VectorXd k1 = f(x, t);
    const Eigen::VectorXd k2 = f(x + 0.5 * h * k1, t + 0.5 * h);
    const Eigen::VectorXd k3 = f(x + 0.5 * h * k2, t + 0.5 * h);
    const Eigen::VectorXd k4 = f(x + h * k3, t + h);
    return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Eigen::VectorXd initial_or(const SimSpec& spec, std::initializer_list<double> fallback) {
    const std::vector<double> v = spec.initial_state.empty() ? std::vector<double>(fallback) : spec.initial_state;
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void check_dim(const Eigen::VectorXd& x, Eigen::Index dim, const SimSpec& spec) {
    if (x.size() != dim)
        throw InvalidArgument("sim spec: " + to_string(spec.system) + " needs a " + std::to_string(dim) +
                              "-component initial state");
}

// Records steps transient_discard .. horizon-1 of a one-step propagator.
template <typename Step>
TimeSeries record(const SimSpec& spec, Eigen::VectorXd x, double step_time, Step&& step) {
    const long rows = spec.horizon - spec.transient_discard;
    Eigen::MatrixXd values(rows, x.size());
    for (long i = 0; i < spec.horizon; ++i) {
        if (i >= spec.transient_discard) values.row(i - spec.transient_discard) = x.transpose();
        if (i + 1 == spec.horizon) break;
        x = step(x, static_cast<double>(i) * step_time);
        if (!x.allFinite())
            throw DivergenceError(to_string(spec.system) + ": state became non-finite at step " + std::to_string(i + 1),
                                  i + 1, static_cast<double>(i + 1) * step_time);
    }
    return TimeSeries::uniform(std::move(values), step_time, static_cast<double>(spec.transient_discard) * step_time);
}

TimeSeries integrate(const SimSpec& spec, Eigen::VectorXd x0, const Rhs& f) {
    const double h = spec.dt / spec.substeps;
    return record(spec, std::move(x0), spec.dt, [&](Eigen::VectorXd x, double t) {
        for (int s = 0; s < spec.substeps; ++s) x = rk4(f, x, t + s * h, h);
        return x;
    });
}

// ---------------------------------------------------------------------------
// Coupled oscillator networks
// ---------------------------------------------------------------------------

Eigen::VectorXd oscillator_rhs(const SimSpec& spec, const Eigen::VectorXd& x) {
    if (spec.oscillator == "roessler")
        return roessler_rhs(x, spec.param("a", 0.2), spec.param("b", 0.2), spec.param("c", 5.7));
    if (spec.oscillator == "lorenz")
        return lorenz_rhs(x, spec.param("sigma", 10.0), spec.param("rho", 28.0), spec.param("beta", 8.0 / 3.0));
    return -spec.param("rate", 1.0) * x;
}

TimeSeries simulate_network(const SimSpec& spec) {
    const int d = oscillator_dim(spec.oscillator);
    const int n = static_cast<int>(spec.param("nodes", 0.0));
    if (n < 2) throw InvalidArgument("coupled_network: parameter 'nodes' must be at least 2");
    for (int c : spec.coupled_components)
        if (c < 0 || c >= d) throw InvalidArgument("coupled_network: coupled component out of range");
    std::vector<std::vector<int>> neighbours(static_cast<std::size_t>(n));
    for (auto [i, j] : spec.edges) {
        if (i < 0 || j < 0 || i >= n || j >= n || i == j) throw InvalidArgument("coupled_network: invalid edge");
        neighbours[static_cast<std::size_t>(i)].push_back(j);
        neighbours[static_cast<std::size_t>(j)].push_back(i);
    }
    const double coupling = spec.param("coupling", 0.1);

    Eigen::VectorXd x0(n * d);
    if (!spec.initial_state.empty()) {
        x0 = Eigen::Map<const Eigen::VectorXd>(spec.initial_state.data(),
                                               static_cast<Eigen::Index>(spec.initial_state.size()));
        check_dim(x0, n * d, spec);
    } else {
        std::mt19937_64 rng(*spec.seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < d; ++c) {
                double v = 2.0 * u(rng) - 1.0;
                if (spec.oscillator == "roessler") v = c == 2 ? 0.5 * (v + 1.0) : 5.0 * v;
                if (spec.oscillator == "lorenz") v = c == 2 ? 25.0 + 15.0 * v : 15.0 * v;
                x0[i * d + c] = v;
            }
        }
    }

    const Rhs f = [&](const Eigen::VectorXd& x, double) {
        Eigen::VectorXd dx(x.size());
        for (int i = 0; i < n; ++i) {
            dx.segment(i * d, d) = oscillator_rhs(spec, x.segment(i * d, d));
            for (int j : neighbours[static_cast<std::size_t>(i)])
                for (int c : spec.coupled_components) dx[i * d + c] += coupling * (x[j * d + c] - x[i * d + c]);
        }
        return dx;
    };
    TimeSeries s = integrate(spec, x0, f);
    const char* comp = "xyz";
    s.channel_names.clear();
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < d; ++c)
            s.channel_names.push_back("n" + std::to_string(i + 1) + "_" + (d <= 3 ? std::string(1, comp[c]) : std::to_string(c + 1)));
    return s;
}

// ---------------------------------------------------------------------------
// PDEs
// ---------------------------------------------------------------------------

FieldData field_frame(const SimSpec& spec, Eigen::Index points, double length) {
    FieldData f;
    f.dx = length / static_cast<double>(points);
    f.dt = spec.dt;
    f.periodic = true;
    f.x = Eigen::VectorXd::LinSpaced(points, 0.0, length - f.dx);
    const long rows = spec.horizon - spec.transient_discard;
    f.t.resize(rows);
    for (long i = 0; i < rows; ++i) f.t[i] = static_cast<double>(i + spec.transient_discard) * spec.dt;
    f.u.resize(rows, points);
    return f;
}

Eigen::VectorXd initial_profile(const SimSpec& spec, const Eigen::VectorXd& x, double length,
                                const std::function<double(double)>& fallback) {
    if (!spec.initial_state.empty()) {
        Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(spec.initial_state.data(),
                                                              static_cast<Eigen::Index>(spec.initial_state.size()));
        check_dim(u, x.size(), spec);
        return u;
    }
    (void)length;
    return x.unaryExpr(fallback);
}

// Exponential time differencing RK4 on the Fourier modes of
// u_t = -u u_x - u_xx - u_xxxx, with two-thirds dealiasing of u^2.
FieldData simulate_ks(const SimSpec& spec) {
    const auto n = static_cast<Eigen::Index>(spec.param("points", 128));
    const double length = spec.param("length", 32.0 * std::numbers::pi);
    if (n < 8 || n % 2) throw InvalidArgument("ks_pde: 'points' must be an even number >= 8");
    FieldData field = field_frame(spec, n, length);
    Eigen::VectorXd u = initial_profile(spec, field.x, length, [length](double x) {
        const double s = two_pi * x / length;
        return std::cos(s) * (1.0 + std::sin(s));
    });

    using cd = std::complex<double>;
    const double h = spec.dt / spec.substeps;
    std::vector<double> k(static_cast<std::size_t>(n));
    std::vector<bool> keep(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index idx = j < n / 2 ? j : (j == n / 2 ? 0 : j - n);
        k[static_cast<std::size_t>(j)] = two_pi / length * static_cast<double>(idx);
        keep[static_cast<std::size_t>(j)] = std::abs(j < n / 2 ? j : j - n) < n / 3 && j != n / 2;
    }
    std::vector<cd> e(n), e2(n), q(n), f1(n), f2(n), f3(n), g(n);
    constexpr int contour = 32;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double kk = k[static_cast<std::size_t>(j)];
        const double lin = kk * kk - kk * kk * kk * kk;
        e[j] = std::exp(h * lin);
        e2[j] = std::exp(h * lin / 2.0);
        cd sq = 0, s1 = 0, s2 = 0, s3 = 0;
        for (int m = 1; m <= contour; ++m) {
            const cd r = std::exp(cd(0.0, std::numbers::pi * (m - 0.5) / contour));
            const cd lr = h * lin + r;
            sq += (std::exp(lr / 2.0) - 1.0) / lr;
            s1 += (-4.0 - lr + std::exp(lr) * (4.0 - 3.0 * lr + lr * lr)) / (lr * lr * lr);
            s2 += (2.0 + lr + std::exp(lr) * (-2.0 + lr)) / (lr * lr * lr);
            s3 += (-4.0 - 3.0 * lr - lr * lr + std::exp(lr) * (4.0 - lr)) / (lr * lr * lr);
        }
        q[j] = h * (sq / double(contour)).real();
        f1[j] = h * (s1 / double(contour)).real();
        f2[j] = h * (s2 / double(contour)).real();
        f3[j] = h * (s3 / double(contour)).real();
        g[j] = cd(0.0, -0.5 * (j == n / 2 ? 0.0 : kk));
    }

    Eigen::FFT<double> fft;
    std::vector<double> real(static_cast<std::size_t>(n));
    std::vector<cd> v, tmp;
    for (Eigen::Index j = 0; j < n; ++j) real[static_cast<std::size_t>(j)] = u[j];
    fft.fwd(v, real);

    auto nonlinear = [&](const std::vector<cd>& spec_in) {
        std::vector<cd> masked = spec_in;
        for (Eigen::Index j = 0; j < n; ++j)
            if (!keep[static_cast<std::size_t>(j)]) masked[j] = 0.0;
        fft.inv(real, masked);
        for (auto& r : real) r = r * r;
        std::vector<cd> out;
        fft.fwd(out, real);
        for (Eigen::Index j = 0; j < n; ++j) out[j] = keep[static_cast<std::size_t>(j)] ? g[j] * out[j] : cd(0.0);
        return out;
    };
    auto step = [&](std::vector<cd>& vh) {
        const auto nv = nonlinear(vh);
        std::vector<cd> a(n), b(n), c(n);
        for (Eigen::Index j = 0; j < n; ++j) a[j] = e2[j] * vh[j] + q[j] * nv[j];
        const auto na = nonlinear(a);
        for (Eigen::Index j = 0; j < n; ++j) b[j] = e2[j] * vh[j] + q[j] * na[j];
        const auto nb = nonlinear(b);
        for (Eigen::Index j = 0; j < n; ++j) c[j] = e2[j] * a[j] + q[j] * (2.0 * nb[j] - nv[j]);
        const auto nc = nonlinear(c);
        for (Eigen::Index j = 0; j < n; ++j)
            vh[j] = e[j] * vh[j] + nv[j] * f1[j] + 2.0 * (na[j] + nb[j]) * f2[j] + nc[j] * f3[j];
    };

    for (long i = 0; i < spec.horizon; ++i) {
        if (i >= spec.transient_discard) {
            fft.inv(real, v);
            for (Eigen::Index j = 0; j < n; ++j) {
                if (!std::isfinite(real[static_cast<std::size_t>(j)]))
                    throw DivergenceError("ks_pde: field became non-finite", i, static_cast<double>(i) * spec.dt);
                field.u(i - spec.transient_discard, j) = real[static_cast<std::size_t>(j)];
            }
        }
        if (i + 1 == spec.horizon) break;
        for (int s = 0; s < spec.substeps; ++s) step(v);
    }
    return field;
}

// Explicit second-order finite differences for u_t = D u_xx on a periodic
// domain; the inner step is shrunk to stay inside the stability limit.
FieldData simulate_heat(const SimSpec& spec) {
    const auto n = static_cast<Eigen::Index>(spec.param("points", 128));
    const double length = spec.param("length", two_pi);
    const double diff = spec.param("diffusivity", 0.5);
    if (n < 4) throw InvalidArgument("heat_pde: 'points' must be at least 4");
    if (!(diff > 0.0)) throw InvalidArgument("heat_pde: diffusivity must be positive");
    FieldData field = field_frame(spec, n, length);
    Eigen::VectorXd u = initial_profile(spec, field.x, length, [length](double x) {
        const double s = two_pi * x / length;
        return std::sin(s) + 0.5 * std::sin(2.0 * s) + 0.3 * std::cos(3.0 * s);
    });
    const double limit = 0.4 * field.dx * field.dx / diff;
    const int inner = std::max(spec.substeps, static_cast<int>(std::ceil(spec.dt / limit)));
    const double r = diff * (spec.dt / inner) / (field.dx * field.dx);
    Eigen::VectorXd next(n);
    for (long i = 0; i < spec.horizon; ++i) {
        if (i >= spec.transient_discard) field.u.row(i - spec.transient_discard) = u.transpose();
        if (i + 1 == spec.horizon) break;
        for (int s = 0; s < inner; ++s) {
            for (Eigen::Index j = 0; j < n; ++j)
                next[j] = u[j] + r * (u[(j + 1) % n] - 2.0 * u[j] + u[(j + n - 1) % n]);
            u.swap(next);
        }
    }
    return field;
}

// ---------------------------------------------------------------------------
// Evolutionary games
// ---------------------------------------------------------------------------

GameRecord run_game(const SimSpec& spec) {
    const int n = static_cast<int>(spec.param("nodes", 0.0));
    if (n < 1) throw InvalidArgument("game: parameter 'nodes' must be positive");
    GameParams params;
    params.game = spec.param("game", 0.0) == 0.0 ? GameKind::prisoners_dilemma : GameKind::snowdrift;
    params.b = spec.param("b", 1.2);
    params.r = spec.param("r", 0.5);
    params.kappa = spec.param("kappa", 0.1);
    params.validate();

    std::vector<std::vector<int>> neighbours(static_cast<std::size_t>(n));
    for (auto [i, j] : spec.edges) {
        if (i < 0 || j < 0 || i >= n || j >= n || i == j) throw InvalidArgument("game: invalid edge");
        neighbours[static_cast<std::size_t>(i)].push_back(j);
        neighbours[static_cast<std::size_t>(j)].push_back(i);
    }

    std::mt19937_64 rng(*spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double coop = spec.param("initial_cooperation", 0.5);
    // Probability of a random strategy after the imitation step.
    const double mutation = spec.param("mutation", 0.0);
    if (mutation < 0.0 || mutation > 1.0) throw InvalidArgument("game: mutation must lie in [0, 1]");
    std::vector<Strategy> s(static_cast<std::size_t>(n));
    if (!spec.initial_state.empty()) {
        if (static_cast<int>(spec.initial_state.size()) != n) throw InvalidArgument("game: initial state size");
        for (int i = 0; i < n; ++i)
            s[static_cast<std::size_t>(i)] = spec.initial_state[static_cast<std::size_t>(i)] != 0.0
                                                 ? Strategy::defect
                                                 : Strategy::cooperate;
    } else {
        for (auto& v : s) v = unit(rng) < coop ? Strategy::cooperate : Strategy::defect;
    }

    GameRecord rec;
    rec.agents = n;
    const long rows = spec.horizon - spec.transient_discard;
    rec.payoffs.resize(rows, n);
    rec.strategies.reserve(static_cast<std::size_t>(rows * n));
    std::vector<double> pay(static_cast<std::size_t>(n));
    for (long round = 0; round < spec.horizon; ++round) {
        for (int i = 0; i < n; ++i) {
            double p = 0.0;
            for (int j : neighbours[static_cast<std::size_t>(i)])
                p += pair_payoff(s[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(j)], params);
            pay[static_cast<std::size_t>(i)] = p;
        }
        if (round >= spec.transient_discard) {
            for (int i = 0; i < n; ++i) {
                rec.payoffs(round - spec.transient_discard, i) = pay[static_cast<std::size_t>(i)];
                rec.strategies.push_back(s[static_cast<std::size_t>(i)]);
            }
        }
        // Synchronous Fermi imitation of one random neighbour.
        std::vector<Strategy> next = s;
        for (int i = 0; i < n; ++i) {
            const auto& nb = neighbours[static_cast<std::size_t>(i)];
            if (nb.empty()) continue;
            const int j = nb[static_cast<std::size_t>(rng() % nb.size())];
            const double w = fermi_probability(pay[static_cast<std::size_t>(i)], pay[static_cast<std::size_t>(j)],
                                               params.kappa);
            if (unit(rng) < w) next[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(j)];
            if (mutation > 0.0 && unit(rng) < mutation)
                next[static_cast<std::size_t>(i)] = unit(rng) < 0.5 ? Strategy::cooperate : Strategy::defect;
        }
        s = std::move(next);
    }
    return rec;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

SimOutput simulate(const SimSpec& spec) {
    spec.validate();
    switch (spec.system) {
    case SystemKind::lorenz: {
        const double sigma = spec.param("sigma", 10.0), rho = spec.param("rho", 28.0),
                     beta = spec.param("beta", 8.0 / 3.0);
        Eigen::VectorXd x0 = initial_or(spec, {-8.0, 7.0, 27.0});
        check_dim(x0, 3, spec);
        TimeSeries s = integrate(spec, x0, [&](const Eigen::VectorXd& x, double) -> Eigen::VectorXd {
            return lorenz_rhs(x, sigma, rho, beta);
        });
        s.channel_names = {"x", "y", "z"};
        return s;
    }
    case SystemKind::roessler: {
        const double a = spec.param("a", 0.2), b = spec.param("b", 0.2), c = spec.param("c", 5.7);
        Eigen::VectorXd x0 = initial_or(spec, {1.0, 1.0, 0.0});
        check_dim(x0, 3, spec);
        TimeSeries s = integrate(spec, x0, [&](const Eigen::VectorXd& x, double) -> Eigen::VectorXd {
            return roessler_rhs(x, a, b, c);
        });
        s.channel_names = {"x", "y", "z"};
        return s;
    }
    case SystemKind::linear_drift: {
        const double rate = spec.param("rate", 1.0), drift = spec.param("drift", 0.1);
        Eigen::VectorXd x0 = initial_or(spec, {1.0});
        TimeSeries s = integrate(spec, x0, [&](const Eigen::VectorXd& x, double t) -> Eigen::VectorXd {
            return -(rate + drift * t) * x;
        });
        s.channel_names = {"x"};
        return s;
    }
    case SystemKind::standard_map: {
        const double k = spec.param("K", 0.9);
        const bool wrap = spec.param("wrap", 1.0) != 0.0;
        Eigen::VectorXd x0 = initial_or(spec, {0.5, 0.2});
        check_dim(x0, 2, spec);
        TimeSeries s = record(spec, x0, 1.0, [&](const Eigen::VectorXd& x, double) -> Eigen::VectorXd {
            Eigen::Vector2d next = standard_map_step(x, k);
            if (wrap) next[0] -= two_pi * std::floor(next[0] / two_pi);
            return next;
        });
        s.channel_names = {"theta", "p"};
        return s;
    }
    case SystemKind::ikeda: {
        const double a = spec.param("a", 1.0), b = spec.param("b", 0.9), k = spec.param("k", 6.0),
                     p = spec.param("p", 0.4);
        Eigen::VectorXd x0 = initial_or(spec, {0.1, 0.1});
        check_dim(x0, 2, spec);
        TimeSeries s = record(spec, x0, 1.0, [&](const Eigen::VectorXd& x, double) -> Eigen::VectorXd {
            return ikeda_step(x, a, b, k, p);
        });
        s.channel_names = {"x", "y"};
        return s;
    }
    case SystemKind::quadratic_map: {
        const double a = spec.param("a", 1.8);
        Eigen::VectorXd x0 = initial_or(spec, {0.1});
        check_dim(x0, 1, spec);
        TimeSeries s = record(spec, x0, 1.0, [&](const Eigen::VectorXd& x, double) -> Eigen::VectorXd {
            return Eigen::VectorXd::Constant(1, quadratic_map_step(x[0], a));
        });
        s.channel_names = {"x"};
        return s;
    }
    case SystemKind::coupled_network: return simulate_network(spec);
    case SystemKind::game: return run_game(spec);
    case SystemKind::ks_pde: return simulate_ks(spec);
    case SystemKind::heat_pde: return simulate_heat(spec);
    }
    throw InvalidArgument("unsupported system");
}

TimeSeries simulate_series(const SimSpec& spec) {
    auto out = simulate(spec);
    if (auto* s = std::get_if<TimeSeries>(&out)) return std::move(*s);
    throw InvalidArgument(to_string(spec.system) + " does not produce a time series");
}

FieldData simulate_field(const SimSpec& spec) {
    auto out = simulate(spec);
    if (auto* f = std::get_if<FieldData>(&out)) return std::move(*f);
    throw InvalidArgument(to_string(spec.system) + " does not produce a field");
}

GameRecord simulate_game(const SimSpec& spec) {
    auto out = simulate(spec);
    if (auto* g = std::get_if<GameRecord>(&out)) return std::move(*g);
    throw InvalidArgument(to_string(spec.system) + " does not produce a game record");
}

// ---------------------------------------------------------------------------
// Networks
// ---------------------------------------------------------------------------

int oscillator_dim(const std::string& oscillator) {
    if (oscillator == "roessler" || oscillator == "lorenz") return 3;
    if (oscillator == "linear") return 1;
    throw InvalidArgument("unknown oscillator '" + oscillator + "' (expected roessler, lorenz or linear)");
}

std::vector<std::vector<bool>> make_graph(int n, const Topology& topology, std::uint64_t seed) {
    if (n < 2) throw InvalidArgument("graph: need at least 2 nodes");
    std::vector<std::vector<bool>> adj(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n)));
    auto link = [&](int i, int j) {
        if (i == j) return;
        adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
        adj[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = true;
    };
    switch (topology.kind) {
    case TopologyKind::erdos_renyi: {
        if (!(topology.p >= 0.0 && topology.p <= 1.0)) throw InvalidArgument("graph: edge probability outside [0, 1]");
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (u(rng) < topology.p) link(i, j);
        break;
    }
    case TopologyKind::ring:
        if (topology.k < 1) throw InvalidArgument("graph: ring needs k >= 1");
        for (int i = 0; i < n; ++i)
            for (int s = 1; s <= topology.k; ++s) link(i, (i + s) % n);
        break;
    case TopologyKind::edge_list:
        for (auto [i, j] : topology.edges) {
            if (i < 0 || j < 0 || i >= n || j >= n || i == j) throw InvalidArgument("graph: invalid edge");
            link(i, j);
        }
        break;
    }
    return adj;
}

std::vector<std::pair<int, int>> edges_of(const std::vector<std::vector<bool>>& adjacency) {
    std::vector<std::pair<int, int>> e;
    for (std::size_t i = 0; i < adjacency.size(); ++i)
        for (std::size_t j = i + 1; j < adjacency.size(); ++j)
            if (adjacency[i][j] || adjacency[j][i]) e.emplace_back(static_cast<int>(i), static_cast<int>(j));
    return e;
}

NetworkInstance make_network_instance(int n, const Topology& topology, const std::string& oscillator,
                                      double coupling, std::vector<int> components, std::uint64_t seed) {
    NetworkInstance inst;
    inst.state_dim = oscillator_dim(oscillator);
    inst.adjacency = make_graph(n, topology, seed);
    inst.spec.system = SystemKind::coupled_network;
    inst.spec.oscillator = oscillator;
    inst.spec.coupled_components = std::move(components);
    inst.spec.parameters["nodes"] = n;
    inst.spec.parameters["coupling"] = coupling;
    inst.spec.edges = edges_of(inst.adjacency);
    inst.spec.seed = seed;
    return inst;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

nlohmann::json to_json(const SimSpec& spec) {
    nlohmann::json j{{"system", to_string(spec.system)},
                     {"parameters", spec.parameters},
                     {"initial_state", spec.initial_state},
                     {"horizon", spec.horizon},
                     {"dt", spec.dt},
                     {"substeps", spec.substeps},
                     {"transient_discard", spec.transient_discard},
                     {"oscillator", spec.oscillator},
                     {"coupled_components", spec.coupled_components}};
    j["seed"] = spec.seed ? nlohmann::json(*spec.seed) : nlohmann::json();
    auto edges = nlohmann::json::array();
    for (auto [a, b] : spec.edges) edges.push_back({a, b});
    j["edges"] = edges;
    return j;
}

SimSpec sim_spec_from_json(const nlohmann::json& j) {
    try {
        SimSpec s;
        s.system = system_kind_from_string(j.at("system").get<std::string>());
        s.parameters = j.value("parameters", std::map<std::string, double>{});
        s.initial_state = j.value("initial_state", std::vector<double>{});
        s.horizon = j.value("horizon", s.horizon);
        s.dt = j.value("dt", s.dt);
        s.substeps = j.value("substeps", s.substeps);
        s.transient_discard = j.value("transient_discard", s.transient_discard);
        s.oscillator = j.value("oscillator", s.oscillator);
        s.coupled_components = j.value("coupled_components", s.coupled_components);
        if (j.contains("seed") && !j["seed"].is_null()) s.seed = j["seed"].get<std::uint64_t>();
        for (const auto& e : j.value("edges", nlohmann::json::array())) s.edges.emplace_back(e.at(0), e.at(1));
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("sim spec: ") + e.what());
    }
}

}  // namespace sparsid
