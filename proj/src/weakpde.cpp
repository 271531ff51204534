#include "sparsid/weakpde.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "sparsid/basis.hpp"
#include "sparsid/error.hpp"

namespace sparsid {

void FieldData::validate() const {
    if (u.rows() < 2 || u.cols() < 2) throw InvalidArgument("field: need at least a 2 x 2 lattice");
    if (x.size() != u.cols() || t.size() != u.rows()) throw InvalidArgument("field: axis lengths do not match values");
    if (!(dx > 0.0) || !(dt > 0.0)) throw InvalidArgument("field: spacings must be positive");
    if (!u.allFinite()) throw InvalidArgument("field: non-finite values");
}

std::string PdeTerm::name() const {
    const std::string d(static_cast<std::size_t>(derivative), 'x');
    const std::string up = power == 1 ? "u" : "u^" + std::to_string(power);
    if (derivative == 0) return up;
    if (power == 1) return "u_" + d;
    if (derivative == 1) return (power == 2 ? std::string("u") : "u^" + std::to_string(power - 1)) + "*u_x";
    return "(" + up + ")_" + d;
}

std::vector<PdeTerm> build_pde_library(int max_power, int max_derivative) {
    if (max_power < 1 || max_derivative < 0) throw InvalidArgument("pde library: need max_power >= 1, max_derivative >= 0");
    std::vector<PdeTerm> terms;
    for (int k = 0; k <= max_derivative; ++k)
        for (int p = 1; p <= max_power; ++p) terms.push_back({p, k});
    return terms;
}

namespace {

// Coefficients (ascending powers of s) of d^k/ds^k (1 - s^2)^p.
std::vector<double> bump_derivative(int p, int k) {
    std::vector<double> c(static_cast<std::size_t>(2 * p + 1), 0.0);
    double binom = 1.0;
    for (int i = 0; i <= p; ++i) {
        c[static_cast<std::size_t>(2 * i)] = (i % 2 ? -1.0 : 1.0) * binom;
        binom = binom * (p - i) / (i + 1);
    }
    for (int d = 0; d < k; ++d) {
        if (c.size() <= 1) {
            c.assign(1, 0.0);
            break;
        }
        std::vector<double> next(c.size() - 1);
        for (std::size_t i = 1; i < c.size(); ++i) next[i - 1] = c[i] * static_cast<double>(i);
        c = std::move(next);
    }
    return c;
}

double horner(const std::vector<double>& c, double s) {
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * s + *it;
    return v;
}

Eigen::VectorXd axis_weight(Eigen::Index cells, double spacing, int p, int k) {
    const auto coef = bump_derivative(p, k);
    const double half = 0.5 * static_cast<double>(cells) * spacing;
    const double scale = std::pow(half, -k);
    Eigen::VectorXd w(cells + 1);
    for (Eigen::Index i = 0; i <= cells; ++i) {
        const double s = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(cells);
        w[i] = scale * horner(coef, s);
    }
    return w;
}

Eigen::VectorXd trapezoid(Eigen::Index cells) {
    Eigen::VectorXd w = Eigen::VectorXd::Ones(cells + 1);
    w[0] = w[cells] = 0.5;
    return w;
}

void check_domain(const FieldData& data, const IntegrationDomain& d) {
    if (d.nx < 2 || d.nt < 2) throw InvalidArgument("integration domain: need at least 2 cells per axis");
    if (d.x0 < 0 || d.t0 < 0 || d.x0 + d.nx >= data.space_points() || d.t0 + d.nt >= data.time_points())
        throw InvalidArgument("integration domain: box not strictly inside the lattice");
    if (d.px < 1 || d.pt < 1) throw InvalidArgument("integration domain: weight orders must be positive");
}

// Integral over the box of w^(kx, kt) * u^power.
double weighted_integral(const FieldData& data, const IntegrationDomain& d, int kx, int kt, int power) {
    const Eigen::VectorXd wx = axis_weight(d.nx, data.dx, d.px, kx).cwiseProduct(trapezoid(d.nx));
    const Eigen::VectorXd wt = axis_weight(d.nt, data.dt, d.pt, kt).cwiseProduct(trapezoid(d.nt));
    const Eigen::MatrixXd block = data.u.block(d.t0, d.x0, d.nt + 1, d.nx + 1).array().pow(power).matrix();
    return wt.dot(block * wx) * data.dx * data.dt;
}

}  // namespace

Eigen::MatrixXd weight_samples(const FieldData& data, const IntegrationDomain& domain, int kx, int kt) {
    check_domain(data, domain);
    return axis_weight(domain.nt, data.dt, domain.pt, kt) * axis_weight(domain.nx, data.dx, domain.px, kx).transpose();
}

double weak_integral(const FieldData& data, const IntegrationDomain& domain, const PdeTerm& term) {
    check_domain(data, domain);
    if (term.power < 1 || term.derivative < 0) throw InvalidArgument("weak integral: invalid term");
    if (domain.px < term.derivative + 1)
        throw InvalidArgument("weak integral: spatial weight order " + std::to_string(domain.px) +
                              " too low for term " + term.name());
    const int k = term.derivative;
    const double sign = k % 2 ? -1.0 : 1.0;
    if (k == 0) return weighted_integral(data, domain, 0, 0, term.power);
    if (term.power >= 2 && k == 1) return -weighted_integral(data, domain, 1, 0, term.power) / term.power;
    return sign * weighted_integral(data, domain, k, 0, term.power);
}

double weak_time_derivative(const FieldData& data, const IntegrationDomain& domain) {
    check_domain(data, domain);
    if (domain.pt < 2) throw InvalidArgument("weak integral: temporal weight order too low for u_t");
    return -weighted_integral(data, domain, 0, 1, 1);
}

std::vector<IntegrationDomain> sample_domains(const FieldData& data, const DomainSampling& s) {
    data.validate();
    if (s.count < 1) throw InvalidArgument("domain sampling: need a positive count");
    if (s.min_cells < 2 || s.max_cells < s.min_cells) throw InvalidArgument("domain sampling: bad cell range");
    const Eigen::Index max_x = std::min(s.max_cells, data.space_points() - 2);
    const Eigen::Index max_t = std::min(s.max_cells, data.time_points() - 2);
    if (max_x < s.min_cells || max_t < s.min_cells)
        throw InvalidArgument("domain sampling: lattice too small for the requested box size");

    std::mt19937_64 rng(s.seed);
    auto pick = [&rng](Eigen::Index lo, Eigen::Index hi) {
        return lo + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };
    std::set<std::tuple<Eigen::Index, Eigen::Index, Eigen::Index, Eigen::Index>> seen;
    std::vector<IntegrationDomain> out;
    long attempts = 0;
    while (static_cast<int>(out.size()) < s.count) {
        if (++attempts > 1000L * s.count) throw InvalidArgument("domain sampling: not enough distinct boxes");
        IntegrationDomain d;
        d.nx = pick(s.min_cells, max_x);
        d.nt = pick(s.min_cells, max_t);
        d.x0 = pick(0, data.space_points() - 2 - d.nx);
        d.t0 = pick(0, data.time_points() - 2 - d.nt);
        d.px = s.px;
        d.pt = s.pt;
        if (seen.insert({d.x0, d.nx, d.t0, d.nt}).second) out.push_back(d);
    }
    return out;
}

PdeLibrary build_weak_system(const FieldData& data, const std::vector<IntegrationDomain>& domains,
                             const std::vector<PdeTerm>& terms) {
    data.validate();
    if (terms.empty()) throw InvalidArgument("weak system: empty library");
    if (domains.size() < terms.size())
        throw InvalidArgument("weak system: need at least as many domains as library terms");
    PdeLibrary lib;
    lib.terms = terms;
    lib.domains = domains;
    const auto L = static_cast<Eigen::Index>(domains.size());
    lib.q0.resize(L);
    lib.Q.resize(L, static_cast<Eigen::Index>(terms.size()));
    for (Eigen::Index l = 0; l < L; ++l) {
        const auto& d = domains[static_cast<std::size_t>(l)];
        check_domain(data, d);
        const auto block = data.u.block(d.t0, d.x0, d.nt + 1, d.nx + 1);
        if (block.maxCoeff() == block.minCoeff())
            lib.warnings.push_back("domain " + std::to_string(l) + " sees a constant field");
        lib.q0[l] = weak_time_derivative(data, d);
        for (std::size_t i = 0; i < terms.size(); ++i)
            lib.Q(l, static_cast<Eigen::Index>(i)) = weak_integral(data, d, terms[i]);
    }
    return lib;
}

PdeModel solve_weak_system(const PdeLibrary& system, double threshold) {
    if (!(threshold > 0.0)) throw InvalidArgument("pde identification: threshold must be positive");
    Eigen::MatrixXd unit = system.Q;
    std::vector<Eigen::Index> zero;
    const Eigen::VectorXd norms = normalize_columns(unit, &zero);

    RegressionProblem p;
    p.matrix = unit;
    p.target = system.q0;
    p.threshold = threshold;
    p.report_scale = norms.cwiseInverse();
    const SparseSolution s = solve_stls(p);

    PdeModel m;
    m.library = system.terms;
    m.coefficients = s.coefficients.cwiseQuotient(norms);
    m.support = s.support;
    m.residual_norm = s.residual_norm;
    const double q0 = system.q0.norm();
    m.relative_residual = q0 > 0.0 ? s.residual_norm / q0 : 0.0;
    m.status = s.status;
    m.drop_history = s.support_history;
    m.domains = system.q0.size();
    m.warnings = system.warnings;
    if (s.status == SolveStatus::empty_support)
        m.warnings.push_back("no term survived the threshold; lower it");
    return m;
}

PdeModel identify_pde(const FieldData& data, const PdeConfig& config) {
    const auto terms = build_pde_library(config.max_power, config.max_derivative);
    DomainSampling s;
    s.count = config.domains > 0 ? config.domains : 4 * static_cast<int>(terms.size());
    s.min_cells = config.min_cells;
    s.max_cells = config.max_cells;
    s.px = config.max_derivative + 2;
    s.pt = config.pt;
    s.seed = config.seed;
    const auto domains = sample_domains(data, s);
    return solve_weak_system(build_weak_system(data, domains, terms), config.threshold);
}

std::string PdeModel::equation(int precision) const {
    std::ostringstream os;
    os << std::setprecision(precision) << "u_t = ";
    bool first = true;
    for (Eigen::Index j : support) {
        const double c = coefficients[j];
        if (first) {
            os << c;
        } else {
            os << (c < 0 ? " - " : " + ") << std::abs(c);
        }
        os << "*" << library[static_cast<std::size_t>(j)].name();
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

nlohmann::json to_json(const PdeConfig& c) {
    return {{"max_power", c.max_power}, {"max_derivative", c.max_derivative}, {"domains", c.domains},
            {"min_cells", c.min_cells}, {"max_cells", c.max_cells},           {"pt", c.pt},
            {"seed", c.seed},           {"threshold", c.threshold}};
}

PdeConfig pde_config_from_json(const nlohmann::json& j, PdeConfig c) {
    try {
        c.max_power = j.value("max_power", c.max_power);
        c.max_derivative = j.value("max_derivative", c.max_derivative);
        c.domains = j.value("domains", c.domains);
        c.min_cells = j.value("min_cells", c.min_cells);
        c.max_cells = j.value("max_cells", c.max_cells);
        c.pt = j.value("pt", c.pt);
        c.seed = j.value("seed", c.seed);
        c.threshold = j.value("threshold", c.threshold);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("pde config: ") + e.what());
    }
    return c;
}

nlohmann::json to_json(const PdeModel& m) {
    auto lib = nlohmann::json::array();
    auto names = nlohmann::json::array();
    for (const auto& t : m.library) {
        lib.push_back({{"kind", "pde_term"}, {"power", t.power}, {"derivative", t.derivative}});
        names.push_back(t.name());
    }
    std::vector<double> coef(m.coefficients.data(), m.coefficients.data() + m.coefficients.size());
    auto history = nlohmann::json::array();
    for (const auto& h : m.drop_history) history.push_back(std::vector<long long>(h.begin(), h.end()));
    return {{"kind", "pde"},
            {"dim", 1},
            {"library", lib},
            {"term_names", names},
            {"coefficient_rows", nlohmann::json::array({coef})},
            {"equations", nlohmann::json::array({m.equation()})},
            {"diagnostics",
             {{"residual_norm", m.residual_norm},
              {"relative_residual", m.relative_residual},
              {"status", to_string(m.status)},
              {"domains", m.domains},
              {"drop_history", history},
              {"warnings", m.warnings}}}};
}

}  // namespace sparsid
