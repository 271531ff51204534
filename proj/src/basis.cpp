#include "sparsid/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "sparsid/error.hpp"

namespace sparsid {

std::string to_string(TermKind kind) {
    switch (kind) {
    case TermKind::monomial: return "monomial";
    case TermKind::fourier: return "fourier";
    case TermKind::time_monomial_product: return "time_monomial_product";
    }
    return "monomial";
}

TermKind term_kind_from_string(const std::string& s) {
    if (s == "monomial") return TermKind::monomial;
    if (s == "fourier") return TermKind::fourier;
    if (s == "time_monomial_product") return TermKind::time_monomial_product;
    throw ParseError("unknown term kind '" + s + "'");
}

bool TermDescriptor::is_constant() const {
    if (time_power != 0) return false;
    const auto& idx = kind == TermKind::fourier ? fourier_index : exponents;
    return std::all_of(idx.begin(), idx.end(), [](int v) { return v == 0; });
}

int TermDescriptor::degree() const {
    if (kind == TermKind::fourier) return 0;
    int d = 0;
    for (int e : exponents) d += e;
    return d;
}

bool TermDescriptor::is_linear_in(std::size_t var) const {
    if (kind == TermKind::fourier || time_power != 0 || var >= exponents.size()) return false;
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        if (exponents[i] != (i == var ? 1 : 0)) return false;
    }
    return true;
}

namespace {

double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

double harmonic(int index, double x) {
    if (index > 0) return std::sin(static_cast<double>(index) * x);
    if (index < 0) return std::cos(static_cast<double>(-index) * x);
    return 1.0;
}

std::string channel(const std::vector<std::string>& channels, std::size_t i) {
    return i < channels.size() ? channels[i] : "x" + std::to_string(i + 1);
}

void check_cap(double count, std::size_t cap) {
    if (count > static_cast<double>(cap))
        throw InfeasibleProblem("library would hold " + std::to_string(static_cast<long double>(count)) +
                                " terms, above the cap of " + std::to_string(cap));
}

}  // namespace

double TermDescriptor::evaluate(std::span<const double> state, double t) const {
    double v = 1.0;
    if (kind == TermKind::fourier) {
        for (std::size_t i = 0; i < fourier_index.size(); ++i) v *= harmonic(fourier_index[i], state[i]);
        return v;
    }
    for (std::size_t i = 0; i < exponents.size(); ++i) v *= ipow(state[i], exponents[i]);
    return v * ipow(t, time_power);
}

std::string TermDescriptor::name(const std::vector<std::string>& channels) const {
    std::string out;
    auto append = [&out](const std::string& factor) {
        if (!out.empty()) out += "*";
        out += factor;
    };
    if (kind == TermKind::fourier) {
        for (std::size_t i = 0; i < fourier_index.size(); ++i) {
            const int k = fourier_index[i];
            if (k == 0) continue;
            const int a = std::abs(k);
            const std::string arg = (a == 1 ? "" : std::to_string(a) + "*") + channel(channels, i);
            append((k > 0 ? "sin(" : "cos(") + arg + ")");
        }
    } else {
        for (std::size_t i = 0; i < exponents.size(); ++i) {
            if (exponents[i] == 0) continue;
            append(channel(channels, i) + (exponents[i] == 1 ? "" : "^" + std::to_string(exponents[i])));
        }
        if (time_power > 0) append(time_power == 1 ? "t" : "t^" + std::to_string(time_power));
    }
    return out.empty() ? "1" : out;
}

TermList build_polynomial_library(int dim, int order, const LibraryOptions& opts) {
    if (dim < 1) throw InvalidArgument("polynomial library: dimension must be at least 1");
    if (order < 0) throw InvalidArgument("polynomial library: order must be non-negative");
    check_cap(std::pow(1.0 + order, dim), opts.max_terms);

    std::vector<std::vector<int>> grid;
    std::vector<int> e(static_cast<std::size_t>(dim), 0);
    while (true) {
        const int deg = std::accumulate(e.begin(), e.end(), 0);
        if (!opts.max_total_degree || deg <= *opts.max_total_degree) grid.push_back(e);
        std::size_t i = 0;
        while (i < e.size() && e[i] == order) e[i++] = 0;
        if (i == e.size()) break;
        ++e[i];
    }
    auto key = [](const std::vector<int>& v) {
        const int deg = std::accumulate(v.begin(), v.end(), 0);
        const auto active = std::count_if(v.begin(), v.end(), [](int x) { return x != 0; });
        return std::pair{deg, active};
    };
    std::sort(grid.begin(), grid.end(), [&](const auto& a, const auto& b) {
        const auto ka = key(a), kb = key(b);
        if (ka != kb) return ka < kb;
        return a > b;
    });

    TermList terms;
    terms.reserve(grid.size());
    for (auto& g : grid) terms.push_back({TermKind::monomial, std::move(g), 0, {}});
    return terms;
}

TermList build_time_augmented_library(int dim, int order, int time_order, const LibraryOptions& opts) {
    if (time_order < 0) throw InvalidArgument("time-augmented library: time order must be non-negative");
    check_cap(std::pow(1.0 + order, dim) * (1.0 + time_order), opts.max_terms);
    const TermList base = build_polynomial_library(dim, order, opts);
    TermList terms;
    terms.reserve(base.size() * static_cast<std::size_t>(time_order + 1));
    for (const auto& b : base) {
        for (int w = 0; w <= time_order; ++w) {
            TermDescriptor d = b;
            d.time_power = w;
            d.kind = w == 0 ? TermKind::monomial : TermKind::time_monomial_product;
            terms.push_back(std::move(d));
        }
    }
    return terms;
}

TermList build_fourier_library(int dim, int max_harmonic, const LibraryOptions& opts) {
    if (dim < 1) throw InvalidArgument("fourier library: dimension must be at least 1");
    if (max_harmonic < 1) throw InvalidArgument("fourier library: max harmonic must be at least 1");
    if (opts.fourier_depth < 1 || opts.fourier_depth > 2)
        throw InvalidArgument("fourier library: interaction depth must be 1 or 2");
    const double singles = 2.0 * max_harmonic * dim;
    const double pairs = opts.fourier_depth >= 2 ? 4.0 * max_harmonic * max_harmonic * dim * (dim - 1) / 2.0 : 0.0;
    check_cap(1.0 + singles + pairs, opts.max_terms);

    const auto m = static_cast<std::size_t>(dim);
    TermList terms;
    terms.push_back({TermKind::fourier, {}, 0, std::vector<int>(m, 0)});
    // sin before cos, harmonics ascending.
    std::vector<int> indices;
    for (int k = 1; k <= max_harmonic; ++k) {
        indices.push_back(k);
        indices.push_back(-k);
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (int k : indices) {
            std::vector<int> f(m, 0);
            f[i] = k;
            terms.push_back({TermKind::fourier, {}, 0, std::move(f)});
        }
    }
    if (opts.fourier_depth >= 2) {
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j)
                for (int ki : indices)
                    for (int kj : indices) {
                        std::vector<int> f(m, 0);
                        f[i] = ki;
                        f[j] = kj;
                        terms.push_back({TermKind::fourier, {}, 0, std::move(f)});
                    }
    }
    return terms;
}

TermList build_linear_fourier_library(int dim, int max_harmonic, const LibraryOptions& opts) {
    LibraryOptions poly = opts;
    poly.max_total_degree = 1;
    TermList terms = build_polynomial_library(dim, 1, poly);
    for (auto& t : build_fourier_library(dim, max_harmonic, opts)) {
        if (!t.is_constant()) terms.push_back(std::move(t));
    }
    return terms;
}

Eigen::MatrixXd evaluate_terms(const TermList& terms, const Eigen::MatrixXd& states, const Eigen::VectorXd& times) {
    const Eigen::Index rows = states.rows();
    const auto m = static_cast<std::size_t>(states.cols());
    bool needs_time = false;
    for (const auto& t : terms) {
        if (t.dim() != m)
            throw InvalidArgument("library evaluation: term '" + t.name() + "' has dimension " +
                                  std::to_string(t.dim()) + " but samples have " + std::to_string(m));
        needs_time = needs_time || t.time_power > 0;
    }
    if (needs_time && times.size() != rows)
        throw InvalidArgument("library evaluation: time-dependent terms need one timestamp per sample");
    if (!states.allFinite()) throw InvalidArgument("library evaluation: non-finite sample values");

    Eigen::MatrixXd out(rows, static_cast<Eigen::Index>(terms.size()));
    std::vector<double> state(m);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (std::size_t c = 0; c < m; ++c) state[c] = states(i, static_cast<Eigen::Index>(c));
        const double t = needs_time ? times[i] : 0.0;
        for (std::size_t j = 0; j < terms.size(); ++j) out(i, static_cast<Eigen::Index>(j)) = terms[j].evaluate(state, t);
    }
    return out;
}

Eigen::VectorXd normalize_columns(Eigen::MatrixXd& matrix, std::vector<Eigen::Index>* zero_columns) {
    Eigen::VectorXd norms(matrix.cols());
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
        const double n = matrix.col(j).norm();
        if (n > 0.0 && std::isfinite(n)) {
            norms[j] = n;
            matrix.col(j) /= n;
        } else {
            norms[j] = 1.0;
            if (zero_columns) zero_columns->push_back(j);
        }
    }
    return norms;
}

BasisLibrary evaluate_library(const TermList& terms, const Eigen::MatrixXd& states, const Eigen::VectorXd& times,
                              bool normalize) {
    BasisLibrary lib;
    lib.descriptors = terms;
    lib.matrix = evaluate_terms(terms, states, times);
    lib.normalized = normalize;
    if (normalize) {
        lib.column_norms = normalize_columns(lib.matrix, &lib.zero_columns);
    } else {
        lib.column_norms = Eigen::VectorXd::Ones(lib.matrix.cols());
    }
    return lib;
}

BasisLibrary evaluate_library(const TermList& terms, const TimeSeries& samples, bool normalize) {
    return evaluate_library(terms, samples.values, samples.times, normalize);
}

nlohmann::json to_json(const TermDescriptor& term) {
    return nlohmann::json{{"kind", to_string(term.kind)},
                          {"exponents", term.exponents},
                          {"time_power", term.time_power},
                          {"fourier_index", term.fourier_index}};
}

TermDescriptor term_from_json(const nlohmann::json& j) {
    try {
        TermDescriptor t;
        t.kind = term_kind_from_string(j.at("kind").get<std::string>());
        t.exponents = j.value("exponents", std::vector<int>{});
        t.time_power = j.value("time_power", 0);
        t.fourier_index = j.value("fourier_index", std::vector<int>{});
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("term descriptor: ") + e.what());
    }
}

nlohmann::json library_to_json(const TermList& terms) {
    auto arr = nlohmann::json::array();
    for (const auto& t : terms) arr.push_back(to_json(t));
    return arr;
}

TermList library_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw ParseError("library document must be an array");
    TermList terms;
    for (const auto& e : j) terms.push_back(term_from_json(e));
    std::set<std::string> seen;
    for (const auto& t : terms) {
        if (!seen.insert(to_json(t).dump()).second) throw ParseError("library document holds duplicate terms");
    }
    return terms;
}

}  // namespace sparsid
