#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "sparsid/basis.hpp"
#include "sparsid/error.hpp"
#include "sparsid/sim.hpp"

using namespace sparsid;

namespace {

std::vector<std::string> names(const TermList& terms, std::vector<std::string> channels = {"x", "y"}) {
    std::vector<std::string> out;
    for (const auto& t : terms) out.push_back(t.name(channels));
    return out;
}

}  // namespace

TEST_CASE("polynomial grid sizes") {
    CHECK(build_polynomial_library(3, 3).size() == 64);
    const auto one = build_polynomial_library(1, 0);
    REQUIRE(one.size() == 1);
    CHECK(one[0].is_constant());
    CHECK(build_polynomial_library(4, 2).size() == 81);
}

TEST_CASE("two-variable quadratic grid in graded order") {
    const auto terms = build_polynomial_library(2, 2);
    CHECK(names(terms) == std::vector<std::string>{"1", "x", "y", "x^2", "y^2", "x*y", "x^2*y", "x*y^2", "x^2*y^2"});
}

TEST_CASE("grid completeness and uniqueness") {
    for (int m = 1; m <= 3; ++m) {
        for (int q = 0; q <= 3; ++q) {
            const auto terms = build_polynomial_library(m, q);
            std::set<std::vector<int>> seen;
            for (const auto& t : terms) {
                CHECK(t.exponents.size() == static_cast<std::size_t>(m));
                for (int e : t.exponents) CHECK((e >= 0 && e <= q));
                seen.insert(t.exponents);
            }
            CHECK(seen.size() == terms.size());
            CHECK(terms.size() == static_cast<std::size_t>(std::pow(q + 1, m)));
            CHECK(terms.front().is_constant());
            for (std::size_t i = 1; i < terms.size(); ++i) CHECK(terms[i - 1].degree() <= terms[i].degree());
        }
    }
}

TEST_CASE("library construction is deterministic") {
    CHECK(build_polynomial_library(3, 3) == build_polynomial_library(3, 3));
    CHECK(build_time_augmented_library(2, 2, 2) == build_time_augmented_library(2, 2, 2));
}

TEST_CASE("total degree filter") {
    LibraryOptions opts;
    opts.max_total_degree = 2;
    const auto terms = build_polynomial_library(3, 2, opts);
    CHECK(terms.size() == 10);
    for (const auto& t : terms) CHECK(t.degree() <= 2);
}

TEST_CASE("library size cap and bad arguments") {
    LibraryOptions opts;
    opts.max_terms = 100;
    CHECK_THROWS_AS(build_polynomial_library(4, 3, opts), InfeasibleProblem);
    CHECK_THROWS_AS(build_polynomial_library(0, 3), InvalidArgument);
    CHECK_THROWS_AS(build_polynomial_library(2, -1), InvalidArgument);
    CHECK_THROWS_AS(build_time_augmented_library(3, 3, 1, opts), InfeasibleProblem);
    CHECK_THROWS_AS(build_time_augmented_library(1, 1, -1), InvalidArgument);
    CHECK_THROWS_AS(build_fourier_library(1, 0), InvalidArgument);
}

TEST_CASE("time-augmented library") {
    const auto small = build_time_augmented_library(1, 1, 1);
    CHECK(names(small, {"x"}) == std::vector<std::string>{"1", "t", "x", "x*t"});
    CHECK(build_time_augmented_library(3, 3, 0) == build_polynomial_library(3, 3));
    CHECK(build_time_augmented_library(1, 2, 2).size() == 9);
    CHECK(build_time_augmented_library(2, 3, 2).size() == 48);
}

TEST_CASE("fourier libraries") {
    CHECK(names(build_fourier_library(1, 1), {"x"}) == std::vector<std::string>{"1", "sin(x)", "cos(x)"});
    CHECK(names(build_fourier_library(2, 1)) == std::vector<std::string>{"1", "sin(x)", "cos(x)", "sin(y)", "cos(y)"});
    LibraryOptions deep;
    deep.fourier_depth = 2;
    const auto n = names(build_fourier_library(2, 2, deep));
    CHECK(std::find(n.begin(), n.end(), "sin(2*x)*cos(y)") != n.end());
    CHECK(n.size() == 1 + 8 + 16);
    const auto lf = names(build_linear_fourier_library(2, 1));
    CHECK(lf == std::vector<std::string>{"1", "x", "y", "sin(x)", "cos(x)", "sin(y)", "cos(y)"});
}

TEST_CASE("evaluation of the quadratic grid at a point") {
    const auto terms = build_polynomial_library(2, 2);
    Eigen::MatrixXd states(1, 2);
    states << 2.0, 3.0;
    const auto lib = evaluate_library(terms, states, Eigen::VectorXd::Zero(1), false);
    Eigen::RowVectorXd expect(9);
    expect << 1, 2, 3, 4, 9, 6, 12, 18, 36;
    CHECK((lib.matrix.row(0) - expect).norm() == 0.0);
    CHECK_FALSE(lib.normalized);
}

TEST_CASE("constant and identity columns on Lorenz data") {
    SimSpec spec;
    spec.system = SystemKind::lorenz;
    spec.horizon = 300;
    const auto ts = simulate_series(spec);
    const auto terms = build_polynomial_library(3, 2);
    const auto lib = evaluate_library(terms, ts, false);
    CHECK(lib.matrix.col(0).isOnes());
    CHECK((lib.matrix.col(1) - ts.values.col(0)).norm() == 0.0);
    for (Eigen::Index r = 0; r < ts.samples(); r += 37) {
        for (std::size_t c = 0; c < terms.size(); ++c) {
            const Eigen::VectorXd row = ts.values.row(r).transpose();
            CHECK(lib.matrix(r, static_cast<Eigen::Index>(c)) == terms[c].evaluate({row.data(), 3}, ts.times[r]));
        }
    }
}

TEST_CASE("normalization stores norms and flags zero columns") {
    Eigen::MatrixXd states(4, 2);
    states << 1, 0, 2, 0, 3, 0, 4, 0;
    const auto terms = build_polynomial_library(2, 1);
    const auto lib = evaluate_library(terms, states, Eigen::VectorXd::LinSpaced(4, 0, 3), true);
    CHECK(lib.normalized);
    CHECK(lib.column_norms[0] == doctest::Approx(2.0));
    CHECK(lib.column_norms[1] == doctest::Approx(std::sqrt(30.0)));
    CHECK(lib.matrix.col(0).norm() == doctest::Approx(1.0));
    CHECK(lib.matrix.col(1).norm() == doctest::Approx(1.0));
    CHECK(lib.zero_columns == std::vector<Eigen::Index>{2, 3});
}

TEST_CASE("non-finite samples and dimension mismatches are rejected") {
    Eigen::MatrixXd states(2, 2);
    states << 1, std::nan(""), 2, 3;
    CHECK_THROWS_AS(evaluate_library(build_polynomial_library(2, 1), states, Eigen::VectorXd::Zero(2)), InvalidArgument);
    Eigen::MatrixXd ok = Eigen::MatrixXd::Ones(2, 3);
    CHECK_THROWS_AS(evaluate_library(build_polynomial_library(2, 1), ok, Eigen::VectorXd::Zero(2)), InvalidArgument);
    CHECK_THROWS_AS(evaluate_library(build_time_augmented_library(3, 1, 1), ok, Eigen::VectorXd::Zero(1)),
                    InvalidArgument);
}

TEST_CASE("row permutation permutes the library rows") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    Eigen::MatrixXd states(12, 3);
    for (Eigen::Index i = 0; i < states.size(); ++i) states.data()[i] = g(rng);
    const Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(12, 0.0, 1.1);
    const auto terms = build_time_augmented_library(3, 2, 1);
    std::vector<int> perm(12);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd ps(12, 3);
    Eigen::VectorXd pt(12);
    for (int i = 0; i < 12; ++i) {
        ps.row(i) = states.row(perm[i]);
        pt[i] = times[perm[i]];
    }
    const auto a = evaluate_terms(terms, states, times);
    const auto b = evaluate_terms(terms, ps, pt);
    for (int i = 0; i < 12; ++i) CHECK((b.row(i) - a.row(perm[i])).norm() == 0.0);
}

TEST_CASE("normalized least squares round-trips to raw coordinates") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    Eigen::MatrixXd states(40, 2);
    for (Eigen::Index i = 0; i < states.size(); ++i) states.data()[i] = 3.0 * g(rng);
    const auto terms = build_polynomial_library(2, 2);
    const auto raw = evaluate_library(terms, states, Eigen::VectorXd::Zero(40), false);
    const auto norm = evaluate_library(terms, states, Eigen::VectorXd::Zero(40), true);
    Eigen::VectorXd truth = Eigen::VectorXd::LinSpaced(9, -2.0, 2.0);
    const Eigen::VectorXd target = raw.matrix * truth;
    const Eigen::VectorXd a_raw = raw.matrix.colPivHouseholderQr().solve(target);
    const Eigen::VectorXd a_norm = norm.matrix.colPivHouseholderQr().solve(target);
    for (int j = 0; j < 9; ++j) {
        const double back = a_norm[j] / norm.column_norms[j];
        CHECK(std::abs(back - a_raw[j]) <= 1e-12 * std::max(1.0, std::abs(a_raw[j])));
    }
}

TEST_CASE("descriptor json round trip") {
    LibraryOptions deep;
    deep.fourier_depth = 2;
    for (const auto& lib : {build_time_augmented_library(2, 2, 2), build_fourier_library(2, 2, deep)}) {
        CHECK(library_from_json(library_to_json(lib)) == lib);
    }
    auto doc = library_to_json(build_polynomial_library(1, 1));
    doc.push_back(doc[0]);
    CHECK_THROWS_AS(library_from_json(doc), ParseError);
    CHECK_THROWS_AS(term_kind_from_string("spline"), ParseError);
}
