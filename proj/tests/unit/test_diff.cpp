#include <doctest.h>

#include <cmath>

#include "sparsid/diff.hpp"
#include "sparsid/error.hpp"
#include "sparsid/timeseries.hpp"

using namespace sparsid;

namespace {

TimeSeries sampled(double dt, Eigen::Index n, double (*f)(double)) {
    Eigen::MatrixXd v(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) v(i, 0) = f(static_cast<double>(i) * dt);
    return TimeSeries::uniform(std::move(v), dt);
}

double max_error(const DerivativeEstimate& e, double (*df)(double)) {
    double worst = 0.0;
    for (Eigen::Index r = 0; r < e.rows(); ++r) worst = std::max(worst, std::abs(e.rates(r, 0) - df(e.times[r])));
    return worst;
}

}  // namespace

TEST_CASE("time series validation") {
    auto ts = TimeSeries::uniform(Eigen::MatrixXd::Ones(5, 2), 0.1);
    CHECK_NOTHROW(ts.validate());
    CHECK(ts.channel_names == std::vector<std::string>{"x1", "x2"});
    ts.times[3] = ts.times[2];
    CHECK_THROWS_AS(ts.validate(), InvalidArgument);
    ts = TimeSeries::uniform(Eigen::MatrixXd::Ones(5, 2), 0.1);
    ts.times[4] += 1e-3;
    CHECK_THROWS_AS(ts.validate(), InvalidArgument);
    ts.dt.reset();
    CHECK_NOTHROW(ts.validate());
    ts.values(0, 0) = std::nan("");
    CHECK_THROWS_AS(ts.validate(), InvalidArgument);
    CHECK(TimeSeries::detect_step(Eigen::VectorXd::LinSpaced(11, 0.0, 1.0)).value() == doctest::Approx(0.1));
    Eigen::VectorXd uneven(3);
    uneven << 0.0, 0.1, 0.3;
    CHECK_FALSE(TimeSeries::detect_step(uneven).has_value());
    const auto part = TimeSeries::uniform(Eigen::MatrixXd::Ones(5, 2), 0.1).slice(1, 3);
    CHECK(part.samples() == 3);
    CHECK(part.times[0] == doctest::Approx(0.1));
    CHECK_THROWS_AS(part.slice(2, 5), InvalidArgument);
}

TEST_CASE("backward differences") {
    auto c = sampled(0.1, 20, [](double) { return 3.0; });
    CHECK(backward_difference(c).rates.isZero(0.0));
    auto lin = sampled(0.1, 20, [](double t) { return t; });
    const auto e = backward_difference(lin);
    CHECK(e.rows() == 19);
    CHECK((e.rates.array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(e.sample_index.front() == 1);
    CHECK(e.times[0] == doctest::Approx(0.1));
    auto s = sampled(1e-3, 6000, [](double t) { return std::sin(t); });
    CHECK(max_error(backward_difference(s), [](double t) { return std::cos(t); }) < 5e-4);
}

TEST_CASE("central differences") {
    auto lin = sampled(0.25, 12, [](double t) { return 2.0 * t - 1.0; });
    CHECK((central_difference(lin).rates.array() - 2.0).abs().maxCoeff() < 1e-12);
    auto quad = sampled(0.1, 30, [](double t) { return t * t; });
    CHECK(max_error(central_difference(quad), [](double t) { return 2.0 * t; }) < 1e-12);
    auto s = sampled(1e-3, 6000, [](double t) { return std::sin(t); });
    const auto e = central_difference(s);
    CHECK(e.rows() == 5998);
    CHECK(max_error(e, [](double t) { return std::cos(t); }) < 2e-7);

    TimeSeries uneven;
    uneven.times.resize(4);
    uneven.times << 0.0, 0.1, 0.3, 0.6;
    uneven.values = uneven.times * 3.0;
    CHECK((central_difference(uneven).rates.array() - 3.0).abs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(backward_difference(uneven), InvalidArgument);
    CHECK_THROWS_AS(central_difference(sampled(0.1, 2, [](double t) { return t; })), InvalidArgument);
}

TEST_CASE("five-point stencil") {
    auto cubic = sampled(0.1, 30, [](double t) { return t * t * t - t; });
    const auto e = five_point_difference(cubic);
    CHECK(e.rows() == 26);
    CHECK(e.sample_index.front() == 2);
    CHECK(max_error(e, [](double t) { return 3.0 * t * t - 1.0; }) < 1e-11);
    auto s = sampled(1e-2, 600, [](double t) { return std::sin(t); });
    CHECK(max_error(five_point_difference(s), [](double t) { return std::cos(t); }) < 1e-9);
}

TEST_CASE("map increments pair each iterate with its image") {
    Eigen::MatrixXd v(4, 2);
    v << 1, 2, 3, 4, 5, 6, 7, 8;
    const auto ts = TimeSeries::uniform(v, 1.0);
    const auto e = map_increments(ts);
    CHECK(e.rows() == 3);
    CHECK(e.rates == v.bottomRows(3));
    CHECK(aligned_states(ts, e) == v.topRows(3));
    CHECK_THROWS_AS(map_increments(ts.slice(0, 1)), InvalidArgument);
}

TEST_CASE("differentiation is linear") {
    auto a = sampled(0.05, 50, [](double t) { return std::sin(3.0 * t); });
    auto b = sampled(0.05, 50, [](double t) { return std::exp(-t); });
    auto mix = a;
    mix.values = 2.0 * a.values - 0.7 * b.values;
    for (auto scheme : {DerivativeScheme::backward, DerivativeScheme::central, DerivativeScheme::five_point}) {
        const auto da = estimate_derivatives(a, scheme), db = estimate_derivatives(b, scheme);
        const auto dm = estimate_derivatives(mix, scheme);
        CHECK((dm.rates - (2.0 * da.rates - 0.7 * db.rates)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("alignment contract") {
    auto s = sampled(0.1, 20, [](double t) { return t; });
    const auto e = central_difference(s);
    const Eigen::MatrixXd states = aligned_states(s, e);
    CHECK(states.rows() == e.rows());
    CHECK(states(0, 0) == s.values(1, 0));
    CHECK_NOTHROW(check_alignment(e.times, e.times));
    CHECK_THROWS_AS(check_alignment(e.times.head(5), e.times), InvalidArgument);
    Eigen::VectorXd shifted = e.times.array() + 0.1;
    CHECK_THROWS_AS(check_alignment(shifted, e.times), InvalidArgument);
}

TEST_CASE("moving average drops the window edges") {
    auto s = sampled(0.1, 20, [](double t) { return 2.0 * t; });
    const auto m = moving_average(s, 5);
    CHECK(m.samples() == 16);
    CHECK(m.times[0] == doctest::Approx(s.times[2]));
    CHECK(m.values(0, 0) == doctest::Approx(s.values(2, 0)));
    CHECK_THROWS_AS(moving_average(s, 4), InvalidArgument);
    CHECK_THROWS_AS(moving_average(s, 21), InvalidArgument);
    CHECK(moving_average(s, 1).values == s.values);
}

TEST_CASE("scheme names") {
    for (auto s : {DerivativeScheme::backward, DerivativeScheme::central, DerivativeScheme::five_point})
        CHECK(derivative_scheme_from_string(to_string(s)) == s);
    CHECK_THROWS_AS(derivative_scheme_from_string("spline"), InvalidArgument);
}
