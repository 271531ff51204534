#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "sparsid/bifurcation.hpp"
#include "sparsid/error.hpp"
#include "sparsid/model.hpp"
#include "sparsid/ode.hpp"
#include "sparsid/sim.hpp"

using namespace sparsid;

namespace {

TimeSeries lorenz_data(long samples, double dt = 0.01) {
    SimSpec spec;
    spec.system = SystemKind::lorenz;
    spec.dt = dt;
    spec.transient_discard = 1000;
    spec.horizon = 1000 + samples;
    return simulate_series(spec);
}

Eigen::MatrixXd lorenz_truth(const TermList& lib) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(3, static_cast<Eigen::Index>(lib.size()));
    auto col = [&](std::vector<int> e) {
        for (std::size_t j = 0; j < lib.size(); ++j)
            if (lib[j].exponents == e) return static_cast<Eigen::Index>(j);
        return Eigen::Index{-1};
    };
    c(0, col({1, 0, 0})) = -10.0;
    c(0, col({0, 1, 0})) = 10.0;
    c(1, col({1, 0, 0})) = 28.0;
    c(1, col({0, 1, 0})) = -1.0;
    c(1, col({1, 0, 1})) = -1.0;
    c(2, col({0, 0, 1})) = -8.0 / 3.0;
    c(2, col({1, 1, 0})) = 1.0;
    return c;
}

DiscoveryConfig five_point(int order = 3) {
    DiscoveryConfig c;
    c.order = order;
    c.scheme = DerivativeScheme::five_point;
    return c;
}

RecoveredModel quadratic_map_model() {
    SimSpec spec;
    spec.system = SystemKind::quadratic_map;
    spec.parameters = {{"a", 1.8}};
    spec.initial_state = {0.1};
    spec.transient_discard = 100;
    spec.horizon = 400;
    DiscoveryConfig c;
    c.order = 3;
    return discover_map(simulate_series(spec), c);
}

}  // namespace

TEST_CASE("exponential decay gives a single term") {
    Eigen::MatrixXd v(400, 1);
    for (int i = 0; i < 400; ++i) v(i, 0) = 2.0 * std::exp(-0.01 * i);
    const auto model = discover_ode(TimeSeries::uniform(v, 0.01), five_point());
    REQUIRE(model.support(0) == std::vector<Eigen::Index>{1});
    CHECK(model.coefficients(0, 1) == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(model.kind == ModelKind::ode);
    CHECK_FALSE(model.diagnostics.not_sparse);
}

TEST_CASE("Lorenz recovery") {
    const auto ts = lorenz_data(3000);
    const auto model = discover_ode(ts, five_point());
    REQUIRE(model.library.size() == 64);
    const auto truth = lorenz_truth(model.library);
    int nonzero = 0;
    for (int r = 0; r < 3; ++r) {
        for (Eigen::Index j = 0; j < truth.cols(); ++j) {
            if (truth(r, j) != 0.0) {
                CHECK(std::abs(model.coefficients(r, j) / truth(r, j) - 1.0) < 0.01);
            } else {
                CHECK(model.coefficients(r, j) == 0.0);
            }
        }
        nonzero += static_cast<int>(model.support(r).size());
    }
    CHECK(nonzero == 7);
    CHECK_FALSE(model.diagnostics.not_sparse);
    CHECK(model.diagnostics.coherence > 0.0);

    SUBCASE("shadows the true flow for a Lyapunov time") {
        const Eigen::VectorXd x0 = ts.values.row(500).transpose();
        const auto fit = simulate_model(model, x0, 110, 0.01);
        SimSpec spec;
        spec.system = SystemKind::lorenz;
        spec.initial_state = {x0[0], x0[1], x0[2]};
        spec.horizon = 111;
        const auto ref = simulate_series(spec);
        CHECK((fit.values - ref.values).cwiseAbs().maxCoeff() < 1e-3 * ref.values.cwiseAbs().maxCoeff());
    }

    SUBCASE("rediscovery from the recovered model keeps the support") {
        const Eigen::VectorXd x0 = ts.values.row(0).transpose();
        auto sim = simulate_model(model, x0, 3000, 0.01);
        const auto again = discover_ode(sim, five_point());
        for (int r = 0; r < 3; ++r) CHECK(again.support(r) == model.support(r));
    }

    SUBCASE("rows do not depend on solve order") {
        const auto d = estimate_derivatives(ts, DerivativeScheme::five_point);
        const Eigen::MatrixXd states = aligned_states(ts, d);
        Eigen::MatrixXd swapped(d.rates.rows(), 3);
        swapped << d.rates.col(2), d.rates.col(0), d.rates.col(1);
        const auto m2 = fit_sparse_model(ModelKind::ode, model.library, states, d.times, swapped, five_point());
        CHECK(m2.coefficients.row(0) == model.coefficients.row(2));
        CHECK(m2.coefficients.row(1) == model.coefficients.row(0));
        CHECK(m2.coefficients.row(2) == model.coefficients.row(1));
    }
}

TEST_CASE("partial observation is rejected") {
    const auto ts = lorenz_data(200);
    TimeSeries xy = ts;
    xy.values = ts.values.leftCols(2);
    xy.channel_names = {"x", "y"};
    DiscoveryConfig c = five_point();
    c.expected_dim = 3;
    CHECK_THROWS_AS(discover_ode(xy, c), PartialObservation);
    CHECK_NOTHROW(discover_ode(ts, c));
}

TEST_CASE("standard map with a Fourier library") {
    SimSpec spec;
    spec.system = SystemKind::standard_map;
    spec.parameters = {{"K", 0.9}, {"wrap", 0.0}};
    spec.initial_state = {0.3, 0.2};
    spec.horizon = 2000;
    const auto ts = simulate_series(spec);
    DiscoveryConfig c;
    c.map_library = MapLibraryKind::fourier;
    c.max_harmonic = 2;
    const auto model = discover_map(ts, c);
    const auto names = model.channel_names;
    std::map<std::string, double> p_row;
    for (auto j : model.support(1)) p_row[model.library[static_cast<std::size_t>(j)].name(names)] = model.coefficients(1, j);
    REQUIRE(p_row.size() == 2);
    CHECK(std::abs(p_row["sin(theta)"] - 0.9) < 1e-3);
    CHECK(p_row["p"] == doctest::Approx(1.0));
    CHECK(model.support(0).size() == 3);
}

TEST_CASE("identity map") {
    Eigen::MatrixXd v(30, 2);
    for (int i = 0; i < 30; ++i) v.row(i) << std::sin(0.3 * i), std::cos(0.7 * i);
    // Every row is its own image: pair v[i] with v[i] by repeating samples.
    Eigen::MatrixXd rep(60, 2);
    for (int i = 0; i < 30; ++i) rep.row(2 * i) = rep.row(2 * i + 1) = v.row(i);
    DiscoveryConfig c;
    c.order = 1;
    const auto d = map_increments(TimeSeries::uniform(rep, 1.0));
    Eigen::MatrixXd states(30, 2), images(30, 2);
    for (int i = 0; i < 30; ++i) {
        states.row(i) = rep.row(2 * i);
        images.row(i) = d.rates.row(2 * i);
    }
    const auto model = fit_sparse_model(ModelKind::map, build_polynomial_library(2, 1), states,
                                        Eigen::VectorXd::LinSpaced(30, 0, 29), images, c);
    CHECK(model.support(0) == std::vector<Eigen::Index>{1});
    CHECK(model.support(1) == std::vector<Eigen::Index>{2});
    CHECK(model.coefficients(0, 1) == doctest::Approx(1.0));
    CHECK(model.coefficients(1, 2) == doctest::Approx(1.0));
    const auto traj = simulate_model(model, Eigen::Vector2d(0.4, -0.2), 10, 1.0);
    CHECK((traj.values.rowwise() - traj.values.row(0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("quadratic map has two terms") {
    const auto model = quadratic_map_model();
    REQUIRE(model.support(0) == std::vector<Eigen::Index>{0, 2});
    CHECK(model.coefficients(0, 0) == doctest::Approx(1.8).epsilon(1e-9));
    CHECK(model.coefficients(0, 2) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("Ikeda iterates are flagged as not sparse") {
    SimSpec spec;
    spec.system = SystemKind::ikeda;
    spec.initial_state = {0.1, 0.1};
    spec.transient_discard = 100;
    spec.horizon = 124;
    DiscoveryConfig c;
    c.order = 3;
    const auto model = discover_map(simulate_series(spec), c);
    CHECK(model.diagnostics.not_sparse);
    CHECK_FALSE(model.diagnostics.warnings.empty());
}

TEST_CASE("time-varying linear drift") {
    SimSpec spec;
    spec.system = SystemKind::linear_drift;
    spec.initial_state = {1.0};
    spec.dt = 0.01;
    spec.horizon = 1001;
    const auto ts = simulate_series(spec);
    DiscoveryConfig c = five_point(1);
    c.time_order = 2;
    const auto model = discover_time_varying(ts, c);
    REQUIRE(model.library.size() == 6);
    const auto names = model.channel_names;
    std::map<std::string, double> row;
    for (auto j : model.support(0)) row[model.library[static_cast<std::size_t>(j)].name(names)] = model.coefficients(0, j);
    REQUIRE(row.size() == 2);
    CHECK(row["x"] == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(row["x*t"] == doctest::Approx(-0.1).epsilon(0.05));
    REQUIRE(model.window.has_value());
    CHECK(model.window->length() == doctest::Approx(10.0));

    SUBCASE("extrapolation is capped at one window length") {
        const Eigen::VectorXd x0 = ts.values.row(ts.samples() - 1).transpose();
        SimulateOptions o;
        o.t0 = 10.0;
        CHECK_NOTHROW(simulate_model(model, x0, 900, 0.01, o));
        CHECK_THROWS_AS(simulate_model(model, x0, 2500, 0.01, o), InvalidArgument);
        o.cap_extrapolation = false;
        CHECK_NOTHROW(simulate_model(model, x0, 2500, 0.01, o));
    }

    SUBCASE("trailing window") {
        DiscoveryConfig w = c;
        w.window_length = 4.0;
        const auto m = discover_time_varying(ts, w);
        CHECK(m.window->start == doctest::Approx(6.0));
        CHECK(m.diagnostics.samples < model.diagnostics.samples);
    }
}

TEST_CASE("stationary Lorenz has no time terms") {
    const auto ts = lorenz_data(2000);
    DiscoveryConfig c = five_point(2);
    c.time_order = 2;
    const auto model = discover_time_varying(ts, c);
    for (int r = 0; r < 3; ++r)
        for (auto j : model.support(r)) CHECK(model.library[static_cast<std::size_t>(j)].time_power == 0);
}

TEST_CASE("time order zero matches plain discovery") {
    const auto ts = lorenz_data(1000);
    DiscoveryConfig c = five_point(2);
    c.time_order = 0;
    const auto a = discover_time_varying(ts, c);
    const auto b = discover_ode(ts, c);
    CHECK(a.library == b.library);
    CHECK(a.coefficients == b.coefficients);
}

TEST_CASE("simulate_model contracts") {
    RecoveredModel zero;
    zero.kind = ModelKind::ode;
    zero.dim = 2;
    zero.library = build_polynomial_library(2, 1);
    zero.coefficients = Eigen::MatrixXd::Zero(2, 4);
    const auto flat = simulate_model(zero, Eigen::Vector2d(1, 2), 5, 0.1);
    CHECK(flat.samples() == 6);
    CHECK((flat.values.rowwise() - flat.values.row(0)).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(simulate_model(zero, Eigen::Vector3d(1, 2, 3), 5, 0.1), InvalidArgument);
    CHECK_THROWS_AS(simulate_model(zero, Eigen::Vector2d(1, 2), 5, 0.0), InvalidArgument);

    RecoveredModel blow = zero;
    blow.dim = 1;
    blow.library = build_polynomial_library(1, 2);
    blow.coefficients = Eigen::MatrixXd::Zero(1, 3);
    blow.coefficients(0, 2) = 1.0;
    try {
        simulate_model(blow, Eigen::VectorXd::Constant(1, 1.0), 100000, 0.1);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.step() > 0);
        CHECK(e.time() > 0.0);
    }
}

TEST_CASE("model report round trip") {
    const auto model = quadratic_map_model();
    const auto back = model_from_json(to_json(model));
    CHECK(back.kind == model.kind);
    CHECK(back.library == model.library);
    CHECK(back.coefficients == model.coefficients);
    CHECK(to_json(back) == to_json(model));
    CHECK_THROWS_AS(model_from_json(nlohmann::json{{"kind", "ode"}}), ParseError);
}

TEST_CASE("quadratic map boundary crisis") {
    const auto model = quadratic_map_model();
    ScanConfig sc;
    sc.parameter = {0, 0};
    for (int i = 0; i <= 20; ++i) sc.grid.push_back(1.5 + 0.05 * i);
    sc.horizon = 2000;
    sc.bracket_width = 0.005;
    const auto report = scan_bifurcation(model, sc);
    REQUIRE(report.transition_found);
    CHECK(std::abs(*report.critical_value - 2.0) <= 0.05);
    CHECK(report.bracket->first <= *report.critical_value);
    CHECK(*report.critical_value <= report.bracket->second);
    CHECK(report.points.front().outcome == Outcome::sustained);
    CHECK(report.points.back().outcome == Outcome::transient_escape);
    CHECK(report.points.back().mean_lifetime > 0.0);
    CHECK(to_json(scan_bifurcation(model, sc)).dump() == to_json(report).dump());

    ScanConfig bad = sc;
    bad.parameter = {0, 1};
    CHECK_THROWS_AS(scan_bifurcation(model, bad), InvalidArgument);
    bad = sc;
    std::reverse(bad.grid.begin(), bad.grid.end());
    CHECK_THROWS_AS(scan_bifurcation(model, bad), InvalidArgument);
}

TEST_CASE("contracting linear model has no transition") {
    RecoveredModel m;
    m.kind = ModelKind::ode;
    m.dim = 1;
    m.library = build_polynomial_library(1, 1);
    m.coefficients = Eigen::MatrixXd::Zero(1, 2);
    m.coefficients(0, 1) = -1.0;
    m.anchor_states = Eigen::MatrixXd::Constant(1, 1, 1.0);
    m.data_scale = 1.0;
    ScanConfig sc;
    sc.parameter = {0, 1};
    sc.grid = {-2.0, -1.5, -1.0, -0.5, -0.1};
    sc.horizon = 2000;
    sc.step = 0.01;
    const auto report = scan_bifurcation(m, sc);
    CHECK_FALSE(report.transition_found);
    CHECK(report.message == "no transition in range");
    CHECK(report.points.front().outcome == Outcome::fixed_point);
}
