#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sparsid/basis.hpp"
#include "sparsid/cli.hpp"
#include "sparsid/error.hpp"
#include "sparsid/game.hpp"
#include "sparsid/io.hpp"
#include "sparsid/model.hpp"
#include "sparsid/network.hpp"
#include "sparsid/ode.hpp"
#include "sparsid/sim.hpp"
#include "sparsid/solvers.hpp"
#include "sparsid/weakpde.hpp"

namespace py = pybind11;
using json = nlohmann::json;
using namespace sparsid;

// Structured results cross the boundary as JSON text; the Python side decodes.
namespace {

json parse(const std::string& text) {
    if (text.empty()) return json::object();
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("parse error: ") + e.what());
    }
}

TimeSeries make_series(const Eigen::VectorXd& times, const Eigen::MatrixXd& values,
                       const std::vector<std::string>& channels) {
    TimeSeries ts;
    ts.times = times;
    ts.values = values;
    ts.dt = TimeSeries::detect_step(times);
    ts.channel_names = channels;
    return ts;
}

GameRecord make_record(const Eigen::MatrixXi& strategies, const Eigen::MatrixXd& payoffs) {
    if (strategies.rows() != payoffs.rows() || strategies.cols() != payoffs.cols())
        throw InvalidArgument("strategies and payoffs must have the same shape");
    GameRecord rec;
    rec.agents = static_cast<int>(payoffs.cols());
    rec.payoffs = payoffs;
    rec.strategies.reserve(static_cast<std::size_t>(strategies.size()));
    for (Eigen::Index r = 0; r < strategies.rows(); ++r)
        for (Eigen::Index c = 0; c < strategies.cols(); ++c) {
            const int s = strategies(r, c);
            if (s != 0 && s != 1) throw InvalidArgument("strategies must be 0 (cooperate) or 1 (defect)");
            rec.strategies.push_back(s == 0 ? Strategy::cooperate : Strategy::defect);
        }
    return rec;
}

py::dict series_dict(const TimeSeries& ts) {
    py::dict d;
    d["kind"] = "series";
    d["times"] = ts.times;
    d["values"] = ts.values;
    d["channels"] = ts.channel_names;
    return d;
}

}  // namespace

PYBIND11_MODULE(_sparsid, m) {
    m.doc() = "Sparse identification of dynamics from data";

    // Later registrations are tried first, so the base class goes first.
    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());

    m.def("simulate", [](const std::string& spec) {
        const auto out = simulate(sim_spec_from_json(parse(spec)));
        if (const auto* ts = std::get_if<TimeSeries>(&out)) return series_dict(*ts);
        py::dict d;
        if (const auto* f = std::get_if<FieldData>(&out)) {
            d["kind"] = "field";
            d["x"] = f->x;
            d["t"] = f->t;
            d["u"] = f->u;
            d["periodic"] = f->periodic;
            return d;
        }
        const auto& g = std::get<GameRecord>(out);
        Eigen::MatrixXi s(g.rounds(), g.agents);
        for (Eigen::Index r = 0; r < g.rounds(); ++r)
            for (int a = 0; a < g.agents; ++a) s(r, a) = g.strategy(r, a) == Strategy::cooperate ? 0 : 1;
        d["kind"] = "game";
        d["strategies"] = s;
        d["payoffs"] = g.payoffs;
        return d;
    }, py::arg("spec"));

    m.def("discover", [](const std::string& kind, const Eigen::VectorXd& times, const Eigen::MatrixXd& values,
                         const std::vector<std::string>& channels, const std::string& config) {
        const auto ts = make_series(times, values, channels);
        const auto cfg = discovery_config_from_json(parse(config));
        if (kind == "ode") return to_json(discover_ode(ts, cfg)).dump();
        if (kind == "map") return to_json(discover_map(ts, cfg)).dump();
        if (kind == "time_varying") return to_json(discover_time_varying(ts, cfg)).dump();
        throw InvalidArgument("unknown model kind: " + kind);
    }, py::arg("kind"), py::arg("times"), py::arg("values"), py::arg("channels"), py::arg("config") = "");

    m.def("simulate_model", [](const std::string& model, const Eigen::VectorXd& initial, long steps, double step) {
        return series_dict(simulate_model(model_from_json(parse(model)), initial, steps, step));
    }, py::arg("model"), py::arg("initial"), py::arg("steps"), py::arg("step"));

    m.def("identify_pde", [](const Eigen::VectorXd& x, const Eigen::VectorXd& t, const Eigen::MatrixXd& u,
                             bool periodic, const std::string& config) {
        FieldData f;
        f.x = x;
        f.t = t;
        f.u = u;
        f.periodic = periodic;
        f.dx = x.size() > 1 ? x(1) - x(0) : 0.0;
        f.dt = t.size() > 1 ? t(1) - t(0) : 0.0;
        const auto model = identify_pde(f, pde_config_from_json(parse(config)));
        auto j = to_json(model);
        j["equation"] = model.equation();
        return j.dump();
    }, py::arg("x"), py::arg("t"), py::arg("u"), py::arg("periodic") = true, py::arg("config") = "");

    m.def("reconstruct_network", [](const Eigen::VectorXd& times, const Eigen::MatrixXd& values, int nodes,
                                    int dim, const std::string& config) {
        const auto data = make_network_data(make_series(times, values, {}), nodes, dim);
        return to_json(reconstruct_network(data, network_config_from_json(parse(config)))).dump();
    }, py::arg("times"), py::arg("values"), py::arg("nodes"), py::arg("dim"), py::arg("config") = "");

    m.def("reconstruct_game", [](const Eigen::MatrixXi& strategies, const Eigen::MatrixXd& payoffs,
                                 const std::string& params, const std::string& policy) {
        const auto rec = make_record(strategies, payoffs);
        const auto net = reconstruct_social_network(rec, game_params_from_json(parse(params)), {},
                                                    edge_policy_from_string(policy));
        json edges = json::array();
        for (const auto& e : edge_list(net)) edges.push_back({e.i, e.j});
        json rows = json::array();
        for (const auto& r : net.rows)
            rows.push_back({{"agent", r.agent},
                            {"weights", std::vector<double>(r.weights.data(), r.weights.data() + r.weights.size())},
                            {"rank", r.rank},
                            {"warnings", r.warnings}});
        return json{{"edges", edges}, {"consistency", net.consistency}, {"rows", rows}}.dump();
    }, py::arg("strategies"), py::arg("payoffs"), py::arg("params") = "", py::arg("policy") = "either");

    m.def("solve", [](const Eigen::MatrixXd& matrix, const Eigen::VectorXd& target, const std::string& solver,
                      double lambda, double threshold) {
        RegressionProblem p;
        p.matrix = matrix;
        p.target = target;
        p.lambda = lambda;
        p.threshold = threshold;
        return to_json(solve(p, solver_kind_from_string(solver))).dump();
    }, py::arg("matrix"), py::arg("target"), py::arg("solver") = "lasso_cd", py::arg("lam") = 0.0,
       py::arg("threshold") = 0.0);

    m.def("polynomial_terms", [](int dim, int order, const std::vector<std::string>& channels) {
        std::vector<std::string> names;
        for (const auto& t : build_polynomial_library(dim, order)) names.push_back(t.name(channels));
        return names;
    }, py::arg("dim"), py::arg("order"), py::arg("channels") = std::vector<std::string>{});

    m.def("run_cli", [](std::vector<std::string> args) {
        args.insert(args.begin(), "sparsid");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        return run_cli(static_cast<int>(argv.size()), argv.data());
    }, py::arg("args"));
}
