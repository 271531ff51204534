#include "sparsid/cli.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sparsid/bifurcation.hpp"
#include "sparsid/error.hpp"
#include "sparsid/game.hpp"
#include "sparsid/io.hpp"
#include "sparsid/network.hpp"
#include "sparsid/ode.hpp"
#include "sparsid/sim.hpp"
#include "sparsid/weakpde.hpp"

namespace sparsid {

namespace {

using json = nlohmann::json;

const json& section(const json& cfg, const char* key) {
    static const json empty = json::object();
    return cfg.contains(key) && cfg[key].is_object() ? cfg[key] : empty;
}

SolverConfig override_solver(SolverConfig s, const RunConfig& run) {
    if (run.solver) s.kind = solver_kind_from_string(*run.solver);
    if (run.lambda) s.lambda = *run.lambda;
    if (run.threshold) s.threshold = *run.threshold;
    return s;
}

json resolve_topology(const json& t) {
    const std::string kind = t.value("kind", "erdos_renyi");
    if (kind != "erdos_renyi" && kind != "ring" && kind != "edge_list")
        throw InvalidArgument("topology kind must be erdos_renyi, ring or edge_list");
    return {{"kind", kind}, {"p", t.value("p", 0.1)}, {"k", t.value("k", 1)}};
}

json resolve_scan(const json& s, const RunConfig& run) {
    json out{{"row", s.value("row", 0)},
             {"horizon", s.value("horizon", 10000L)},
             {"step", s.value("step", 0.01)},
             {"ensemble", s.value("ensemble", 20)},
             {"perturbation", s.value("perturbation", 1e-3)},
             {"seed", run.seed ? *run.seed : s.value("seed", std::uint64_t{1})},
             {"bracket_width", s.value("bracket_width", 0.01)}};
    out["term"] = s.contains("term") ? s["term"] : json("1");
    out["escape_radius"] = s.contains("escape_radius") ? s["escape_radius"] : json();
    if (!s.contains("grid")) throw InvalidArgument("scan config: 'grid' is required");
    out["grid"] = s["grid"];
    return out;
}

std::vector<double> scan_grid(const json& g) {
    if (g.is_array()) return g.get<std::vector<double>>();
    const double from = g.at("from"), to = g.at("to");
    const int count = g.at("count");
    if (count < 2) throw InvalidArgument("scan grid: count must be at least 2");
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(from + (to - from) * i / (count - 1));
    return out;
}

}  // namespace

const std::vector<std::string>& cli_commands() {
    static const std::vector<std::string> c{"simulate",         "discover-ode",  "discover-map",
                                            "discover-tv",      "discover-network", "discover-game",
                                            "discover-pde",     "scan-bifurcation", "report"};
    return c;
}

std::uint64_t config_hash(const json& resolved) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : resolved.dump()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

json resolve_config(const RunConfig& run) {
    const auto& cmds = cli_commands();
    if (std::find(cmds.begin(), cmds.end(), run.command) == cmds.end())
        throw InvalidArgument("unknown command '" + run.command + "'");
    const json& cfg = run.config;
    try {
        json r = json::object();
        r["command"] = run.command;
        std::optional<std::string> input;
        if (run.input) input = run.input->string();
        else if (cfg.contains("input") && cfg["input"].is_string()) input = cfg["input"].get<std::string>();
        r["input"] = input ? json(*input) : json();

        const std::string& c = run.command;
        if (c == "simulate") {
            const json& sim = section(cfg, "simulation");
            SimSpec spec = sim_spec_from_json(sim.empty() ? json{{"system", "lorenz"}} : sim);
            if (run.seed) spec.seed = *run.seed;
            json s = to_json(spec);
            if (sim.contains("topology")) s["topology"] = resolve_topology(sim["topology"]);
            r["simulation"] = s;
            r["seed"] = s["seed"];
        } else if (c == "discover-ode" || c == "discover-map" || c == "discover-tv") {
            DiscoveryConfig d = discovery_config_from_json(section(cfg, "discovery"));
            d.solver = override_solver(d.solver, run);
            if (run.order) d.order = *run.order;
            if (run.time_order) d.time_order = *run.time_order;
            if (run.scheme) d.scheme = derivative_scheme_from_string(*run.scheme);
            r["discovery"] = to_json(d);
        } else if (c == "discover-network") {
            const json& n = section(cfg, "network");
            NetworkConfig nc = network_config_from_json(n);
            nc.solver = override_solver(nc.solver, run);
            if (run.order) nc.order = *run.order;
            if (run.scheme) nc.scheme = derivative_scheme_from_string(*run.scheme);
            json out = to_json(nc);
            out["nodes"] = n.contains("nodes") ? n["nodes"] : json();
            out["node_dim"] = n.contains("node_dim") ? n["node_dim"] : json();
            r["network"] = out;
        } else if (c == "discover-game") {
            const json& g = section(cfg, "game");
            GameParams p = game_params_from_json(g);
            SolverConfig s = g.contains("solver") ? solver_config_from_json(g["solver"], GameReconstructionConfig::default_solver())
                                                  : GameReconstructionConfig::default_solver();
            s = override_solver(s, run);
            json out = to_json(p);
            out["solver"] = to_json(s);
            out["boolean_threshold"] = g.value("boolean_threshold", 0.5);
            out["symmetrization"] = to_string(edge_policy_from_string(g.value("symmetrization", std::string("or"))));
            out["rounds"] = g.contains("rounds") ? g["rounds"] : json();
            r["game"] = out;
        } else if (c == "discover-pde") {
            PdeConfig p = pde_config_from_json(section(cfg, "pde"));
            if (run.seed) p.seed = *run.seed;
            if (run.threshold) p.threshold = *run.threshold;
            r["pde"] = to_json(p);
            r["seed"] = p.seed;
        } else if (c == "scan-bifurcation") {
            r["scan"] = resolve_scan(section(cfg, "scan"), run);
            r["seed"] = r["scan"]["seed"];
        }
        if (!r.contains("seed")) r["seed"] = json();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
}

namespace {

struct Context {
    const json& cfg;
    std::filesystem::path out;
    std::vector<std::filesystem::path> artifacts;
    json library = json();
    json diagnostics = json::object();
    int code = exit_ok;

    std::filesystem::path artifact(const std::string& name) {
        artifacts.push_back(out / name);
        return artifacts.back();
    }
    std::filesystem::path input() const {
        if (cfg["input"].is_null()) throw InvalidArgument(cfg["command"].get<std::string>() + ": --input is required");
        return cfg["input"].get<std::string>();
    }
};

std::string tidy_coefficients(const RecoveredModel& m) {
    std::string out = "row,term,coefficient\n";
    for (int r = 0; r < m.dim; ++r)
        for (Eigen::Index t = 0; t < m.coefficients.cols(); ++t) {
            if (m.coefficients(r, t) == 0.0) continue;
            const auto name = r < static_cast<int>(m.channel_names.size()) ? m.channel_names[static_cast<std::size_t>(r)]
                                                                            : std::to_string(r);
            out += name + "," + m.library[static_cast<std::size_t>(t)].name(m.channel_names) + "," +
                   format_double(m.coefficients(r, t)) + "\n";
        }
    return out;
}

void finish_model(Context& ctx, const RecoveredModel& m) {
    const json doc = to_json(m);
    write_json(ctx.artifact("model.json"), doc);
    write_text(ctx.artifact("coefficients.csv"), tidy_coefficients(m));
    ctx.library = doc["library"];
    ctx.diagnostics = doc["diagnostics"];
    bool converged = true;
    for (const auto& r : m.diagnostics.rows) converged = converged && r.status == SolveStatus::converged;
    if (m.diagnostics.not_sparse) ctx.code = exit_not_sparse;
    else if (!converged) ctx.code = exit_not_converged;
}

void do_simulate(Context& ctx) {
    json sim = ctx.cfg["simulation"];
    SimSpec spec = sim_spec_from_json(sim);
    std::vector<std::vector<bool>> truth;
    if (sim.contains("topology") && spec.edges.empty()) {
        const json& t = sim["topology"];
        Topology topo;
        const std::string kind = t["kind"];
        topo.kind = kind == "ring" ? TopologyKind::ring : TopologyKind::erdos_renyi;
        topo.p = t["p"];
        topo.k = t["k"];
        if (!spec.seed) throw InvalidArgument("simulate: a seed is required to draw a random graph");
        truth = make_graph(static_cast<int>(spec.param("nodes", 0.0)), topo, *spec.seed);
        spec.edges = edges_of(truth);
    }
    const SimOutput out = simulate(spec);
    if (const auto* s = std::get_if<TimeSeries>(&out)) {
        write_timeseries_csv(ctx.artifact("series.csv"), *s);
        ctx.diagnostics = {{"samples", s->samples()}, {"channels", s->channels()}};
    } else if (const auto* f = std::get_if<FieldData>(&out)) {
        write_field_binary(ctx.artifact("field.bin"), *f);
        ctx.artifacts.push_back(ctx.out / "field.bin.json");
        ctx.diagnostics = {{"time_points", f->time_points()}, {"space_points", f->space_points()}};
    } else if (const auto* g = std::get_if<GameRecord>(&out)) {
        write_game_csv(ctx.artifact("game.csv"), *g);
        ctx.diagnostics = {{"rounds", g->rounds()}, {"agents", g->agents}};
    }
    if (!spec.edges.empty()) {
        std::vector<WeightedEdge> edges;
        for (auto [a, b] : spec.edges) edges.push_back({std::min(a, b), std::max(a, b), 1.0});
        std::sort(edges.begin(), edges.end(), [](auto& x, auto& y) { return std::pair(x.i, x.j) < std::pair(y.i, y.j); });
        write_edge_list_csv(ctx.artifact("truth_edges.csv"), edges);
    }
}

void do_discover(Context& ctx, const std::string& cmd) {
    const DiscoveryConfig config = discovery_config_from_json(ctx.cfg["discovery"]);
    const TimeSeries series = read_timeseries_csv(ctx.input());
    RecoveredModel m = cmd == "discover-ode"   ? discover_ode(series, config)
                       : cmd == "discover-map" ? discover_map(series, config)
                                               : discover_time_varying(series, config);
    finish_model(ctx, m);
}

void do_network(Context& ctx) {
    const json& n = ctx.cfg["network"];
    const NetworkConfig config = network_config_from_json(n);
    const TimeSeries series = read_timeseries_csv(ctx.input());
    if (n["nodes"].is_null()) throw InvalidArgument("discover-network: network.nodes is required");
    const int nodes = n["nodes"];
    const int dim = n["node_dim"].is_null() ? static_cast<int>(series.channels() / std::max(nodes, 1))
                                            : n["node_dim"].get<int>();
    const NetworkEstimate est = reconstruct_network(make_network_data(series, nodes, dim), config);
    const json doc = to_json(est);
    write_json(ctx.artifact("network.json"), doc);
    write_edge_list_csv(ctx.artifact("edges.csv"), edge_list(est));
    ctx.library = doc["block_library"];
    bool not_sparse = false, converged = true;
    for (const auto& r : est.rows) {
        not_sparse = not_sparse || r.diagnostics.not_sparse;
        for (const auto& d : r.diagnostics.rows) converged = converged && d.status == SolveStatus::converged;
    }
    ctx.diagnostics = {{"edges", est.edges().size()}, {"threshold", est.threshold}, {"warnings", est.warnings},
                       {"not_sparse", not_sparse}};
    if (not_sparse) ctx.code = exit_not_sparse;
    else if (!converged) ctx.code = exit_not_converged;
}

void do_game(Context& ctx) {
    const json& g = ctx.cfg["game"];
    const GameParams params = game_params_from_json(g);
    GameRecord rec = read_game_csv(ctx.input());
    if (!g["rounds"].is_null()) rec = rec.first_rounds(g["rounds"].get<Eigen::Index>());
    GameReconstructionConfig config;
    config.solver = solver_config_from_json(g["solver"], config.solver);
    config.boolean_threshold = g["boolean_threshold"];
    const SocialNetwork net =
        reconstruct_social_network(rec, params, config, edge_policy_from_string(g["symmetrization"]));
    json doc{{"kind", "game_network"}, {"agents", rec.agents}, {"rounds", rec.rounds()},
             {"consistency", net.consistency}, {"params", to_json(params)}};
    auto rows = json::array();
    std::vector<std::string> warnings;
    for (const auto& r : net.rows) {
        rows.push_back({{"agent", r.agent},
                        {"weights", std::vector<double>(r.weights.data(), r.weights.data() + r.weights.size())},
                        {"rank", r.rank}});
        for (const auto& w : r.warnings) warnings.push_back("agent " + std::to_string(r.agent) + ": " + w);
    }
    auto edges = json::array();
    const auto list = edge_list(net);
    for (const auto& e : list) edges.push_back({{"i", e.i}, {"j", e.j}, {"weight", e.weight}});
    doc["rows"] = rows;
    doc["edges"] = edges;
    doc["warnings"] = warnings;
    write_json(ctx.artifact("network.json"), doc);
    write_edge_list_csv(ctx.artifact("edges.csv"), list);
    ctx.diagnostics = {{"edges", list.size()}, {"consistency", net.consistency}, {"warnings", warnings}};
}

void do_pde(Context& ctx) {
    const PdeConfig config = pde_config_from_json(ctx.cfg["pde"]);
    const auto path = ctx.input();
    const FieldData field = path.extension() == ".csv" ? read_field_csv(path) : read_field_binary(path);
    const PdeModel m = identify_pde(field, config);
    const json doc = to_json(m);
    write_json(ctx.artifact("model.json"), doc);
    ctx.library = doc["library"];
    ctx.diagnostics = doc.contains("diagnostics") ? doc["diagnostics"] : json::object();
    if (m.status != SolveStatus::converged) ctx.code = exit_not_converged;
}

void do_scan(Context& ctx) {
    const json& s = ctx.cfg["scan"];
    const RecoveredModel model = model_from_json(read_json(ctx.input()));
    ScanConfig config;
    config.parameter.row = s["row"];
    if (s["term"].is_string()) {
        const std::string want = s["term"];
        bool found = false;
        for (std::size_t t = 0; t < model.library.size() && !found; ++t)
            if (model.library[t].name(model.channel_names) == want || model.library[t].name() == want) {
                config.parameter.term = static_cast<Eigen::Index>(t);
                found = true;
            }
        if (!found) throw InvalidArgument("scan: no library term named '" + want + "'");
    } else {
        config.parameter.term = s["term"].get<Eigen::Index>();
    }
    config.grid = scan_grid(s["grid"]);
    config.horizon = s["horizon"];
    config.step = s["step"];
    config.ensemble = s["ensemble"];
    config.perturbation = s["perturbation"];
    config.seed = s["seed"];
    config.bracket_width = s["bracket_width"];
    if (!s["escape_radius"].is_null()) config.escape_radius = s["escape_radius"].get<double>();
    const BifurcationReport rep = scan_bifurcation(model, config);
    json doc = to_json(rep);
    doc["kind"] = "bifurcation";
    write_json(ctx.artifact("bifurcation.json"), doc);
    std::string csv = "value,outcome,escaped,mean_lifetime\n";
    for (const auto& p : rep.points)
        csv += format_double(p.value) + "," + to_string(p.outcome) + "," + std::to_string(p.escaped) + "," +
               format_double(p.mean_lifetime) + "\n";
    write_text(ctx.artifact("scan.csv"), csv);
    ctx.library = library_to_json(model.library);
    ctx.diagnostics = {{"transition_found", rep.transition_found}, {"message", rep.message}};
}

std::string summarize(const json& doc) {
    std::ostringstream os;
    const std::string kind = doc.value("kind", std::string("unknown"));
    os << "kind: " << kind << "\n";
    if (doc.contains("equations"))
        for (const auto& e : doc["equations"]) os << "  " << e.get<std::string>() << "\n";
    if (doc.contains("edges") && doc["edges"].is_array()) {
        os << "edges: " << doc["edges"].size() << "\n";
        for (const auto& e : doc["edges"]) os << "  " << e["i"] << " - " << e["j"] << "  weight " << e["weight"] << "\n";
    }
    if (kind == "bifurcation") {
        os << "parameter: " << doc.value("parameter_name", std::string()) << "\n";
        if (doc["critical_value"].is_null()) os << doc.value("message", std::string("no transition")) << "\n";
        else os << "critical value: " << doc["critical_value"].get<double>() << "\n";
    }
    if (doc.contains("diagnostics") && doc["diagnostics"].is_object()) {
        const auto& d = doc["diagnostics"];
        if (d.contains("not_sparse") && d["not_sparse"].get<bool>()) os << "WARNING: expansion is not sparse\n";
        if (d.contains("warnings"))
            for (const auto& w : d["warnings"]) os << "warning: " << w.get<std::string>() << "\n";
    }
    if (doc.contains("warnings") && doc["warnings"].is_array())
        for (const auto& w : doc["warnings"]) os << "warning: " << w.get<std::string>() << "\n";
    return os.str();
}

void do_report(Context& ctx) {
    const json doc = read_json(ctx.input());
    if (!doc.is_object()) throw ParseError("report: input is not a JSON object");
    const std::string text = summarize(doc);
    std::cout << text;
    write_text(ctx.artifact("summary.txt"), text);
    if (doc.contains("library")) ctx.library = doc["library"];
    if (doc.contains("diagnostics")) ctx.diagnostics = doc["diagnostics"];
}

void remove_artifacts(const std::vector<std::filesystem::path>& files, const std::filesystem::path& out, bool created) {
    std::error_code ec;
    for (const auto& f : files) std::filesystem::remove(f, ec);
    std::filesystem::remove(out / "manifest.json", ec);
    if (created && std::filesystem::is_empty(out, ec)) std::filesystem::remove(out, ec);
}

}  // namespace

RunResult run(const RunConfig& rc) {
    RunResult result;
    const auto start = std::chrono::steady_clock::now();
    const bool existed = std::filesystem::exists(rc.out);
    std::vector<std::filesystem::path> written;
    try {
        const json resolved = resolve_config(rc);
        Context ctx{resolved, rc.out, {}};
        std::filesystem::create_directories(rc.out);
        try {
            const std::string& c = rc.command;
            if (c == "simulate") do_simulate(ctx);
            else if (c == "discover-ode" || c == "discover-map" || c == "discover-tv") do_discover(ctx, c);
            else if (c == "discover-network") do_network(ctx);
            else if (c == "discover-game") do_game(ctx);
            else if (c == "discover-pde") do_pde(ctx);
            else if (c == "scan-bifurcation") do_scan(ctx);
            else do_report(ctx);
        } catch (...) {
            written = ctx.artifacts;
            throw;
        }
        char hash[17];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(resolved)));
        json names = json::array();
        for (const auto& a : ctx.artifacts) names.push_back(a.filename().string());
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.manifest = {{"command", rc.command}, {"config", resolved},       {"config_hash", hash},
                           {"seed", resolved["seed"]}, {"library", ctx.library}, {"diagnostics", ctx.diagnostics},
                           {"artifacts", names},     {"exit_code", ctx.code},  {"wall_time_seconds", wall}};
        ctx.artifacts.push_back(rc.out / "manifest.json");
        written = ctx.artifacts;
        write_json(rc.out / "manifest.json", result.manifest);
        result.artifacts = ctx.artifacts;
        result.exit_code = ctx.code;
        result.message = ctx.code == exit_not_sparse      ? "completed: expansion is not sparse"
                         : ctx.code == exit_not_converged ? "completed: solver did not converge"
                                                          : "completed";
        return result;
    } catch (const ParseError& e) {
        result.exit_code = exit_parse_error;
        result.message = std::string("parse error: ") + e.what();
    } catch (const DivergenceError& e) {
        result.exit_code = exit_diverged;
        result.message = std::string("diverged: ") + e.what();
    } catch (const InvalidArgument& e) {
        result.exit_code = exit_invalid;
        result.message = std::string("invalid input: ") + e.what();
    } catch (const PartialObservation& e) {
        result.exit_code = exit_invalid;
        result.message = std::string("invalid input: ") + e.what();
    } catch (const InfeasibleProblem& e) {
        result.exit_code = exit_invalid;
        result.message = std::string("infeasible: ") + e.what();
    } catch (const std::exception& e) {
        result.exit_code = exit_failure;
        result.message = std::string("error: ") + e.what();
    }
    remove_artifacts(written, rc.out, !existed);
    return result;
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Sparse identification of dynamical systems, networks and PDEs from data"};
    app.require_subcommand(1);
    RunConfig rc;
    std::string config_path;
    std::string input, out = "out";
    std::uint64_t seed = 0;
    std::string solver, scheme;
    double lambda = 0.0, threshold = 0.0;
    int order = 0, time_order = 0;
    std::vector<CLI::App*> subs;
    for (const auto& name : cli_commands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--input", input, "input data file");
        sub->add_option("--out", out, "output directory");
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--solver", solver, "sparse solver")->check(CLI::IsMember({"lasso", "omp", "stls"}));
        sub->add_option("--lambda", lambda, "LASSO weight");
        sub->add_option("--threshold", threshold, "coefficient threshold");
        sub->add_option("--order", order, "polynomial order q")->check(CLI::NonNegativeNumber);
        sub->add_option("--time-order", time_order, "time order v")->check(CLI::NonNegativeNumber);
        sub->add_option("--scheme", scheme, "derivative scheme")
            ->check(CLI::IsMember({"backward", "central", "five_point", "five-point"}));
        subs.push_back(sub);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return exit_usage;
    }
    CLI::App* used = nullptr;
    for (auto* s : subs)
        if (s->parsed()) used = s;
    rc.command = used->get_name();
    auto given = [&](const char* flag) { return used->count(flag) > 0; };
    if (given("--config")) {
        try {
            rc.config = read_json(config_path);
        } catch (const ParseError& e) {
            std::cerr << "parse error: " << e.what() << "\n";
            return exit_parse_error;
        }
        if (!rc.config.is_object()) {
            std::cerr << "parse error: config must be a JSON object\n";
            return exit_parse_error;
        }
    }
    if (given("--input")) rc.input = input;
    rc.out = out;
    if (given("--seed")) rc.seed = seed;
    if (given("--solver")) rc.solver = solver;
    if (given("--lambda")) rc.lambda = lambda;
    if (given("--threshold")) rc.threshold = threshold;
    if (given("--order")) rc.order = order;
    if (given("--time-order")) rc.time_order = time_order;
    if (given("--scheme")) rc.scheme = scheme;
    const RunResult r = run(rc);
    (r.exit_code == exit_ok ? std::cout : std::cerr) << r.message << "\n";
    return r.exit_code;
}

}  // namespace sparsid
