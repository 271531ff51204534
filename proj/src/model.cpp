#include "sparsid/model.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "sparsid/error.hpp"

namespace sparsid {

std::string to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::ode: return "ode";
    case ModelKind::map: return "map";
    case ModelKind::time_varying_ode: return "time_varying_ode";
    }
    return "ode";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "ode") return ModelKind::ode;
    if (s == "map") return ModelKind::map;
    if (s == "time_varying_ode") return ModelKind::time_varying_ode;
    throw ParseError("unknown model kind '" + s + "'");
}

std::vector<Eigen::Index> RecoveredModel::support(int row) const {
    std::vector<Eigen::Index> s;
    for (Eigen::Index j = 0; j < coefficients.cols(); ++j)
        if (coefficients(row, j) != 0.0) s.push_back(j);
    return s;
}

Eigen::VectorXd RecoveredModel::evaluate(const Eigen::VectorXd& state, double t) const {
    Eigen::VectorXd g(static_cast<Eigen::Index>(library.size()));
    const std::span<const double> x(state.data(), static_cast<std::size_t>(state.size()));
    for (std::size_t j = 0; j < library.size(); ++j) g[static_cast<Eigen::Index>(j)] = library[j].evaluate(x, t);
    return coefficients * g;
}

std::vector<std::string> RecoveredModel::equations(int precision) const {
    std::vector<std::string> out;
    const auto names = channel_names.empty() ? default_channel_names(dim) : channel_names;
    for (int r = 0; r < dim; ++r) {
        std::ostringstream os;
        os << std::setprecision(precision);
        os << (kind == ModelKind::map ? names[static_cast<std::size_t>(r)] + "' = "
                                      : "d" + names[static_cast<std::size_t>(r)] + "/dt = ");
        bool first = true;
        for (Eigen::Index j : support(r)) {
            const double c = coefficients(r, j);
            if (first) {
                os << c;
            } else {
                os << (c < 0 ? " - " : " + ") << std::abs(c);
            }
            const auto& term = library[static_cast<std::size_t>(j)];
            if (!term.is_constant()) os << "*" << term.name(names);
            first = false;
        }
        if (first) os << "0";
        out.push_back(os.str());
    }
    return out;
}

Eigen::VectorXd advance(const RecoveredModel& model, const Eigen::VectorXd& state, double t, double step) {
    if (model.kind == ModelKind::map) return model.evaluate(state, t);
    const Eigen::VectorXd k1 = model.evaluate(state, t);
    const Eigen::VectorXd k2 = model.evaluate(state + 0.5 * step * k1, t + 0.5 * step);
    const Eigen::VectorXd k3 = model.evaluate(state + 0.5 * step * k2, t + 0.5 * step);
    const Eigen::VectorXd k4 = model.evaluate(state + step * k3, t + step);
    return state + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

TimeSeries simulate_model(const RecoveredModel& model, const Eigen::VectorXd& initial, long steps, double step,
                          const SimulateOptions& opts) {
    if (initial.size() != model.dim) throw InvalidArgument("simulate: initial state has the wrong dimension");
    if (steps < 0) throw InvalidArgument("simulate: negative step count");
    const bool is_map = model.kind == ModelKind::map;
    if (!is_map && !(step > 0.0)) throw InvalidArgument("simulate: step must be positive");
    const double h = is_map ? 1.0 : step;
    if (model.kind == ModelKind::time_varying_ode && opts.cap_extrapolation && model.window) {
        const double limit = model.window->end + model.window->length();
        if (opts.t0 + static_cast<double>(steps) * h > limit * (1.0 + 1e-12))
            throw InvalidArgument("simulate: horizon extrapolates more than one fit-window length past the data");
    }

    Eigen::MatrixXd values(steps + 1, model.dim);
    Eigen::VectorXd x = initial;
    values.row(0) = x.transpose();
    for (long i = 1; i <= steps; ++i) {
        const double t = opts.t0 + static_cast<double>(i - 1) * h;
        x = advance(model, x, t, h);
        if (!x.allFinite())
            throw DivergenceError("simulate: state became non-finite", i, opts.t0 + static_cast<double>(i) * h);
        values.row(i) = x.transpose();
    }
    TimeSeries out = TimeSeries::uniform(std::move(values), h, opts.t0);
    if (!model.channel_names.empty()) out.channel_names = model.channel_names;
    return out;
}

namespace {

nlohmann::json matrix_rows(const Eigen::MatrixXd& m) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
        rows.push_back(row);
    }
    return rows;
}

Eigen::MatrixXd matrix_from_rows(const nlohmann::json& j, Eigen::Index cols) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        const auto row = j[r].get<std::vector<double>>();
        if (static_cast<Eigen::Index>(row.size()) != cols) throw ParseError("model: ragged coefficient rows");
        for (Eigen::Index c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), c) = row[static_cast<std::size_t>(c)];
    }
    return m;
}

}  // namespace

nlohmann::json to_json(const RecoveredModel& model) {
    nlohmann::json j;
    j["kind"] = to_string(model.kind);
    j["dim"] = model.dim;
    j["channel_names"] = model.channel_names;
    j["library"] = library_to_json(model.library);
    j["term_names"] = nlohmann::json::array();
    for (const auto& t : model.library) j["term_names"].push_back(t.name(model.channel_names));
    j["coefficient_rows"] = matrix_rows(model.coefficients);
    j["equations"] = model.equations();
    auto rows = nlohmann::json::array();
    for (const auto& r : model.diagnostics.rows) {
        rows.push_back({{"residual_norm", r.residual_norm},
                        {"sparsity", r.sparsity},
                        {"status", to_string(r.status)},
                        {"iterations", r.iterations},
                        {"lambda", r.lambda}});
    }
    j["diagnostics"] = {{"rows", rows},
                        {"coherence", model.diagnostics.coherence},
                        {"samples", model.diagnostics.samples},
                        {"not_sparse", model.diagnostics.not_sparse},
                        {"warnings", model.diagnostics.warnings}};
    if (model.window) j["window"] = {{"start", model.window->start}, {"end", model.window->end}};
    j["anchor_states"] = matrix_rows(model.anchor_states);
    j["data_scale"] = model.data_scale;
    j["step"] = model.step;
    return j;
}

RecoveredModel model_from_json(const nlohmann::json& j) {
    try {
        RecoveredModel m;
        m.kind = model_kind_from_string(j.at("kind").get<std::string>());
        m.dim = j.at("dim").get<int>();
        m.channel_names = j.value("channel_names", std::vector<std::string>{});
        m.library = library_from_json(j.at("library"));
        m.coefficients = matrix_from_rows(j.at("coefficient_rows"), static_cast<Eigen::Index>(m.library.size()));
        if (m.coefficients.rows() != m.dim) throw ParseError("model: coefficient row count does not match dim");
        if (j.contains("diagnostics")) {
            const auto& d = j.at("diagnostics");
            m.diagnostics.coherence = d.value("coherence", 0.0);
            m.diagnostics.samples = d.value("samples", 0);
            m.diagnostics.not_sparse = d.value("not_sparse", false);
            m.diagnostics.warnings = d.value("warnings", std::vector<std::string>{});
            for (const auto& r : d.value("rows", nlohmann::json::array())) {
                RowDiagnostics rd;
                rd.residual_norm = r.value("residual_norm", 0.0);
                rd.sparsity = r.value("sparsity", 0);
                rd.iterations = r.value("iterations", 0L);
                rd.lambda = r.value("lambda", 0.0);
                const auto st = r.value("status", std::string("converged"));
                for (auto s : {SolveStatus::converged, SolveStatus::iteration_cap, SolveStatus::empty_support,
                               SolveStatus::cycle})
                    if (to_string(s) == st) rd.status = s;
                m.diagnostics.rows.push_back(rd);
            }
        }
        if (j.contains("window")) m.window = FitWindow{j["window"].at("start"), j["window"].at("end")};
        if (j.contains("anchor_states") && !j["anchor_states"].empty())
            m.anchor_states = matrix_from_rows(j["anchor_states"], m.dim);
        m.data_scale = j.value("data_scale", 0.0);
        m.step = j.value("step", 0.0);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model report: ") + e.what());
    }
}

}  // namespace sparsid
