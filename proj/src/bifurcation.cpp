#include "sparsid/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sparsid/error.hpp"

namespace sparsid {

std::string to_string(Outcome o) {
    switch (o) {
    case Outcome::sustained: return "sustained";
    case Outcome::transient_escape: return "transient_escape";
    case Outcome::fixed_point: return "fixed_point";
    }
    return "sustained";
}

namespace {

bool escapes(Outcome o) { return o == Outcome::transient_escape; }

Eigen::MatrixXd make_ensemble(const RecoveredModel& model, const ScanConfig& config) {
    if (model.anchor_states.rows() == 0) throw InvalidArgument("scan: model carries no fit-data anchor states");
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = config.perturbation * std::max(model.data_scale, 1e-12);
    Eigen::MatrixXd ensemble(config.ensemble, model.dim);
    for (int e = 0; e < config.ensemble; ++e) {
        ensemble.row(e) = model.anchor_states.row(e % model.anchor_states.rows());
        for (int c = 0; c < model.dim; ++c) ensemble(e, c) += scale * normal(rng);
    }
    return ensemble;
}

}  // namespace

GridPoint classify_parameter(const RecoveredModel& base, const ScanConfig& config, double value,
                             const Eigen::MatrixXd& ensemble, double escape_radius) {
    RecoveredModel model = base;
    model.coefficients(config.parameter.row, config.parameter.term) = value;
    const double h = model.kind == ModelKind::map ? 1.0 : config.step;
    const long tail = std::max<long>(1, config.horizon / 10);

    GridPoint p;
    p.value = value;
    double lifetime = 0.0;
    int settled = 0;
    for (Eigen::Index e = 0; e < ensemble.rows(); ++e) {
        Eigen::VectorXd x = ensemble.row(e).transpose();
        Eigen::VectorXd lo = Eigen::VectorXd::Constant(model.dim, std::numeric_limits<double>::infinity());
        Eigen::VectorXd hi = -lo;
        bool escaped = false;
        for (long i = 1; i <= config.horizon; ++i) {
            x = advance(model, x, static_cast<double>(i - 1) * h, h);
            if (!x.allFinite() || x.norm() > escape_radius) {
                escaped = true;
                ++p.escaped;
                lifetime += static_cast<double>(i) * h;
                break;
            }
            if (i > config.horizon - tail) {
                lo = lo.cwiseMin(x);
                hi = hi.cwiseMax(x);
            }
        }
        if (!escaped && (hi - lo).maxCoeff() <= 1e-8 * std::max(1.0, model.data_scale)) ++settled;
    }
    if (2 * p.escaped > ensemble.rows()) {
        p.outcome = Outcome::transient_escape;
    } else if (p.escaped == 0 && settled == ensemble.rows()) {
        p.outcome = Outcome::fixed_point;
    } else {
        p.outcome = Outcome::sustained;
    }
    p.mean_lifetime = p.escaped > 0 ? lifetime / p.escaped : 0.0;
    return p;
}

BifurcationReport scan_bifurcation(const RecoveredModel& model, const ScanConfig& config) {
    if (config.parameter.row < 0 || config.parameter.row >= model.dim || config.parameter.term < 0 ||
        config.parameter.term >= model.coefficients.cols())
        throw InvalidArgument("scan: parameter selector outside the model");
    if (model.coefficients(config.parameter.row, config.parameter.term) == 0.0)
        throw InvalidArgument("scan: selected coefficient is not in the model support");
    if (config.grid.size() < 2) throw InvalidArgument("scan: grid needs at least two values");
    if (!std::is_sorted(config.grid.begin(), config.grid.end())) throw InvalidArgument("scan: grid must be sorted");
    if (config.ensemble < 1 || config.horizon < 1) throw InvalidArgument("scan: ensemble and horizon must be positive");
    if (!(config.bracket_width > 0.0)) throw InvalidArgument("scan: bracket width must be positive");

    const double radius = config.escape_radius.value_or(10.0 * std::max(model.data_scale, 1e-12));
    const Eigen::MatrixXd ensemble = make_ensemble(model, config);

    BifurcationReport report;
    report.seed = config.seed;
    const auto names = model.channel_names.empty() ? default_channel_names(model.dim) : model.channel_names;
    report.parameter_name = "coefficient of " +
                            model.library[static_cast<std::size_t>(config.parameter.term)].name(names) + " in row " +
                            names[static_cast<std::size_t>(config.parameter.row)];
    for (double v : config.grid) report.points.push_back(classify_parameter(model, config, v, ensemble, radius));

    for (std::size_t i = 0; i + 1 < report.points.size(); ++i) {
        const bool a = escapes(report.points[i].outcome);
        const bool b = escapes(report.points[i + 1].outcome);
        if (a == b) continue;
        double lo = report.points[i].value, hi = report.points[i + 1].value;
        while (hi - lo > config.bracket_width) {
            const double mid = 0.5 * (lo + hi);
            const bool m = escapes(classify_parameter(model, config, mid, ensemble, radius).outcome);
            if (m == a) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        report.transition_found = true;
        report.bracket = std::pair{lo, hi};
        report.critical_value = 0.5 * (lo + hi);
        report.message = a ? "escape gives way to sustained motion" : "sustained motion gives way to escape";
        return report;
    }
    report.message = "no transition in range";
    return report;
}

nlohmann::json to_json(const BifurcationReport& r) {
    auto pts = nlohmann::json::array();
    for (const auto& p : r.points) {
        pts.push_back({{"value", p.value},
                       {"outcome", to_string(p.outcome)},
                       {"escaped", p.escaped},
                       {"mean_lifetime", p.mean_lifetime}});
    }
    nlohmann::json j{{"parameter_name", r.parameter_name},
                     {"points", pts},
                     {"transition_found", r.transition_found},
                     {"message", r.message},
                     {"seed", r.seed}};
    j["critical_value"] = r.critical_value ? nlohmann::json(*r.critical_value) : nlohmann::json();
    j["bracket"] = r.bracket ? nlohmann::json::array({r.bracket->first, r.bracket->second}) : nlohmann::json();
    return j;
}

}  // namespace sparsid
