#include "sparsid/ode.hpp"

#include <algorithm>

#include "sparsid/error.hpp"

namespace sparsid {

std::string to_string(MapLibraryKind kind) {
    return kind == MapLibraryKind::fourier ? "fourier" : "polynomial";
}

MapLibraryKind map_library_from_string(const std::string& s) {
    if (s == "polynomial") return MapLibraryKind::polynomial;
    if (s == "fourier") return MapLibraryKind::fourier;
    throw InvalidArgument("unknown map library '" + s + "' (expected polynomial or fourier)");
}

nlohmann::json to_json(const DiscoveryConfig& c) {
    nlohmann::json j{{"order", c.order},
                     {"time_order", c.time_order},
                     {"map_library", to_string(c.map_library)},
                     {"max_harmonic", c.max_harmonic},
                     {"fourier_depth", c.fourier_depth},
                     {"scheme", to_string(c.scheme)},
                     {"smoothing_window", c.smoothing_window},
                     {"solver", to_json(c.solver)},
                     {"normalize", c.normalize},
                     {"max_terms", c.max_terms},
                     {"anchors", c.anchors}};
    j["max_total_degree"] = c.max_total_degree ? nlohmann::json(*c.max_total_degree) : nlohmann::json();
    j["expected_dim"] = c.expected_dim ? nlohmann::json(*c.expected_dim) : nlohmann::json();
    j["window_length"] = c.window_length ? nlohmann::json(*c.window_length) : nlohmann::json();
    return j;
}

DiscoveryConfig discovery_config_from_json(const nlohmann::json& j, DiscoveryConfig c) {
    try {
        c.order = j.value("order", c.order);
        c.time_order = j.value("time_order", c.time_order);
        if (j.contains("map_library")) c.map_library = map_library_from_string(j["map_library"].get<std::string>());
        c.max_harmonic = j.value("max_harmonic", c.max_harmonic);
        c.fourier_depth = j.value("fourier_depth", c.fourier_depth);
        if (j.contains("scheme")) c.scheme = derivative_scheme_from_string(j["scheme"].get<std::string>());
        c.smoothing_window = j.value("smoothing_window", c.smoothing_window);
        if (j.contains("solver")) c.solver = solver_config_from_json(j["solver"], c.solver);
        c.normalize = j.value("normalize", c.normalize);
        c.max_terms = j.value("max_terms", c.max_terms);
        c.anchors = j.value("anchors", c.anchors);
        if (j.contains("max_total_degree") && !j["max_total_degree"].is_null())
            c.max_total_degree = j["max_total_degree"].get<int>();
        if (j.contains("expected_dim") && !j["expected_dim"].is_null()) c.expected_dim = j["expected_dim"].get<int>();
        if (j.contains("window_length") && !j["window_length"].is_null())
            c.window_length = j["window_length"].get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("discovery config: ") + e.what());
    }
    return c;
}

namespace {

void check_observation(const TimeSeries& series, const DiscoveryConfig& config) {
    series.validate();
    if (series.channels() < 1) throw InvalidArgument("discovery: series has no channels");
    if (config.expected_dim && series.channels() != *config.expected_dim)
        throw PartialObservation("discovery: " + std::to_string(series.channels()) + " observed channels but the state has " +
                                 std::to_string(*config.expected_dim) +
                                 " components; every state variable must be measured");
}

LibraryOptions library_options(const DiscoveryConfig& config) {
    LibraryOptions o;
    o.max_terms = config.max_terms;
    o.max_total_degree = config.max_total_degree;
    o.fourier_depth = config.fourier_depth;
    return o;
}

TimeSeries preprocess(const TimeSeries& series, const DiscoveryConfig& config) {
    return config.smoothing_window > 1 ? moving_average(series, config.smoothing_window) : series;
}

}  // namespace

RecoveredModel fit_sparse_model(ModelKind kind, const TermList& library, const Eigen::MatrixXd& states,
                                const Eigen::VectorXd& times, const Eigen::MatrixXd& targets,
                                const DiscoveryConfig& config) {
    if (states.rows() != targets.rows()) throw InvalidArgument("discovery: states and targets have different lengths");
    if (states.rows() < 1) throw InvalidArgument("discovery: no regression rows");

    BasisLibrary lib = evaluate_library(library, states, times, config.normalize);
    const Eigen::Index n = lib.matrix.cols();
    const int dim = static_cast<int>(targets.cols());

    RecoveredModel model;
    model.kind = kind;
    model.dim = dim;
    model.library = library;
    model.coefficients = Eigen::MatrixXd::Zero(dim, n);
    model.diagnostics.samples = states.rows();
    model.diagnostics.coherence = mutual_coherence(lib.matrix);
    for (auto z : lib.zero_columns)
        model.diagnostics.warnings.push_back("library column '" + library[static_cast<std::size_t>(z)].name() +
                                             "' is identically zero");

    for (int r = 0; r < dim; ++r) {
        const SparseSolution s = solve_normalized(lib.matrix, lib.column_norms, targets.col(r), config.solver);
        model.coefficients.row(r) = s.coefficients.transpose();
        model.diagnostics.rows.push_back({s.residual_norm, s.sparsity, s.status, s.iterations, s.lambda});
        if (2 * s.sparsity > states.rows()) model.diagnostics.not_sparse = true;
        if (!s.converged)
            model.diagnostics.warnings.push_back("row " + std::to_string(r) + ": solver ended with status " +
                                                 to_string(s.status));
    }
    if (model.diagnostics.not_sparse)
        model.diagnostics.warnings.push_back("support exceeds half the number of samples: the expansion is not sparse");

    model.data_scale = states.rowwise().norm().maxCoeff();
    const Eigen::Index anchors = std::min<Eigen::Index>(std::max(config.anchors, 1), states.rows());
    model.anchor_states.resize(anchors, states.cols());
    for (Eigen::Index a = 0; a < anchors; ++a) model.anchor_states.row(a) = states.row(a * states.rows() / anchors);
    return model;
}

RecoveredModel discover_ode(const TimeSeries& raw, const DiscoveryConfig& config) {
    check_observation(raw, config);
    const TimeSeries series = preprocess(raw, config);
    const DerivativeEstimate d = estimate_derivatives(series, config.scheme);
    const Eigen::MatrixXd states = aligned_states(series, d);
    const TermList library =
        build_polynomial_library(static_cast<int>(series.channels()), config.order, library_options(config));
    RecoveredModel model = fit_sparse_model(ModelKind::ode, library, states, d.times, d.rates, config);
    model.channel_names = series.channel_names;
    model.step = series.dt.value_or(0.0);
    return model;
}

RecoveredModel discover_map(const TimeSeries& series, const DiscoveryConfig& config) {
    check_observation(series, config);
    const DerivativeEstimate d = map_increments(series);
    const Eigen::MatrixXd states = aligned_states(series, d);
    const int m = static_cast<int>(series.channels());
    const TermList library = config.map_library == MapLibraryKind::fourier
                                 ? build_linear_fourier_library(m, config.max_harmonic, library_options(config))
                                 : build_polynomial_library(m, config.order, library_options(config));
    RecoveredModel model = fit_sparse_model(ModelKind::map, library, states, d.times, d.rates, config);
    model.channel_names = series.channel_names;
    return model;
}

RecoveredModel discover_time_varying(const TimeSeries& raw, const DiscoveryConfig& config) {
    check_observation(raw, config);
    TimeSeries series = preprocess(raw, config);
    if (config.window_length) {
        if (!(*config.window_length > 0.0)) throw InvalidArgument("time-varying discovery: window must be positive");
        const double end = series.times[series.samples() - 1];
        Eigen::Index first = 0;
        while (first < series.samples() && series.times[first] < end - *config.window_length * (1.0 + 1e-12)) ++first;
        series = series.slice(first, series.samples() - first);
    }
    const DerivativeEstimate d = estimate_derivatives(series, config.scheme);
    const Eigen::MatrixXd states = aligned_states(series, d);
    const TermList library = build_time_augmented_library(static_cast<int>(series.channels()), config.order,
                                                          config.time_order, library_options(config));
    RecoveredModel model = fit_sparse_model(ModelKind::time_varying_ode, library, states, d.times, d.rates, config);
    model.channel_names = series.channel_names;
    model.step = series.dt.value_or(0.0);
    model.window = FitWindow{series.times[0], series.times[series.samples() - 1]};
    return model;
}

}  // namespace sparsid
