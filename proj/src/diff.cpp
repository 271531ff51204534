#include "sparsid/diff.hpp"

#include "sparsid/error.hpp"

namespace sparsid {

std::string to_string(DerivativeScheme scheme) {
    switch (scheme) {
    case DerivativeScheme::backward: return "backward";
    case DerivativeScheme::central: return "central";
    case DerivativeScheme::five_point: return "five_point";
    }
    return "central";
}

DerivativeScheme derivative_scheme_from_string(const std::string& s) {
    if (s == "backward") return DerivativeScheme::backward;
    if (s == "central") return DerivativeScheme::central;
    if (s == "five_point" || s == "five-point") return DerivativeScheme::five_point;
    throw InvalidArgument("unknown derivative scheme '" + s + "'");
}

namespace {

double uniform_step(const TimeSeries& series, const char* who) {
    series.validate();
    auto h = series.dt ? series.dt : TimeSeries::detect_step(series.times);
    if (!h) throw InvalidArgument(std::string(who) + ": sampling is not uniform");
    return *h;
}

DerivativeEstimate make_estimate(const TimeSeries& series, Eigen::Index first, Eigen::Index count) {
    DerivativeEstimate e;
    e.rates.resize(count, series.channels());
    e.times = series.times.segment(first, count);
    e.sample_index.reserve(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < count; ++i) e.sample_index.push_back(first + i);
    return e;
}

}  // namespace

DerivativeEstimate backward_difference(const TimeSeries& series) {
    if (series.samples() < 2) throw InvalidArgument("backward difference: need at least 2 samples");
    const double h = uniform_step(series, "backward difference");
    const Eigen::Index m = series.samples() - 1;
    DerivativeEstimate e = make_estimate(series, 1, m);
    e.rates = (series.values.bottomRows(m) - series.values.topRows(m)) / h;
    return e;
}

DerivativeEstimate central_difference(const TimeSeries& series) {
    if (series.samples() < 3) throw InvalidArgument("central difference: need at least 3 samples");
    series.validate();
    const Eigen::Index m = series.samples() - 2;
    DerivativeEstimate e = make_estimate(series, 1, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double span = series.times[i + 2] - series.times[i];
        e.rates.row(i) = (series.values.row(i + 2) - series.values.row(i)) / span;
    }
    return e;
}

DerivativeEstimate five_point_difference(const TimeSeries& series) {
    if (series.samples() < 5) throw InvalidArgument("five-point difference: need at least 5 samples");
    const double h = uniform_step(series, "five-point difference");
    const Eigen::Index m = series.samples() - 4;
    DerivativeEstimate e = make_estimate(series, 2, m);
    const auto& v = series.values;
    e.rates = (v.middleRows(0, m) - 8.0 * v.middleRows(1, m) + 8.0 * v.middleRows(3, m) - v.middleRows(4, m)) /
              (12.0 * h);
    return e;
}

DerivativeEstimate map_increments(const TimeSeries& series) {
    if (series.samples() < 2) throw InvalidArgument("map increments: need at least 2 iterates");
    series.validate();
    const Eigen::Index m = series.samples() - 1;
    DerivativeEstimate e = make_estimate(series, 0, m);
    e.rates = series.values.bottomRows(m);
    return e;
}

DerivativeEstimate estimate_derivatives(const TimeSeries& series, DerivativeScheme scheme) {
    switch (scheme) {
    case DerivativeScheme::backward: return backward_difference(series);
    case DerivativeScheme::central: return central_difference(series);
    case DerivativeScheme::five_point: return five_point_difference(series);
    }
    return central_difference(series);
}

TimeSeries moving_average(const TimeSeries& series, int window) {
    if (window < 1 || window % 2 == 0) throw InvalidArgument("moving average: window must be a positive odd number");
    if (series.samples() < window) throw InvalidArgument("moving average: window longer than the series");
    const Eigen::Index half = window / 2;
    const Eigen::Index n = series.samples() - 2 * half;
    TimeSeries out;
    out.values = Eigen::MatrixXd::Zero(n, series.channels());
    for (Eigen::Index k = 0; k < window; ++k) out.values += series.values.middleRows(k, n);
    out.values /= static_cast<double>(window);
    out.times = series.times.segment(half, n);
    out.dt = series.dt;
    out.channel_names = series.channel_names;
    return out;
}

Eigen::MatrixXd aligned_states(const TimeSeries& series, const DerivativeEstimate& estimate) {
    Eigen::MatrixXd states(estimate.rows(), series.channels());
    for (Eigen::Index r = 0; r < estimate.rows(); ++r) {
        const Eigen::Index i = estimate.sample_index[static_cast<std::size_t>(r)];
        if (i < 0 || i >= series.samples()) throw InvalidArgument("alignment: sample index out of range");
        states.row(r) = series.values.row(i);
    }
    check_alignment(series.times(estimate.sample_index), estimate.times);
    return states;
}

void check_alignment(const Eigen::VectorXd& library_times, const Eigen::VectorXd& target_times) {
    if (library_times.size() != target_times.size())
        throw InvalidArgument("alignment: " + std::to_string(library_times.size()) + " library rows vs " +
                              std::to_string(target_times.size()) + " target rows");
    if (library_times != target_times) throw InvalidArgument("alignment: library and target timestamps differ");
}

}  // namespace sparsid
