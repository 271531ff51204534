#include "sparsid/timeseries.hpp"

#include <cmath>
#include <limits>

#include "sparsid/error.hpp"

namespace sparsid {

std::vector<std::string> default_channel_names(Eigen::Index m) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) names.push_back("x" + std::to_string(i + 1));
    return names;
}

void TimeSeries::validate() const {
    if (times.size() != values.rows())
        throw InvalidArgument("time series: " + std::to_string(times.size()) + " timestamps for " +
                              std::to_string(values.rows()) + " samples");
    if (!channel_names.empty() && static_cast<Eigen::Index>(channel_names.size()) != values.cols())
        throw InvalidArgument("time series: channel name count does not match channel count");
    if (!values.allFinite()) throw InvalidArgument("time series: non-finite sample values");
    for (Eigen::Index i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1]))
            throw InvalidArgument("time series: timestamps not strictly increasing at index " +
                                  std::to_string(i));
    }
    if (dt) {
        if (!(*dt > 0.0)) throw InvalidArgument("time series: step must be positive");
        for (Eigen::Index i = 1; i < times.size(); ++i) {
            // Spacing tolerance plus the rounding floor of the timestamps themselves.
            const double slack = 1e-9 * *dt + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(times[i]);
            if (std::abs(times[i] - times[i - 1] - *dt) >= slack)
                throw InvalidArgument("time series: sampling is not uniform at index " + std::to_string(i));
        }
    }
}

TimeSeries TimeSeries::uniform(Eigen::MatrixXd values, double dt, double t0) {
    TimeSeries s;
    const Eigen::Index n = values.rows();
    s.times.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) s.times[i] = t0 + static_cast<double>(i) * dt;
    s.channel_names = default_channel_names(values.cols());
    s.values = std::move(values);
    s.dt = dt;
    return s;
}

std::optional<double> TimeSeries::detect_step(const Eigen::VectorXd& times) {
    if (times.size() < 2) return std::nullopt;
    const double h = (times[times.size() - 1] - times[0]) / static_cast<double>(times.size() - 1);
    if (!(h > 0.0)) return std::nullopt;
    for (Eigen::Index i = 1; i < times.size(); ++i) {
        if (std::abs(times[i] - times[i - 1] - h) > 1e-6 * h) return std::nullopt;
    }
    return h;
}

TimeSeries TimeSeries::slice(Eigen::Index first, Eigen::Index count) const {
    if (first < 0 || count < 0 || first + count > samples())
        throw InvalidArgument("time series: slice out of range");
    TimeSeries s;
    s.times = times.segment(first, count);
    s.values = values.middleRows(first, count);
    s.dt = dt;
    s.channel_names = channel_names;
    return s;
}

}  // namespace sparsid
