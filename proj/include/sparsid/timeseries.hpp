#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sparsid {

// Uniformly (or explicitly) sampled multivariate trajectory. Row i of
// `values` is the state at `times[i]`.
struct TimeSeries {
    Eigen::VectorXd times;
    Eigen::MatrixXd values;
    std::optional<double> dt;
    std::vector<std::string> channel_names;

    Eigen::Index samples() const { return values.rows(); }
    Eigen::Index channels() const { return values.cols(); }

    // Throws InvalidArgument when the invariants do not hold: times strictly
    // increasing, dt consistent with the spacing, finite values, one name
    // per channel.
    void validate() const;

    // Builds a series on t0, t0+dt, ... with default channel names x1..xm.
    static TimeSeries uniform(Eigen::MatrixXd values, double dt, double t0 = 0.0);

    // Detects a uniform step from the timestamps (relative tolerance 1e-6).
    static std::optional<double> detect_step(const Eigen::VectorXd& times);

    // Contiguous sub-range [first, first + count).
    TimeSeries slice(Eigen::Index first, Eigen::Index count) const;
};

std::vector<std::string> default_channel_names(Eigen::Index m);

}  // namespace sparsid
