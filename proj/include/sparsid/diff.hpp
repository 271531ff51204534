#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sparsid/timeseries.hpp"

namespace sparsid {

enum class DerivativeScheme { backward, central, five_point };

std::string to_string(DerivativeScheme scheme);
DerivativeScheme derivative_scheme_from_string(const std::string& s);

/// Regression targets paired with the series rows they belong to. Row r of
/// `rates` is aligned with series row `sample_index[r]` (timestamp
/// `times[r]`); the library must be evaluated at exactly those rows.
struct DerivativeEstimate {
    Eigen::MatrixXd rates;
    std::vector<Eigen::Index> sample_index;
    Eigen::VectorXd times;

    Eigen::Index rows() const { return rates.rows(); }
};

// (x(t_i) - x(t_{i-1})) / dt for i = 1..M. Requires uniform sampling.
DerivativeEstimate backward_difference(const TimeSeries& series);

// (x(t_{i+1}) - x(t_{i-1})) / (t_{i+1} - t_{i-1}) at interior samples.
DerivativeEstimate central_difference(const TimeSeries& series);

// Fourth-order five-point stencil at samples 2..M-2. Requires uniform sampling.
DerivativeEstimate five_point_difference(const TimeSeries& series);

// Map data: the target for row i is the next iterate x(t_{i+1}).
DerivativeEstimate map_increments(const TimeSeries& series);

DerivativeEstimate estimate_derivatives(const TimeSeries& series, DerivativeScheme scheme);

// Centered moving average over an odd window. The output drops
// (window-1)/2 samples at each end, which shifts every later alignment.
TimeSeries moving_average(const TimeSeries& series, int window);

// Series rows referenced by the estimate, in the same order.
Eigen::MatrixXd aligned_states(const TimeSeries& series, const DerivativeEstimate& estimate);

// Throws InvalidArgument unless both timestamp vectors have equal length and
// identical entries.
void check_alignment(const Eigen::VectorXd& library_times, const Eigen::VectorXd& target_times);

}  // namespace sparsid
