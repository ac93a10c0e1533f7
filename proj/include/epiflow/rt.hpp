#pragma once

#include <span>
#include <vector>

#include "epiflow/types.hpp"

namespace epiflow {

/// Daily-discretized Gamma serial interval. Defaults (mean 5, sd 2) give
/// shape 6.25 and scale 0.8.
struct SerialInterval {
    double mean = 5.0;
    double sd = 2.0;
    int max_lag = 20;
    double shape = 0.0;
    double scale = 0.0;
    std::vector<double> weights;  // w_1..w_S, normalized to sum 1
};

SerialInterval discretize_serial_interval(double mean = 5.0, double sd = 2.0, int max_lag = 20);

/// Renewal intensity Lambda_u = sum_s incidence[u-s] * w_s (zero before the
/// series start).
double renewal_intensity(std::span<const double> incidence, const SerialInterval& si, int day_u);

/// Posterior summaries for t in [window, len]. Day t of the input series maps
/// to index t - first_day; the final entry is the nowcast one step past the
/// series end.
struct RtSeries {
    int window = 21;
    double prior_shape = 1.0;
    double prior_rate = 1.0;
    int first_day = 0;
    std::vector<double> mean, lower, upper;

    int size() const { return static_cast<int>(mean.size()); }
};

/// Sliding-window conjugate Gamma posterior over the renewal model:
/// R_t | data ~ Gamma(a + sum Q', b + max(sum Lambda, eps)) aggregated over
/// u in [t-W, t-1]. Interval bounds are the 2.5%/97.5% posterior quantiles.
/// prior_shape = prior_rate = 0 selects the guarded improper-prior mode where
/// the mean is exactly Q'_sum / Lambda_sum (requires positive sums).
RtSeries estimate_rt(std::span<const double> incidence, const SerialInterval& si, int window = 21,
                     double prior_shape = 1.0, double prior_rate = 1.0,
                     double eps = kDefaultEpsilon);

/// Daily new-confirmed increments from a cumulative series; negative dips are
/// clamped to zero and counted.
std::vector<double> incidence_from_cumulative(std::span<const double> cumulative,
                                              int* clamped_count = nullptr);

}  // namespace epiflow
