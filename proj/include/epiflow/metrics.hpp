#pragma once

#include <span>
#include <vector>

#include "epiflow/dynamics.hpp"

namespace epiflow {

/// Daily incidence rate (Q_{t+1} - Q_t) / N_t, clamped at zero when the
/// quarantined compartment shrinks. Throws on the terminal day.
double incidence_rate(const Trajectory& traj, int region, int day);

/// Daily death rate (D_{t+1} - D_t) / N_t. Throws on the terminal day.
double death_rate(const Trajectory& traj, int region, int day);

/// Active case rate Q_t / N_t.
double active_case_rate(const Trajectory& traj, int region, int day);

struct RateSeries {
    std::vector<double> ir, dr;  // defined for days [0, T-1)
    std::vector<double> acr;     // defined for days [0, T]
    double ir_mean = 0, dr_mean = 0, acr_mean = 0;
};

RateSeries rate_series(const Trajectory& traj, int region);

/// Per-region relative improvements against ground truth with their
/// nonnegative clamps (the equity inputs).
struct ImprovementVector {
    std::vector<double> delta;    // (G - A) / max(|G|, eps)
    std::vector<double> clamped;  // max(delta, 0)
};

ImprovementVector improvements(std::span<const double> ground_truth,
                               std::span<const double> agent, double eps = kDefaultEpsilon);

struct EquityResult {
    double gini = 0.0;
    double equity = 0.0;  // 1 - gini
    bool defined = false; // false when every improvement is zero
};

/// Gini-based equity over nonnegative improvements:
/// G = sum_r (2r - N - 1) x_(r) / (N sum x), E = 1 - G on sorted values.
EquityResult equity_coefficient(std::span<const double> clamped_improvements);

/// Recursive 180-day-style extrapolation: the mean of the last 14 increments
/// is added once per horizon day. Returns the input extended by `horizon`.
std::vector<double> forecast_cumulative(std::span<const double> series, int horizon = 180);

}  // namespace epiflow
