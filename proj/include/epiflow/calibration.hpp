#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "epiflow/types.hpp"

namespace epiflow {

/// Cleaned per-region observation series, day-indexed from `start`.
/// Cumulative columns are nondecreasing and active >= 0 after cleaning.
struct ObservedSeries {
    Date start;
    std::vector<std::string> region_codes;
    std::vector<std::vector<double>> confirmed;  // cumulative
    std::vector<std::vector<double>> deaths;     // cumulative
    std::vector<std::vector<double>> recovered;  // cumulative
    std::vector<std::vector<double>> active;     // confirmed - recovered - deaths

    int repairs = 0;       // monotonicity fixes applied by the loader
    int filled_days = 0;   // missing days forward-filled

    int days() const { return confirmed.empty() ? 0 : static_cast<int>(confirmed[0].size()); }
    int num_regions() const { return static_cast<int>(region_codes.size()); }
};

struct ParamBounds {
    double beta_lo = 0.0, beta_hi = 2.0;
    double ratio_lo = 1e-3, ratio_hi = 1.0 - 1e-3;  // beta_Q = ratio * beta_I
    double sigma_lo = 1.0 / 14.0, sigma_hi = 0.5;
    double delta_lo = 0.0, delta_hi = 1.0;
    double gamma_lo = 1.0 / 30.0, gamma_hi = 1.0 / 3.0;
    double mu_lo = 0.0, mu_hi = 0.05;
};

struct CalibrationOptions {
    ParamBounds bounds;
    double death_weight = 10.0;        // scale balancing for the deaths term
    double exposed_seed_factor = 2.0;  // E(0) = factor * initial active cases
    double infected_seed_factor = 1.0; // I(0) = factor * initial active cases
    std::vector<double> populations;   // census population per region
    int restarts = 3;
    int max_iters = 1500;
    int sweeps = 5;                    // Jacobi block-coordinate passes over regions
    std::uint64_t seed = 0;
};

struct CalibrationWindow {
    Date start;
    Date end;  // exclusive

    int days() const { return static_cast<int>(end - start); }
};

struct CalibrationResult {
    std::vector<CalibrationWindow> windows;
    std::vector<std::string> region_codes;
    // params[w][r] = fitted set for window w, region r
    std::vector<std::vector<ParamSet>> params;
    std::vector<std::vector<bool>> degenerate;  // no-signal windows
    bool converged = true;

    /// Piecewise-constant schedule for one region across all windows.
    ParamSchedule schedule_for(int region) const;
};

/// Sum of squared errors between simulated and observed daily increments of
/// confirmed (delta cumulative Q) and deaths, deaths weighted by
/// death_weight. Zero iff the increments match exactly.
double calibration_loss(const std::vector<ParamSet>& params, const ObservedSeries& observed,
                        const MobilitySchedule& flows, const CalibrationWindow& window,
                        const CalibrationOptions& options);

/// Fit piecewise-constant parameters per window. Within a window, regions are
/// fitted by seeded Nelder-Mead restarts in Jacobi sweeps (each region
/// against the others' previous-sweep values). beta_Q is parameterized as
/// ratio * beta_I, so fitted beta_Q < beta_I always.
CalibrationResult calibrate(const ObservedSeries& observed, const MobilitySchedule& flows,
                            const std::vector<CalibrationWindow>& windows,
                            const CalibrationOptions& options);

/// Fitted-parameter CSV: region,window_start,window_end,beta_I,beta_Q,sigma,
/// delta,gamma,mu. Reloadable via load_params_csv.
void write_params_csv(const CalibrationResult& result, const std::string& path);
CalibrationResult load_params_csv(const std::string& path);

}  // namespace epiflow
