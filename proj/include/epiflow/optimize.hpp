#pragma once

#include <functional>
#include <vector>

namespace epiflow {

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Box-constrained Nelder-Mead simplex. Candidate points are projected onto
/// [lo, hi] before evaluation. Stops when the simplex function spread falls
/// below ftol or max_iters is reached.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const std::vector<double>& step,
                             const std::vector<double>& lo, const std::vector<double>& hi,
                             int max_iters = 400, double ftol = 1e-12);

}  // namespace epiflow
