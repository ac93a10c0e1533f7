#pragma once

// Independent regularized lower incomplete gamma via pure series expansion
// (no continued fraction) plus quantile bisection on that CDF. Slow but
// simple; used only as a test oracle against the production implementation.

#include <cmath>

namespace gamma_oracle {

inline double reg_lower_series(double a, double x) {
    if (x <= 0.0) return 0.0;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 5000000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double cdf(double x, double shape, double rate) {
    return reg_lower_series(shape, rate * x);
}

inline double quantile(double p, double shape, double rate) {
    double lo = 0.0, hi = (shape + 10.0 * std::sqrt(shape)) / rate;
    while (cdf(hi, shape, rate) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid, shape, rate) < p ? lo : hi) = mid;
        if (hi - lo < 1e-12 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace gamma_oracle
