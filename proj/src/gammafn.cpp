#include "epiflow/gammafn.hpp"

#include <cmath>
#include <limits>

#include "epiflow/errors.hpp"

namespace epiflow::gammafn {

namespace {

// P(a,x) by its power series; converges fast for x < a+1.
double lower_series(double a, double x) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < 10000000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a,x) by modified Lentz continued fraction; for x >= a+1.
double upper_cf(double a, double x) {
    const double fpmin = std::numeric_limits<double>::min() / 1e-16;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000000; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16)
            break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double reg_lower(double a, double x) {
    if (!(a > 0.0) || x < 0.0 || !std::isfinite(a) || !std::isfinite(x))
        throw Error("reg_lower: requires a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return lower_series(a, x);
    return 1.0 - upper_cf(a, x);
}

double reg_upper(double a, double x) {
    if (!(a > 0.0) || x < 0.0 || !std::isfinite(a) || !std::isfinite(x))
        throw Error("reg_upper: requires a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - lower_series(a, x);
    return upper_cf(a, x);
}

double gamma_cdf(double x, double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw Error("gamma_cdf: shape and rate must be positive");
    if (x <= 0.0) return 0.0;
    return reg_lower(shape, rate * x);
}

double gamma_quantile(double p, double shape, double rate) {
    if (!(p > 0.0) || !(p < 1.0))
        throw Error("gamma_quantile: p must be inside (0, 1)");
    if (!(shape > 0.0) || !(rate > 0.0))
        throw Error("gamma_quantile: shape and rate must be positive");

    // Bracket the root, then bisect. Upper bound grows from mean + 10 sd.
    double lo = 0.0;
    double hi = (shape + 10.0 * std::sqrt(shape)) / rate;
    while (gamma_cdf(hi, shape, rate) < p) {
        hi *= 2.0;
        if (!std::isfinite(hi))
            throw Error("gamma_quantile: failed to bracket quantile");
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (gamma_cdf(mid, shape, rate) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-10 * std::max(1.0, hi))
            break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace epiflow::gammafn
