#include "epiflow/rt.hpp"

#include <cmath>

#include "epiflow/gammafn.hpp"

namespace epiflow {

SerialInterval discretize_serial_interval(double mean, double sd, int max_lag) {
    if (!(mean > 0.0) || !(sd > 0.0) || max_lag < 1)
        throw ValidationError("serial interval requires mean > 0, sd > 0, max_lag >= 1");
    SerialInterval si;
    si.mean = mean;
    si.sd = sd;
    si.max_lag = max_lag;
    si.shape = (mean / sd) * (mean / sd);
    si.scale = sd * sd / mean;
    const double rate = 1.0 / si.scale;
    si.weights.resize(max_lag);
    double total = 0.0;
    double prev = 0.0;  // F(0) = 0
    for (int s = 1; s <= max_lag; ++s) {
        const double cur = gammafn::gamma_cdf(static_cast<double>(s), si.shape, rate);
        si.weights[s - 1] = cur - prev;
        total += si.weights[s - 1];
        prev = cur;
    }
    if (!(total > 0.0)) throw ValidationError("serial interval weights sum to zero");
    for (double& w : si.weights) w /= total;
    return si;
}

double renewal_intensity(std::span<const double> incidence, const SerialInterval& si, int day_u) {
    double lam = 0.0;
    for (int s = 1; s <= si.max_lag; ++s) {
        const int v = day_u - s;
        if (v < 0) break;  // Q'_{u-s} = 0 before the series start
        if (v < static_cast<int>(incidence.size()))
            lam += incidence[v] * si.weights[s - 1];
    }
    return lam;
}

RtSeries estimate_rt(std::span<const double> incidence, const SerialInterval& si, int window,
                     double prior_shape, double prior_rate, double eps) {
    if (window < 1) throw ValidationError("estimate_rt: window must be >= 1");
    const int len = static_cast<int>(incidence.size());
    if (len < window)
        throw ValidationError("estimate_rt: incidence series shorter than the window");
    const bool improper = prior_shape == 0.0 && prior_rate == 0.0;

    RtSeries out;
    out.window = window;
    out.prior_shape = prior_shape;
    out.prior_rate = prior_rate;
    out.first_day = window;

    std::vector<double> lambda(len);
    for (int u = 0; u < len; ++u) lambda[u] = renewal_intensity(incidence, si, u);

    // Inclusive end: the estimate at t = len is the decision-time nowcast
    // from the window [len-W, len-1].
    for (int t = window; t <= len; ++t) {
        double q_sum = 0.0, lam_sum = 0.0;
        for (int u = t - window; u <= t - 1; ++u) {
            q_sum += incidence[u];
            lam_sum += lambda[u];
        }
        const double shape = prior_shape + q_sum;
        const double rate = prior_rate + std::max(lam_sum, eps);
        if (improper && !(shape > 0.0))
            throw ValidationError("estimate_rt: improper prior requires positive case counts");
        out.mean.push_back(shape / rate);
        out.lower.push_back(gammafn::gamma_quantile(0.025, shape, rate));
        out.upper.push_back(gammafn::gamma_quantile(0.975, shape, rate));
    }
    return out;
}

std::vector<double> incidence_from_cumulative(std::span<const double> cumulative,
                                              int* clamped_count) {
    std::vector<double> inc;
    int clamped = 0;
    for (std::size_t t = 1; t < cumulative.size(); ++t) {
        double d = cumulative[t] - cumulative[t - 1];
        if (d < 0.0) {
            d = 0.0;
            ++clamped;
        }
        inc.push_back(d);
    }
    if (clamped_count) *clamped_count = clamped;
    return inc;
}

}  // namespace epiflow
