#include "epiflow/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace epiflow {

namespace {

void check_rate_day(const Trajectory& traj, int region, int day, bool needs_next) {
    const int last = traj.sim_days();
    if (region < 0 || region >= static_cast<int>(traj.days[0].size()))
        throw ValidationError("rate: region index out of range");
    if (day < 0 || day > last || (needs_next && day >= last))
        throw ValidationError("rate undefined for day " + std::to_string(day) +
                              (needs_next ? " (needs day+1 in trajectory)" : ""));
}

}  // namespace

double incidence_rate(const Trajectory& traj, int region, int day) {
    check_rate_day(traj, region, day, true);
    const double n = traj.state(day, region).living();
    const double dq = traj.state(day + 1, region).Q - traj.state(day, region).Q;
    return std::max(dq, 0.0) / n;
}

double death_rate(const Trajectory& traj, int region, int day) {
    check_rate_day(traj, region, day, true);
    const double n = traj.state(day, region).living();
    return (traj.state(day + 1, region).D - traj.state(day, region).D) / n;
}

double active_case_rate(const Trajectory& traj, int region, int day) {
    check_rate_day(traj, region, day, false);
    return traj.state(day, region).Q / traj.state(day, region).living();
}

RateSeries rate_series(const Trajectory& traj, int region) {
    RateSeries out;
    const int T = traj.sim_days();
    for (int t = 0; t < T; ++t) {
        out.ir.push_back(incidence_rate(traj, region, t));
        out.dr.push_back(death_rate(traj, region, t));
    }
    for (int t = 0; t <= T; ++t) out.acr.push_back(active_case_rate(traj, region, t));

    auto mean = [](const std::vector<double>& v) {
        if (v.empty()) return 0.0;
        double s = 0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    out.ir_mean = mean(out.ir);
    out.dr_mean = mean(out.dr);
    out.acr_mean = mean(out.acr);
    return out;
}

ImprovementVector improvements(std::span<const double> ground_truth, std::span<const double> agent,
                               double eps) {
    if (ground_truth.size() != agent.size())
        throw ValidationError("improvements: mismatched region counts");
    ImprovementVector out;
    for (std::size_t i = 0; i < ground_truth.size(); ++i) {
        const double d = (ground_truth[i] - agent[i]) / std::max(std::fabs(ground_truth[i]), eps);
        out.delta.push_back(d);
        out.clamped.push_back(std::max(d, 0.0));
    }
    return out;
}

EquityResult equity_coefficient(std::span<const double> clamped_improvements) {
    EquityResult res;
    const int n = static_cast<int>(clamped_improvements.size());
    if (n == 0) return res;
    for (double v : clamped_improvements)
        if (v < 0.0) throw ValidationError("equity: improvements must be clamped nonnegative");

    std::vector<double> x(clamped_improvements.begin(), clamped_improvements.end());
    std::sort(x.begin(), x.end());
    double total = 0.0, weighted = 0.0;
    for (int r = 1; r <= n; ++r) {
        total += x[r - 1];
        weighted += (2.0 * r - n - 1.0) * x[r - 1];
    }
    if (!(total > 0.0)) return res;  // all-zero vector: equity undefined

    res.gini = weighted / (n * total);
    res.equity = 1.0 - res.gini;
    res.defined = true;
    return res;
}

std::vector<double> forecast_cumulative(std::span<const double> series, int horizon) {
    if (series.size() < 15)
        throw ValidationError("forecast: need at least 15 points (14 trailing increments)");
    if (horizon < 0) throw ValidationError("forecast: negative horizon");

    const std::size_t T = series.size();
    double cbar = 0.0;
    for (std::size_t i = T - 14; i < T; ++i) cbar += series[i] - series[i - 1];
    cbar /= 14.0;

    std::vector<double> out(series.begin(), series.end());
    double cur = out.back();
    for (int h = 0; h < horizon; ++h) {
        cur += cbar;
        out.push_back(cur);
    }
    return out;
}

}  // namespace epiflow
