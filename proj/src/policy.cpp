#include "epiflow/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace epiflow {

WeeklyFractions normalize_tir(std::span<const double> raw) {
    if (raw.empty()) throw ValidationError("normalize_tir: empty fraction vector");
    bool any_positive = false;
    for (double v : raw) {
        if (!std::isfinite(v))
            throw ValidationError("normalize_tir: non-finite fraction");
        any_positive |= v > 0.0;
    }
    if (!any_positive)
        throw ValidationError("normalize_tir: unrecoverable all-zero vector");

    WeeklyFractions out;
    out.p.assign(raw.begin(), raw.end());
    bool floored = false;
    for (double& v : out.p) {
        if (v <= 0.0) {
            v = 1e-4;
            floored = true;
        }
    }
    const double sum = std::accumulate(out.p.begin(), out.p.end(), 0.0);
    if (!(sum > 0.0)) throw ValidationError("normalize_tir: unrecoverable all-zero vector");
    const bool rescaled = std::fabs(sum - 1.0) > 1e-9;
    if (rescaled)
        for (double& v : out.p) v /= sum;
    out.repaired = floored || rescaled;
    return out;
}

std::string policy_type_name(PolicyType t) {
    switch (t) {
        case PolicyType::StrictFirst: return "strict_first";
        case PolicyType::RelaxedFirst: return "relaxed_first";
        case PolicyType::Balanced: return "balanced";
    }
    return "balanced";
}

MobilitySchedule apply_tir(const MobilitySchedule& baseline, const TirAllocation& allocation,
                           const CycleWindow& window, const RegionTable& regions) {
    const int dest = regions.require(allocation.dest);
    const int first = baseline.day_index(window.start);
    if (first + window.days() > baseline.days())
        throw ValidationError("apply_tir: cycle window extends past the mobility schedule");

    MobilitySchedule out = baseline;
    for (const auto& [origin_code, fractions] : allocation.by_origin) {
        const int origin = regions.require(origin_code);
        if (origin == dest)
            throw ValidationError("apply_tir: origin equals acting destination");
        if (static_cast<int>(fractions.p.size()) != window.weeks)
            throw ValidationError("apply_tir: allocation for " + origin_code + " has " +
                                  std::to_string(fractions.p.size()) + " weeks, window spans " +
                                  std::to_string(window.weeks));

        double pair_total = 0.0;
        for (int d = 0; d < window.days(); ++d) pair_total += baseline.at(first + d).at(origin, dest);
        if (pair_total == 0.0) continue;

        for (int w = 0; w < window.weeks; ++w) {
            double week_base = 0.0;
            for (int d = 0; d < 7; ++d) week_base += baseline.at(first + w * 7 + d).at(origin, dest);
            const double week_target = fractions.p[w] * pair_total;
            if (week_base > 0.0) {
                const double scale = week_target / week_base;
                for (int d = 0; d < 7; ++d) {
                    const int k = first + w * 7 + d;
                    out.at(k).at(origin, dest) = baseline.at(k).at(origin, dest) * scale;
                }
            } else {
                // No baseline profile to shape: spend the quota uniformly.
                for (int d = 0; d < 7; ++d)
                    out.at(first + w * 7 + d).at(origin, dest) = week_target / 7.0;
            }
        }
    }
    return out;
}

SisResult apply_sis(const MobilitySchedule& baseline, std::span<const SisOrder> orders,
                    const RegionTable& regions) {
    const int n = regions.size();
    for (const auto& o : orders) {
        if (!(o.factor > 0.0) || o.factor > 1.0)
            throw ValidationError("apply_sis: suppression factor must lie in (0, 1]");
        if (o.window_days < 1) throw ValidationError("apply_sis: window must be >= 1 day");
        regions.require(o.dest);
        regions.require(o.origin);
        if (o.dest == o.origin)
            throw ValidationError("apply_sis: destination cannot suppress itself");
    }
    for (std::size_t a = 0; a < orders.size(); ++a) {
        for (std::size_t b = a + 1; b < orders.size(); ++b) {
            if (orders[a].dest != orders[b].dest) continue;
            const Date a_end = orders[a].start + orders[a].window_days;
            const Date b_end = orders[b].start + orders[b].window_days;
            if (orders[a].start < b_end && orders[b].start < a_end)
                throw ValidationError("apply_sis: overlapping orders for acting destination " +
                                      orders[a].dest + " (one order per round)");
        }
    }

    SisResult res{baseline, 0};
    MobilitySchedule& out = res.schedule;
    for (int day = 0; day < baseline.days(); ++day) {
        const Date date = baseline.start() + day;
        // Active suppressions today, keyed by origin.
        std::vector<std::vector<const SisOrder*>> by_origin(n);
        for (const auto& o : orders)
            if (date >= o.start && date < o.start + o.window_days)
                by_origin[regions.require(o.origin)].push_back(&o);

        for (int origin = 0; origin < n; ++origin) {
            if (by_origin[origin].empty()) continue;
            std::vector<bool> suppressing(n, false);
            double spilled = 0.0;
            for (const SisOrder* o : by_origin[origin]) {
                const int dest = regions.require(o->dest);
                suppressing[dest] = true;
                const double base = baseline.at(day).at(origin, dest);
                out.at(day).at(origin, dest) = base * o->factor;
                if (o->redistribute) spilled += base * (1.0 - o->factor);
            }
            if (spilled <= 0.0) continue;

            double eligible_base = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != origin && !suppressing[j]) eligible_base += baseline.at(day).at(origin, j);
            if (eligible_base > 0.0) {
                for (int j = 0; j < n; ++j) {
                    if (j == origin || suppressing[j]) continue;
                    out.at(day).at(origin, j) +=
                        spilled * baseline.at(day).at(origin, j) / eligible_base;
                }
            } else {
                ++res.dropped_days;  // full coordination: no spillover target
            }
        }
    }
    return res;
}

ScreeningCalendar compile_tis(std::span<const TisOrder> orders, const RegionTable& regions) {
    for (const auto& o : orders) {
        if (o.eta < 0.0 || o.eta > 1.0)
            throw ValidationError("compile_tis: detection efficacy must lie in [0, 1]");
        if (o.window_days < 1) throw ValidationError("compile_tis: window must be >= 1 day");
        regions.require(o.dest);
        regions.require(o.origin);
        if (o.dest == o.origin)
            throw ValidationError("compile_tis: destination cannot screen itself");
    }
    for (std::size_t a = 0; a < orders.size(); ++a) {
        for (std::size_t b = a + 1; b < orders.size(); ++b) {
            if (orders[a].dest != orders[b].dest) continue;
            const Date a_end = orders[a].start + orders[a].window_days;
            const Date b_end = orders[b].start + orders[b].window_days;
            if (orders[a].start < b_end && orders[b].start < a_end)
                throw ValidationError("compile_tis: overlapping orders for acting destination " +
                                      orders[a].dest + " (one order per round)");
        }
    }
    ScreeningCalendar cal;
    for (const auto& o : orders) {
        const int origin = regions.require(o.origin);
        const int dest = regions.require(o.dest);
        if (o.eta == 0.0) continue;  // no-effect order
        for (int d = 0; d < o.window_days; ++d) cal.add(o.start + d, origin, dest, o.eta);
    }
    return cal;
}

PolicyType classify_policy(std::span<const double> fractions, int horizon_weeks) {
    if (static_cast<int>(fractions.size()) != horizon_weeks)
        throw ValidationError("classify_policy: expected " + std::to_string(horizon_weeks) +
                              " weekly fractions, got " + std::to_string(fractions.size()));
    if (horizon_weeks < 3)
        throw ValidationError("classify_policy: horizon too short to split into phases");

    const int b1 = (horizon_weeks + 2) / 3;          // ceil(H/3)
    const int b2 = (2 * horizon_weeks + 2) / 3;      // ceil(2H/3)
    double early = 0.0, late = 0.0;
    for (int h = 0; h < b1; ++h) early += fractions[h];
    for (int h = b2; h < horizon_weeks; ++h) late += fractions[h];

    if (early <= 0.3 && late >= 0.4) return PolicyType::StrictFirst;
    if (early >= 0.4 && late <= 0.3) return PolicyType::RelaxedFirst;
    return PolicyType::Balanced;
}

std::string action_type_name(const PolicyAction& a) {
    if (std::holds_alternative<TirAllocation>(a)) return "tir";
    if (std::holds_alternative<SisOrder>(a)) return "sis";
    if (std::holds_alternative<TisOrder>(a)) return "tis";
    return "noop";
}

}  // namespace epiflow
