#pragma once

#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "epiflow/dynamics.hpp"
#include "epiflow/types.hpp"

namespace epiflow {

/// Weekly inflow fractions over the planning horizon: all positive, sum 1.
struct WeeklyFractions {
    std::vector<double> p;
    bool repaired = false;
};

/// Floor nonpositive entries at 1e-4 and renormalize to sum 1; `repaired`
/// records whether anything changed beyond 1e-9. Throws ValidationError on
/// an all-zero or non-finite vector.
WeeklyFractions normalize_tir(std::span<const double> raw);

/// One acting destination's temporal reallocation: fractions per origin.
struct TirAllocation {
    std::string dest;
    std::map<std::string, WeeklyFractions> by_origin;
};

struct SisOrder {
    std::string dest;
    std::string origin;
    double factor = 0.5;  // in (0, 1]
    int window_days = 14;
    bool redistribute = true;
    Date start;
};

struct TisOrder {
    std::string dest;
    std::string origin;
    double eta = 1.0;  // in [0, 1]
    int window_days = 14;
    Date start;
};

enum class PolicyType { StrictFirst, RelaxedFirst, Balanced };

std::string policy_type_name(PolicyType t);

struct CycleWindow {
    Date start;
    int weeks = 6;

    int days() const { return weeks * 7; }
    Date end() const { return start + days(); }
};

/// Apply a TIR allocation to the baseline over one cycle: for each origin,
/// week h of the (origin -> dest) pair carries p_h times the pair's total
/// cycle volume, shaped inside the week by the baseline's daily profile.
/// Total cycle volume per pair is preserved.
MobilitySchedule apply_tir(const MobilitySchedule& baseline, const TirAllocation& allocation,
                           const CycleWindow& window, const RegionTable& regions);

/// Apply spatial suppression orders. Within each order's window the targeted
/// origin -> dest flow is multiplied by `factor`; with redistribution on, the
/// suppressed volume moves to the origin's other destinations proportionally
/// to their same-day baseline flows, skipping destinations that also suppress
/// that origin that day. With no eligible destination the volume is dropped
/// (full coordination), counted in `dropped_days`.
struct SisResult {
    MobilitySchedule schedule;
    int dropped_days = 0;  // days where full coordination dropped spillover
};
SisResult apply_sis(const MobilitySchedule& baseline, std::span<const SisOrder> orders,
                    const RegionTable& regions);

/// Turn screening orders into the simulator's per-day calendar. One order per
/// acting destination per round; conflicting duplicates throw.
ScreeningCalendar compile_tis(std::span<const TisOrder> orders, const RegionTable& regions);

/// Classify a horizon allocation by its early/late phase shares. Phases are
/// ceil-split thirds of the horizon (weeks 1-2 / 3-4 / 5-6 when H = 6);
/// strict-first when the early share <= 0.3 and late share >= 0.4,
/// relaxed-first for the mirror condition, balanced otherwise.
PolicyType classify_policy(std::span<const double> fractions, int horizon_weeks = 6);

/// Tagged policy action produced by agents. monostate = no-op (fallback).
using PolicyAction = std::variant<std::monostate, TirAllocation, SisOrder, TisOrder>;

std::string action_type_name(const PolicyAction& a);

}  // namespace epiflow
