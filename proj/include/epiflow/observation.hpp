#pragma once

#include <string>
#include <vector>

#include "epiflow/dynamics.hpp"
#include "epiflow/policy.hpp"
#include "epiflow/types.hpp"

namespace epiflow {

/// Pandemic summary of one region as seen at a decision epoch.
struct RegionSummary {
    std::string code;
    CompartmentState state;   // compartments at the cycle start
    double population = 0.0;  // living population
    double ir_recent = 0.0;   // mean incidence rate, trailing 7 days
    double dr_recent = 0.0;
    double acr = 0.0;
    double ir_trend = 0.0;    // trailing-7 mean minus the prior-7 mean
    double rt_mean = 0.0;
    bool rt_defined = false;
};

struct OriginFlowInfo {
    std::string code;
    double hist_daily_avg = 0.0;            // trailing 21 days, clipped at series start
    std::vector<double> weekly_projection;  // upcoming H weekly totals
    double projected_total = 0.0;
    double projected_daily_avg = 0.0;
};

struct Observation {
    std::string region;
    int region_index = -1;
    int cycle = 0;
    Date cycle_start;
    int horizon_weeks = 6;
    RegionSummary local;
    std::vector<RegionSummary> neighbors;  // every other region
    std::vector<OriginFlowInfo> origins;   // inbound flows keyed by origin
    bool short_history = false;            // fewer than 21 days behind the cycle start
};

/// Assemble an agent's view at a cycle start from the trajectory simulated so
/// far and the current realized schedule. Historical windows clip at the
/// series start; projections read the upcoming H weeks of the schedule.
Observation build_observation(const Trajectory& so_far, const MobilitySchedule& schedule,
                              const ScenarioConfig& config, int region, int cycle_index,
                              Date cycle_start);

/// Inter-agent broadcast: risk summary plus a digest of the provisional
/// action. Bounded, line-oriented serialization.
struct Message {
    std::string sender;
    int cycle = 0;
    double rt_mean = 0.0;
    bool rt_defined = false;
    int ir_trend_sign = 0;  // -1 falling, 0 flat, +1 rising
    std::vector<std::string> tightness_ranking;  // origins, tightest first
    std::string action_digest;

    bool operator==(const Message&) const = default;
};

std::string serialize_message(const Message& m);
Message deserialize_message(const std::string& line);

/// Extract the broadcast content from an observation and the provisional
/// action (R_t, IR trend sign, per-origin tightness ranking, action digest).
Message build_message(const Observation& obs, const PolicyAction& action);

}  // namespace epiflow
