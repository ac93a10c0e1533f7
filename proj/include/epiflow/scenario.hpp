#pragma once

#include <string>

#include "epiflow/types.hpp"

namespace epiflow {

/// Parameters of the deterministic synthetic flow generator: every ordered
/// pair carries `base` persons/day scaled by an optional per-pair factor and
/// a fixed zero-mean weekday pattern, so weekly totals are identical across
/// weeks.
struct SyntheticFlowSpec {
    double base = 1000.0;
    double weekday_amplitude = 0.0;
    std::map<std::string, double> pair_scale;  // "AA->BB" -> multiplier
};

MobilitySchedule generate_synthetic_flows(const RegionTable& regions, Date start, int days,
                                          const SyntheticFlowSpec& spec);

/// Parse a scenario file (JSON). Does not validate; callers should pass the
/// result through validate_scenario.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario_json(const std::string& text, const std::string& base_dir = ".");

/// Check every scenario invariant and assign dense region indices.
/// Idempotent. Throws ValidationError with a message naming the violation.
ScenarioConfig validate_scenario(ScenarioConfig config);

/// Cycle calendar implied by the config: explicit cycle_starts when given,
/// otherwise tiled from start+warmup in horizon-week steps until end_date is
/// covered. The final cycle may extend past end_date; the simulator stops at
/// end_date but schedules must cover the full cycle.
std::vector<Date> cycle_calendar(const ScenarioConfig& config);

/// Last day (exclusive) any cycle can touch; baseline schedules must cover it.
Date schedule_horizon(const ScenarioConfig& config);

}  // namespace epiflow
