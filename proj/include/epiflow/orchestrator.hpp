#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "epiflow/coordinate.hpp"
#include "epiflow/dynamics.hpp"
#include "epiflow/metrics.hpp"
#include "epiflow/rt.hpp"
#include "epiflow/shapley.hpp"

namespace epiflow {

enum class Paradigm { Agent, GroundTruth, Expert, Random };

std::string paradigm_name(Paradigm p);
Paradigm paradigm_from_name(const std::string& name);

struct PolicyLogEntry {
    int cycle = 0;
    std::string acting_region;
    std::string origin_region;
    std::string action_type;  // tir | sis | tis
    std::string parameters;   // compact JSON
    std::string policy_type;  // strict_first | relaxed_first | balanced (TIR only)
};

struct EpisodeReport {
    std::string scenario_name;
    std::string paradigm;
    std::uint64_t seed = 0;
    Date start, end;
    std::vector<std::string> region_codes;

    Trajectory trajectory;  // carries the realized schedule
    std::vector<PolicyLogEntry> policy_log;
    std::vector<TranscriptEntry> transcript;
    std::vector<RateSeries> rates;       // per region
    std::vector<RtSeries> rt;            // per region, from confirmed increments
    std::vector<double> total_infections;  // terminal cumulative confirmed counter
    std::vector<double> total_deaths;      // terminal D

    int degradations = 0;
    int capped_outflow_days = 0;
    double wall_clock_seconds = 0.0;  // never written into hashed artifacts

    double aggregate_infections() const;
    double aggregate_deaths() const;
};

/// Run the closed observation-decision-transition loop for one paradigm:
/// warm-up under the baseline schedule, then per reallocation cycle build
/// observations, coordinate K rounds, apply the actions to the upcoming
/// cycle's schedule, and advance the simulator. The ground-truth paradigm
/// skips the decision steps and never touches the baseline. `override`
/// replaces the per-region backends (test seam; also used for Expert/Random
/// paradigms internally).
EpisodeReport run_episode(const ScenarioConfig& config, Paradigm paradigm, std::uint64_t seed,
                          const std::vector<std::shared_ptr<AgentBackend>>* backend_override = nullptr);

struct ParadigmComparison {
    std::string paradigm;
    std::vector<double> reduction_infections;  // per region, fraction vs ground truth
    std::vector<double> reduction_deaths;
    double aggregate_reduction_infections = 0.0;
    double aggregate_reduction_deaths = 0.0;
    EquityResult equity_infections;
    EquityResult equity_deaths;
    std::map<std::string, int> policy_type_counts;
};

struct ComparisonTable {
    std::string scenario_name;
    std::vector<std::string> region_codes;
    std::vector<ParadigmComparison> rows;  // one per non-ground-truth report
};

/// Per-region and aggregate reductions vs the ground-truth report, equity
/// coefficients, and policy-type distributions. Reports must share scenario
/// and date range.
ComparisonTable compare_paradigms(const std::vector<EpisodeReport>& reports);

/// Rows = (cycle, destination, origin) TIR decisions; features are both
/// regions' compartment counts at the cycle start, the pair's upcoming cycle
/// inflow volume, and a one-hot origin encoding; label = strict-first.
AttributionDataset build_attribution_dataset(const EpisodeReport& report,
                                             const ScenarioConfig& config);

}  // namespace epiflow
