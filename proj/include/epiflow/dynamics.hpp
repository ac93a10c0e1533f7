#pragma once

#include <map>
#include <span>
#include <vector>

#include "epiflow/types.hpp"

namespace epiflow {

/// Divert eta of the E/I travelers moving origin -> dest into dest's Q.
struct ScreeningOrder {
    int origin = -1;
    int dest = -1;
    double eta = 1.0;
};

/// Day-keyed inbound-screening orders produced by compile_tis.
class ScreeningCalendar {
public:
    /// Throws ValidationError when the same (origin, dest) pair is given a
    /// different eta on the same day.
    void add(Date day, int origin, int dest, double eta);

    std::span<const ScreeningOrder> at(Date day) const;
    bool empty() const { return by_day_.empty(); }

private:
    std::map<std::int64_t, std::vector<ScreeningOrder>> by_day_;
};

struct Trajectory {
    Date start;
    std::vector<std::vector<CompartmentState>> days;  // [day][region], sim_days + 1 snapshots
    std::vector<std::vector<double>> cum_q;           // running confirmed counter, same shape
    MobilitySchedule realized;                        // schedule actually applied

    int sim_days() const { return static_cast<int>(days.size()) - 1; }
    const CompartmentState& state(int day, int region) const { return days[day][region]; }
};

/// Within-region force of infection lambda = beta_I I/N + beta_Q Q/N.
/// Throws InstabilityError when the living population is zero.
double force_of_infection(const CompartmentState& state, const ParamSet& params);

struct StepResult {
    std::vector<CompartmentState> next;
    std::vector<double> new_confirmed;  // delta I detections + screened arrivals, per region
    int capped_outflows = 0;            // regions whose mobility outflow was scaled down
};

/// One synchronous day update: all right-hand sides evaluate at day-t values,
/// then commit. S/E/I/R migrate proportionally to compartment shares; Q and D
/// never move. Screening orders divert the eta fraction of migrating E and I
/// mass into the destination's Q. Throws InstabilityError (naming the region)
/// if a compartment would fall below -tolerance.
StepResult step(const std::vector<CompartmentState>& states, const FlowMatrix& flows,
                const std::vector<ParamSet>& params,
                std::span<const ScreeningOrder> screening = {}, double tolerance = 1e-6);

/// Full-range simulation of a validated scenario under `realized` flows.
/// Pure: identical inputs give identical trajectories.
Trajectory simulate(const ScenarioConfig& config, const MobilitySchedule& realized,
                    const ScreeningCalendar& screening = {});

/// Incremental simulator used by the episode loop: advance day by day while
/// the realized schedule and screening calendar are edited for future cycles.
class Simulator {
public:
    Simulator(const ScenarioConfig& config, MobilitySchedule realized,
              ScreeningCalendar screening = {});

    void advance_to(Date d);  // no-op if already simulated through d
    Date current() const { return traj_.start + traj_.sim_days(); }

    const Trajectory& trajectory() const { return traj_; }
    MobilitySchedule& realized() { return traj_.realized; }
    ScreeningCalendar& screening() { return screening_; }
    int capped_outflow_days() const { return capped_; }

private:
    const ScenarioConfig& config_;
    ScreeningCalendar screening_;
    Trajectory traj_;
    int capped_ = 0;
};

}  // namespace epiflow
