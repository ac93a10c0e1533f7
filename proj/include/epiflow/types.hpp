#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "epiflow/date.hpp"
#include "epiflow/errors.hpp"

namespace epiflow {

// Numerical-stability constant used by the R_t posterior and the equity
// improvement denominators; overridable per scenario.
inline constexpr double kDefaultEpsilon = 1e-9;

struct RegionId {
    std::string code;  // short uppercase identifier, unique per scenario
    int index = -1;    // dense handle in [0, N)
};

/// Region code <-> dense index lookup shared by schedule/policy operations.
struct RegionTable {
    std::vector<std::string> codes;

    int index_of(const std::string& code) const {
        for (std::size_t i = 0; i < codes.size(); ++i)
            if (codes[i] == code) return static_cast<int>(i);
        return -1;
    }
    int require(const std::string& code) const {
        const int i = index_of(code);
        if (i < 0) throw ValidationError("unknown region code '" + code + "'");
        return i;
    }
    int size() const { return static_cast<int>(codes.size()); }
};

/// One region's compartment occupancy on one day. Person-counts are
/// real-valued; the mean-field update equations are deterministic.
struct CompartmentState {
    double S = 0, E = 0, I = 0, Q = 0, R = 0, D = 0;

    double living() const { return S + E + I + Q + R; }
    double total() const { return living() + D; }
};

struct ParamSet {
    double beta_I = 0;  // transmission rate of infectious individuals
    double beta_Q = 0;  // transmission rate of quarantined individuals, < beta_I
    double sigma = 0;   // progression rate E -> I
    double delta = 0;   // detection rate I -> Q
    double gamma = 0;   // recovery rate for I and Q
    double mu = 0;      // mortality rate for I and Q
};

/// Piecewise-constant parameter sequence keyed by date. `base` applies from
/// the scenario start; each step overrides from its date onward.
struct ParamSchedule {
    ParamSet base;
    std::vector<std::pair<Date, ParamSet>> steps;  // sorted ascending by date

    const ParamSet& at(Date d) const {
        const ParamSet* cur = &base;
        for (const auto& [from, ps] : steps) {
            if (from <= d)
                cur = &ps;
            else
                break;
        }
        return *cur;
    }
};

/// Dense origin x destination matrix of one day's person flows.
struct FlowMatrix {
    int n = 0;
    std::vector<double> v;  // row-major, v[origin * n + dest]

    FlowMatrix() = default;
    explicit FlowMatrix(int regions) : n(regions), v(static_cast<std::size_t>(regions) * regions, 0.0) {}

    double at(int origin, int dest) const { return v[static_cast<std::size_t>(origin) * n + dest]; }
    double& at(int origin, int dest) { return v[static_cast<std::size_t>(origin) * n + dest]; }

    double row_sum(int origin) const {
        double s = 0;
        for (int j = 0; j < n; ++j) s += at(origin, j);
        return s;
    }
};

/// Day-indexed sequence of flow matrices; entry (j, i) is the inbound flow
/// from origin j to destination i on that day. Diagonal is zero.
class MobilitySchedule {
public:
    MobilitySchedule() = default;
    MobilitySchedule(Date start, int regions, int days)
        : start_(start), days_(days, FlowMatrix(regions)) {}

    Date start() const { return start_; }
    int days() const { return static_cast<int>(days_.size()); }
    int regions() const { return days_.empty() ? 0 : days_[0].n; }

    bool covers(Date d) const {
        const auto k = d - start_;
        return k >= 0 && k < days();
    }
    int day_index(Date d) const {
        if (!covers(d))
            throw ValidationError("mobility schedule does not cover " + d.to_string());
        return static_cast<int>(d - start_);
    }

    const FlowMatrix& at(int day) const { return days_.at(day); }
    FlowMatrix& at(int day) { return days_.at(day); }
    const FlowMatrix& on(Date d) const { return days_.at(day_index(d)); }
    FlowMatrix& on(Date d) { return days_.at(day_index(d)); }

private:
    Date start_;
    std::vector<FlowMatrix> days_;
};

enum class Strategy { Tir, Sis, Tis };

std::string strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

struct SisDefaults {
    double factor = 0.5;
    int window_days = 14;
    bool redistribute = true;
};

struct TisDefaults {
    double eta = 1.0;
    int window_days = 14;
};

struct Region {
    RegionId id;
    CompartmentState initial;
    ParamSchedule params;
    std::string backend = "expert";  // scripted | random | expert | remote
    // Optional replay script for the scripted backend: per-origin weekly
    // fractions reused every cycle.
    std::map<std::string, std::vector<double>> scripted_tir;
};

/// Immutable after validate_scenario(); safe to share across episode runs.
struct ScenarioConfig {
    std::string name;
    Date start_date;
    Date end_date;  // exclusive: transitions simulated for [start, end)
    int warmup_days = 21;
    int horizon_weeks = 6;
    Strategy strategy = Strategy::Tir;
    std::uint64_t seed = 0;
    int communication_rounds = 2;
    double epsilon = kDefaultEpsilon;
    SisDefaults sis;
    TisDefaults tis;
    std::vector<Region> regions;
    std::vector<Date> cycle_starts;  // auto-tiled when left empty
    MobilitySchedule baseline;
    std::string source_json;  // canonical dump for config hashing
    bool validated = false;

    int num_regions() const { return static_cast<int>(regions.size()); }
    int sim_days() const { return static_cast<int>(end_date - start_date); }
    int cycle_days() const { return horizon_weeks * 7; }

    RegionTable region_table() const {
        RegionTable t;
        for (const auto& r : regions) t.codes.push_back(r.id.code);
        return t;
    }
    int region_index(const std::string& code) const {
        for (const auto& r : regions)
            if (r.id.code == code) return r.id.index;
        return -1;
    }
};

}  // namespace epiflow
