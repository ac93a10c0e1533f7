#include "epiflow/observation.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "epiflow/ingest.hpp"
#include "epiflow/metrics.hpp"
#include "epiflow/rt.hpp"

namespace epiflow {

using nlohmann::json;

namespace {

double window_mean(const std::vector<double>& v, int end_excl, int len) {
    const int lo = std::max(0, end_excl - len);
    if (end_excl <= lo) return 0.0;
    double s = 0.0;
    for (int i = lo; i < end_excl; ++i) s += v[i];
    return s / static_cast<double>(end_excl - lo);
}

RegionSummary summarize_region(const Trajectory& traj, const ScenarioConfig& config, int r,
                               int day) {
    RegionSummary s;
    s.code = config.regions[r].id.code;
    s.state = traj.state(day, r);
    s.population = s.state.living();
    s.acr = s.state.living() > 0 ? s.state.Q / s.state.living() : 0.0;

    std::vector<double> ir, dr;
    for (int t = 0; t < day; ++t) {
        ir.push_back(incidence_rate(traj, r, t));
        dr.push_back(death_rate(traj, r, t));
    }
    s.ir_recent = window_mean(ir, day, 7);
    s.dr_recent = window_mean(dr, day, 7);
    s.ir_trend = s.ir_recent - window_mean(ir, std::max(0, day - 7), 7);

    // R_t from the confirmed-counter increments when the window allows.
    static const SerialInterval si = discretize_serial_interval();
    std::vector<double> cum;
    for (int t = 0; t <= day; ++t) cum.push_back(traj.cum_q[t][r]);
    const auto incidence = incidence_from_cumulative(cum);
    const int W = 21;
    if (static_cast<int>(incidence.size()) >= W) {
        const RtSeries rt = estimate_rt(incidence, si, W, 1.0, 1.0, config.epsilon);
        if (rt.size() > 0) {
            s.rt_mean = rt.mean.back();
            s.rt_defined = true;
        }
    }
    return s;
}

}  // namespace

Observation build_observation(const Trajectory& so_far, const MobilitySchedule& schedule,
                              const ScenarioConfig& config, int region, int cycle_index,
                              Date cycle_start) {
    const int day = static_cast<int>(cycle_start - so_far.start);
    if (day < 0 || day > so_far.sim_days())
        throw ValidationError("build_observation: cycle start outside the simulated trajectory");

    Observation obs;
    obs.region = config.regions[region].id.code;
    obs.region_index = region;
    obs.cycle = cycle_index;
    obs.cycle_start = cycle_start;
    obs.horizon_weeks = config.horizon_weeks;
    obs.short_history = day < 21;
    obs.local = summarize_region(so_far, config, region, day);

    for (int r = 0; r < config.num_regions(); ++r) {
        if (r == region) continue;
        obs.neighbors.push_back(summarize_region(so_far, config, r, day));
    }

    const int hist_days = std::min(day, 21);
    for (int o = 0; o < config.num_regions(); ++o) {
        if (o == region) continue;
        OriginFlowInfo info;
        info.code = config.regions[o].id.code;
        double hist = 0.0;
        for (int t = day - hist_days; t < day; ++t)
            hist += schedule.on(so_far.start + t).at(o, region);
        info.hist_daily_avg = hist_days > 0 ? hist / hist_days : 0.0;

        info.weekly_projection.resize(config.horizon_weeks, 0.0);
        for (int w = 0; w < config.horizon_weeks; ++w)
            for (int d = 0; d < 7; ++d)
                info.weekly_projection[w] += schedule.on(cycle_start + w * 7 + d).at(o, region);
        for (double v : info.weekly_projection) info.projected_total += v;
        info.projected_daily_avg = info.projected_total / (config.horizon_weeks * 7.0);
        obs.origins.push_back(std::move(info));
    }
    return obs;
}

std::string serialize_message(const Message& m) {
    json j;
    j["sender"] = m.sender;
    j["cycle"] = m.cycle;
    if (m.rt_defined) j["rt_mean"] = m.rt_mean;
    j["ir_trend_sign"] = m.ir_trend_sign;
    j["tightness_ranking"] = m.tightness_ranking;
    j["action_digest"] = m.action_digest;
    return j.dump();
}

Message deserialize_message(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(std::string("message is not valid JSON: ") + e.what());
    }
    Message m;
    m.sender = j.at("sender").get<std::string>();
    m.cycle = j.at("cycle").get<int>();
    if (j.contains("rt_mean")) {
        m.rt_mean = j.at("rt_mean").get<double>();
        m.rt_defined = true;
    }
    m.ir_trend_sign = j.at("ir_trend_sign").get<int>();
    m.tightness_ranking = j.at("tightness_ranking").get<std::vector<std::string>>();
    m.action_digest = j.at("action_digest").get<std::string>();
    return m;
}

Message build_message(const Observation& obs, const PolicyAction& action) {
    Message m;
    m.sender = obs.region;
    m.cycle = obs.cycle;
    m.rt_mean = obs.local.rt_mean;
    m.rt_defined = obs.local.rt_defined;
    const double trend = obs.local.ir_trend;
    m.ir_trend_sign = trend > 1e-15 ? 1 : (trend < -1e-15 ? -1 : 0);

    if (const auto* tir = std::get_if<TirAllocation>(&action)) {
        // Tightness of an origin's allocation = its early-phase share; lower
        // early share means a tighter early stance, ranked first.
        std::vector<std::pair<double, std::string>> ranked;
        for (const auto& [origin, fr] : tir->by_origin) {
            const int b1 = (static_cast<int>(fr.p.size()) + 2) / 3;
            double early = 0.0;
            for (int h = 0; h < b1; ++h) early += fr.p[h];
            ranked.emplace_back(early, origin);
        }
        std::sort(ranked.begin(), ranked.end());
        for (const auto& [share, origin] : ranked) m.tightness_ranking.push_back(origin);
        m.action_digest = "tir over " + std::to_string(tir->by_origin.size()) + " origins";
        if (!ranked.empty()) m.action_digest += ", tightest " + ranked.front().second;
    } else if (const auto* sis = std::get_if<SisOrder>(&action)) {
        m.tightness_ranking.push_back(sis->origin);
        m.action_digest = "sis suppress " + sis->origin;
    } else if (const auto* tis = std::get_if<TisOrder>(&action)) {
        m.tightness_ranking.push_back(tis->origin);
        m.action_digest = "tis screen " + tis->origin;
    } else {
        m.action_digest = "noop";
    }
    return m;
}

}  // namespace epiflow
