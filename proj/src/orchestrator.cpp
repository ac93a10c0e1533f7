#include "epiflow/orchestrator.hpp"

#include <chrono>

#include <json.hpp>

#include "epiflow/scenario.hpp"

namespace epiflow {

using nlohmann::json;

std::string paradigm_name(Paradigm p) {
    switch (p) {
        case Paradigm::Agent: return "agent";
        case Paradigm::GroundTruth: return "ground_truth";
        case Paradigm::Expert: return "expert";
        case Paradigm::Random: return "random";
    }
    return "agent";
}

Paradigm paradigm_from_name(const std::string& name) {
    if (name == "agent") return Paradigm::Agent;
    if (name == "ground_truth") return Paradigm::GroundTruth;
    if (name == "expert") return Paradigm::Expert;
    if (name == "random") return Paradigm::Random;
    throw ParseError("unknown paradigm '" + name + "' (agent|ground_truth|expert|random)");
}

double EpisodeReport::aggregate_infections() const {
    double s = 0;
    for (double v : total_infections) s += v;
    return s;
}

double EpisodeReport::aggregate_deaths() const {
    double s = 0;
    for (double v : total_deaths) s += v;
    return s;
}

namespace {

std::string tir_parameters_json(const WeeklyFractions& fr) {
    json j;
    j["fractions"] = fr.p;
    j["repaired"] = fr.repaired;
    return j.dump();
}

void log_actions(std::vector<PolicyLogEntry>& log, int cycle,
                 const std::vector<PolicyAction>& actions, int horizon_weeks) {
    for (const auto& action : actions) {
        if (const auto* tir = std::get_if<TirAllocation>(&action)) {
            for (const auto& [origin, fr] : tir->by_origin) {
                PolicyLogEntry e;
                e.cycle = cycle;
                e.acting_region = tir->dest;
                e.origin_region = origin;
                e.action_type = "tir";
                e.parameters = tir_parameters_json(fr);
                // Horizons too short for the three-phase split stay unlabeled.
                if (horizon_weeks >= 3)
                    e.policy_type = policy_type_name(classify_policy(fr.p, horizon_weeks));
                log.push_back(std::move(e));
            }
        } else if (const auto* sis = std::get_if<SisOrder>(&action)) {
            PolicyLogEntry e;
            e.cycle = cycle;
            e.acting_region = sis->dest;
            e.origin_region = sis->origin;
            e.action_type = "sis";
            json j;
            j["factor"] = sis->factor;
            j["window_days"] = sis->window_days;
            j["redistribute"] = sis->redistribute;
            e.parameters = j.dump();
            log.push_back(std::move(e));
        } else if (const auto* tis = std::get_if<TisOrder>(&action)) {
            PolicyLogEntry e;
            e.cycle = cycle;
            e.acting_region = tis->dest;
            e.origin_region = tis->origin;
            e.action_type = "tis";
            json j;
            j["eta"] = tis->eta;
            j["window_days"] = tis->window_days;
            e.parameters = j.dump();
            log.push_back(std::move(e));
        }
    }
}

}  // namespace

EpisodeReport run_episode(const ScenarioConfig& config, Paradigm paradigm, std::uint64_t seed,
                          const std::vector<std::shared_ptr<AgentBackend>>* backend_override) {
    if (!config.validated)
        throw ValidationError("run_episode requires a validated scenario config");
    const auto t0 = std::chrono::steady_clock::now();

    const int n = config.num_regions();
    EpisodeReport report;
    report.scenario_name = config.name;
    report.paradigm = paradigm_name(paradigm);
    report.seed = seed;
    report.start = config.start_date;
    report.end = config.end_date;
    for (const auto& r : config.regions) report.region_codes.push_back(r.id.code);

    std::vector<std::shared_ptr<AgentBackend>> backends(n);
    if (paradigm != Paradigm::GroundTruth) {
        for (int i = 0; i < n; ++i) {
            if (backend_override) {
                backends[i] = (*backend_override)[i];
            } else {
                switch (paradigm) {
                    case Paradigm::Agent:
                        backends[i] = make_backend(config.regions[i], config);
                        break;
                    case Paradigm::Expert:
                        backends[i] = std::make_shared<ExpertBackend>();
                        break;
                    case Paradigm::Random:
                        backends[i] = std::make_shared<RandomBackend>();
                        break;
                    case Paradigm::GroundTruth:
                        break;
                }
            }
        }
    }

    Simulator sim(config, config.baseline);
    const RegionTable table = config.region_table();
    const auto cycles = cycle_calendar(config);

    for (std::size_t c = 0; c < cycles.size(); ++c) {
        const Date cycle_start = cycles[c];
        sim.advance_to(cycle_start);
        if (paradigm == Paradigm::GroundTruth) continue;

        std::vector<Observation> observations;
        std::vector<AgentBackend*> raw;
        for (int i = 0; i < n; ++i) {
            observations.push_back(build_observation(sim.trajectory(), sim.realized(), config, i,
                                                     static_cast<int>(c), cycle_start));
            raw.push_back(backends[i].get());
        }

        CoordinateOptions opt;
        opt.cycle = static_cast<int>(c);
        opt.rounds = config.communication_rounds;
        opt.strategy = config.strategy;
        opt.horizon_weeks = config.horizon_weeks;
        opt.cycle_start = cycle_start;
        opt.sis = config.sis;
        opt.tis = config.tis;
        opt.episode_seed = seed;

        RoundResult round = coordinate_round(raw, observations, opt);
        report.degradations += round.degradations;
        for (auto& t : round.transcript) report.transcript.push_back(std::move(t));
        log_actions(report.policy_log, static_cast<int>(c), round.actions, config.horizon_weeks);

        // Enact: actions shape only the upcoming cycle's schedule.
        const CycleWindow window{cycle_start, config.horizon_weeks};
        std::vector<SisOrder> sis_orders;
        std::vector<TisOrder> tis_orders;
        for (const auto& action : round.actions) {
            if (const auto* tir = std::get_if<TirAllocation>(&action))
                sim.realized() = apply_tir(sim.realized(), *tir, window, table);
            else if (const auto* s = std::get_if<SisOrder>(&action))
                sis_orders.push_back(*s);
            else if (const auto* t = std::get_if<TisOrder>(&action))
                tis_orders.push_back(*t);
        }
        if (!sis_orders.empty())
            sim.realized() = apply_sis(sim.realized(), sis_orders, table).schedule;
        if (!tis_orders.empty()) {
            const ScreeningCalendar cal = compile_tis(tis_orders, table);
            for (int d = 0; d < window.days(); ++d) {
                const Date day = cycle_start + d;
                for (const auto& o : cal.at(day)) sim.screening().add(day, o.origin, o.dest, o.eta);
            }
        }
    }

    sim.advance_to(config.end_date);
    report.trajectory = sim.trajectory();
    report.capped_outflow_days = sim.capped_outflow_days();

    // Trim the cycle-tail guard so the schedule covers exactly the simulated
    // range: report artifacts share one date range.
    {
        const MobilitySchedule& full = report.trajectory.realized;
        MobilitySchedule trimmed(config.start_date, n, config.sim_days());
        for (int d = 0; d < config.sim_days(); ++d) trimmed.at(d) = full.at(full.day_index(config.start_date + d));
        report.trajectory.realized = std::move(trimmed);
    }

    static const SerialInterval si = discretize_serial_interval();
    for (int i = 0; i < n; ++i) {
        report.rates.push_back(rate_series(report.trajectory, i));
        std::vector<double> cum;
        for (int t = 0; t <= report.trajectory.sim_days(); ++t)
            cum.push_back(report.trajectory.cum_q[t][i]);
        const auto incidence = incidence_from_cumulative(cum);
        if (static_cast<int>(incidence.size()) >= 21)
            report.rt.push_back(estimate_rt(incidence, si, 21, 1.0, 1.0, config.epsilon));
        else
            report.rt.push_back(RtSeries{});
        report.total_infections.push_back(report.trajectory.cum_q.back()[i]);
        report.total_deaths.push_back(report.trajectory.days.back()[i].D);
    }

    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

ComparisonTable compare_paradigms(const std::vector<EpisodeReport>& reports) {
    const EpisodeReport* ground = nullptr;
    for (const auto& r : reports)
        if (r.paradigm == "ground_truth") ground = &r;
    if (!ground) throw ValidationError("compare_paradigms: no ground_truth report present");

    ComparisonTable table;
    table.scenario_name = ground->scenario_name;
    table.region_codes = ground->region_codes;

    for (const auto& r : reports) {
        if (&r == ground) continue;
        if (r.scenario_name != ground->scenario_name || r.region_codes != ground->region_codes ||
            r.start != ground->start || r.end != ground->end)
            throw ValidationError("compare_paradigms: reports cover different scenarios");

        ParadigmComparison row;
        row.paradigm = r.paradigm;
        const int n = static_cast<int>(r.region_codes.size());
        for (int i = 0; i < n; ++i) {
            const double gi = ground->total_infections[i];
            const double gd = ground->total_deaths[i];
            row.reduction_infections.push_back(gi != 0.0 ? (gi - r.total_infections[i]) / gi : 0.0);
            row.reduction_deaths.push_back(gd != 0.0 ? (gd - r.total_deaths[i]) / gd : 0.0);
        }
        const double gai = ground->aggregate_infections();
        const double gad = ground->aggregate_deaths();
        row.aggregate_reduction_infections =
            gai != 0.0 ? (gai - r.aggregate_infections()) / gai : 0.0;
        row.aggregate_reduction_deaths = gad != 0.0 ? (gad - r.aggregate_deaths()) / gad : 0.0;

        const auto imp_inf = improvements(ground->total_infections, r.total_infections);
        const auto imp_dea = improvements(ground->total_deaths, r.total_deaths);
        row.equity_infections = equity_coefficient(imp_inf.clamped);
        row.equity_deaths = equity_coefficient(imp_dea.clamped);

        for (const auto& e : r.policy_log)
            if (!e.policy_type.empty()) ++row.policy_type_counts[e.policy_type];
        table.rows.push_back(std::move(row));
    }
    return table;
}

AttributionDataset build_attribution_dataset(const EpisodeReport& report,
                                             const ScenarioConfig& config) {
    AttributionDataset data;
    const int n = static_cast<int>(report.region_codes.size());
    const char* comp[] = {"S", "E", "I", "Q", "R", "D"};
    for (const char* c : comp) data.feature_names.push_back(std::string("origin_") + c);
    for (const char* c : comp) data.feature_names.push_back(std::string("dest_") + c);
    data.feature_names.push_back("inflow");
    for (const auto& code : report.region_codes)
        data.feature_names.push_back("origin_is_" + code);

    const auto cycles = cycle_calendar(config);
    const RegionTable table = config.region_table();

    for (const auto& e : report.policy_log) {
        if (e.action_type != "tir" || e.policy_type.empty()) continue;
        if (e.cycle < 0 || e.cycle >= static_cast<int>(cycles.size())) continue;
        const Date cycle_start = cycles[e.cycle];
        const int day = static_cast<int>(cycle_start - report.trajectory.start);
        const int origin = table.require(e.origin_region);
        const int dest = table.require(e.acting_region);

        AttributionRow row;
        row.cycle = e.cycle;
        row.dest = e.acting_region;
        row.origin = e.origin_region;
        const CompartmentState& so = report.trajectory.state(day, origin);
        const CompartmentState& sd = report.trajectory.state(day, dest);
        for (double v : {so.S, so.E, so.I, so.Q, so.R, so.D}) row.features.push_back(v);
        for (double v : {sd.S, sd.E, sd.I, sd.Q, sd.R, sd.D}) row.features.push_back(v);
        double inflow = 0.0;
        for (int d = 0; d < config.cycle_days(); ++d)
            inflow += config.baseline.on(cycle_start + d).at(origin, dest);
        row.features.push_back(inflow);
        for (int i = 0; i < n; ++i)
            row.features.push_back(i == origin ? 1.0 : 0.0);
        row.strict_first = e.policy_type == "strict_first" ? 1 : 0;
        data.rows.push_back(std::move(row));
    }
    return data;
}

}  // namespace epiflow
