#include "epiflow/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "epiflow/ingest.hpp"

namespace epiflow {

using nlohmann::json;

namespace {

// Fixed zero-mean weekday pattern (Mon..Sun relative to the epoch weekday).
constexpr double kWeekdayPattern[7] = {-0.30, -0.10, 0.00, 0.05, 0.15, 0.25, -0.05};

ParamSet parse_params(const json& j, const ParamSet& defaults) {
    ParamSet p = defaults;
    if (j.contains("beta_I")) p.beta_I = j.at("beta_I").get<double>();
    if (j.contains("beta_Q")) p.beta_Q = j.at("beta_Q").get<double>();
    if (j.contains("sigma")) p.sigma = j.at("sigma").get<double>();
    if (j.contains("delta")) p.delta = j.at("delta").get<double>();
    if (j.contains("gamma")) p.gamma = j.at("gamma").get<double>();
    if (j.contains("mu")) p.mu = j.at("mu").get<double>();
    return p;
}

void check_param_set(const std::string& code, const ParamSet& p) {
    const std::pair<const char*, double> fields[] = {
        {"beta_I", p.beta_I}, {"beta_Q", p.beta_Q}, {"sigma", p.sigma},
        {"delta", p.delta},   {"gamma", p.gamma},   {"mu", p.mu}};
    for (const auto& [name, v] : fields) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw ValidationError("region " + code + ": parameter " + name +
                                  " must lie in [0, 1], got " + std::to_string(v));
    }
    if (p.beta_Q >= p.beta_I)
        throw ValidationError("region " + code +
                              ": quarantined transmission must be strictly lower (beta_Q < beta_I)");
    // Daily exit fractions from I are shares of one day's mass; their sum
    // above 1 overdraws the compartment under the Delta-t = 1 update.
    if (p.delta + p.gamma + p.mu > 1.0 + 1e-12)
        throw ValidationError("region " + code + ": delta + gamma + mu must not exceed 1");
}

bool valid_code(const std::string& code) {
    if (code.empty() || code.size() > 8) return false;
    return std::all_of(code.begin(), code.end(), [](unsigned char c) {
        return std::isupper(c) || std::isdigit(c);
    });
}

}  // namespace

MobilitySchedule generate_synthetic_flows(const RegionTable& regions, Date start, int days,
                                          const SyntheticFlowSpec& spec) {
    const int n = regions.size();
    MobilitySchedule sched(start, n, days);
    for (int d = 0; d < days; ++d) {
        const std::int64_t dow = ((start + d).days_since_epoch() % 7 + 7) % 7;
        const double mod = 1.0 + spec.weekday_amplitude * kWeekdayPattern[dow];
        FlowMatrix& m = sched.at(d);
        for (int o = 0; o < n; ++o) {
            for (int i = 0; i < n; ++i) {
                if (o == i) continue;
                double scale = 1.0;
                const auto it = spec.pair_scale.find(regions.codes[o] + "->" + regions.codes[i]);
                if (it != spec.pair_scale.end()) scale = it->second;
                m.at(o, i) = spec.base * scale * mod;
            }
        }
    }
    return sched;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    std::string base_dir = ".";
    if (const auto slash = path.find_last_of('/'); slash != std::string::npos)
        base_dir = path.substr(0, slash);
    return parse_scenario_json(ss.str(), base_dir);
}

ScenarioConfig parse_scenario_json(const std::string& text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario file is not valid JSON: ") + e.what());
    }

    ScenarioConfig cfg;
    try {
        cfg.name = j.value("name", "scenario");
        cfg.start_date = Date::parse(j.at("start_date").get<std::string>());
        cfg.end_date = Date::parse(j.at("end_date").get<std::string>());
        cfg.warmup_days = j.value("warmup_days", 21);
        cfg.horizon_weeks = j.value("horizon_weeks", 6);
        cfg.strategy = strategy_from_name(j.value("strategy", "tir"));
        cfg.seed = j.value("seed", 0ull);
        cfg.communication_rounds = j.value("communication_rounds", 2);
        cfg.epsilon = j.value("epsilon", kDefaultEpsilon);
        if (j.contains("sis")) {
            const auto& s = j.at("sis");
            cfg.sis.factor = s.value("factor", 0.5);
            cfg.sis.window_days = s.value("window_days", 14);
            cfg.sis.redistribute = s.value("redistribute", true);
        }
        if (j.contains("tis")) {
            const auto& t = j.at("tis");
            cfg.tis.eta = t.value("eta", 1.0);
            cfg.tis.window_days = t.value("window_days", 14);
        }
        for (const auto& cs : j.value("cycle_starts", std::vector<std::string>{}))
            cfg.cycle_starts.push_back(Date::parse(cs));

        for (const auto& rj : j.at("regions")) {
            Region r;
            r.id.code = rj.at("code").get<std::string>();
            r.backend = rj.value("backend", "expert");
            const auto& init = rj.at("initial");
            r.initial.S = init.value("S", 0.0);
            r.initial.E = init.value("E", 0.0);
            r.initial.I = init.value("I", 0.0);
            r.initial.Q = init.value("Q", 0.0);
            r.initial.R = init.value("R", 0.0);
            r.initial.D = init.value("D", 0.0);
            r.params.base = parse_params(rj.at("params"), ParamSet{});
            if (rj.contains("param_steps")) {
                for (const auto& st : rj.at("param_steps")) {
                    const Date from = Date::parse(st.at("from").get<std::string>());
                    const ParamSet prev =
                        r.params.steps.empty() ? r.params.base : r.params.steps.back().second;
                    r.params.steps.emplace_back(from, parse_params(st, prev));
                }
            }
            if (rj.contains("scripted_tir")) {
                for (const auto& [origin, fr] : rj.at("scripted_tir").items())
                    r.scripted_tir[origin] = fr.get<std::vector<double>>();
            }
            cfg.regions.push_back(std::move(r));
        }

        RegionTable table;
        for (const auto& r : cfg.regions) table.codes.push_back(r.id.code);

        const auto& fj = j.at("flows");
        const std::string kind = fj.at("kind").get<std::string>();
        if (kind == "synthetic") {
            SyntheticFlowSpec spec;
            spec.base = fj.value("base", 1000.0);
            spec.weekday_amplitude = fj.value("weekday_amplitude", 0.0);
            if (fj.contains("pair_scale"))
                for (const auto& [k, v] : fj.at("pair_scale").items())
                    spec.pair_scale[k] = v.get<double>();
            // Generated schedules always cover the last cycle's tail.
            const int guard = cfg.horizon_weeks * 7;
            const int days = static_cast<int>(cfg.end_date - cfg.start_date) + guard;
            cfg.baseline = generate_synthetic_flows(table, cfg.start_date, days, spec);
        } else if (kind == "inline") {
            const Date fstart = Date::parse(fj.at("start_date").get<std::string>());
            const auto& days = fj.at("days");
            const int n = table.size();
            cfg.baseline = MobilitySchedule(fstart, n, static_cast<int>(days.size()));
            int di = 0;
            for (const auto& dj : days) {
                const auto vals = dj.get<std::vector<double>>();
                if (static_cast<int>(vals.size()) != n * n)
                    throw ParseError("inline flows day " + std::to_string(di) +
                                     ": expected " + std::to_string(n * n) + " entries");
                cfg.baseline.at(di).v = vals;
                ++di;
            }
        } else if (kind == "csv") {
            const std::string p = fj.at("path").get<std::string>();
            const std::string full = p.starts_with('/') ? p : base_dir + "/" + p;
            cfg.baseline = load_flows(full, table);
        } else {
            throw ParseError("unknown flows kind '" + kind + "'");
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario field error: ") + e.what());
    }

    cfg.source_json = j.dump();  // nlohmann orders keys; stable across runs
    return cfg;
}

std::vector<Date> cycle_calendar(const ScenarioConfig& config) {
    if (!config.cycle_starts.empty()) return config.cycle_starts;
    std::vector<Date> starts;
    Date c = config.start_date + config.warmup_days;
    while (c < config.end_date) {
        starts.push_back(c);
        c += config.cycle_days();
    }
    return starts;
}

Date schedule_horizon(const ScenarioConfig& config) {
    const auto starts = cycle_calendar(config);
    Date horizon = config.end_date;
    if (!starts.empty()) {
        const Date last_end = starts.back() + config.cycle_days();
        if (last_end > horizon) horizon = last_end;
    }
    return horizon;
}

ScenarioConfig validate_scenario(ScenarioConfig config) {
    if (config.regions.empty()) throw ValidationError("scenario has no regions");
    if (config.end_date <= config.start_date)
        throw ValidationError("end_date must be after start_date");
    if (config.warmup_days < 0 || config.warmup_days >= config.sim_days())
        throw ValidationError("warmup_days must lie inside the simulation range");
    if (config.horizon_weeks < 1) throw ValidationError("planning horizon H must be >= 1 week");
    if (config.communication_rounds < 1)
        throw ValidationError("communication_rounds must be >= 1");
    if (!(config.epsilon > 0.0)) throw ValidationError("epsilon must be positive");

    std::set<std::string> seen;
    for (std::size_t i = 0; i < config.regions.size(); ++i) {
        Region& r = config.regions[i];
        if (!valid_code(r.id.code))
            throw ValidationError("region code '" + r.id.code +
                                  "' must be 1-8 uppercase letters/digits");
        if (!seen.insert(r.id.code).second)
            throw ValidationError("duplicate region code '" + r.id.code + "'");
        r.id.index = static_cast<int>(i);

        const double fields[] = {r.initial.S, r.initial.E, r.initial.I,
                                 r.initial.Q, r.initial.R, r.initial.D};
        for (double v : fields)
            if (!std::isfinite(v) || v < 0.0)
                throw ValidationError("region " + r.id.code + ": negative population count");
        if (!(r.initial.living() > 0.0))
            throw ValidationError("region " + r.id.code + ": living population must be positive");

        check_param_set(r.id.code, r.params.base);
        Date prev = config.start_date;
        bool first = true;
        for (const auto& [from, ps] : r.params.steps) {
            if (!first && from <= prev)
                throw ValidationError("region " + r.id.code + ": param steps must be dated ascending");
            check_param_set(r.id.code, ps);
            prev = from;
            first = false;
        }

        if (r.backend != "scripted" && r.backend != "random" && r.backend != "expert" &&
            r.backend != "remote")
            throw ValidationError("region " + r.id.code + ": unknown backend '" + r.backend + "'");
        for (const auto& [origin, fr] : r.scripted_tir) {
            bool known = false;
            for (const auto& other : config.regions)
                if (other.id.code == origin) known = true;
            if (!known)
                throw ValidationError("region " + r.id.code + ": scripted_tir names unknown region '" +
                                      origin + "'");
            if (static_cast<int>(fr.size()) != config.horizon_weeks)
                throw ValidationError("region " + r.id.code + ": scripted_tir for " + origin +
                                      " must have H=" + std::to_string(config.horizon_weeks) +
                                      " fractions");
        }
    }

    // Cycle calendar: either auto-tiled or explicit, contiguous in H-week
    // steps starting at the end of warm-up, and covering end_date.
    const Date first_cycle = config.start_date + config.warmup_days;
    if (!config.cycle_starts.empty()) {
        const auto& cs = config.cycle_starts;
        if (cs.front() != first_cycle)
            throw ValidationError("cycle calendar must start at the end of warm-up (" +
                                  first_cycle.to_string() + ")");
        for (std::size_t i = 1; i < cs.size(); ++i)
            if (cs[i] - cs[i - 1] != config.cycle_days())
                throw ValidationError("cycle calendar gap: cycles must be contiguous H-week blocks");
        if (cs.back() + config.cycle_days() < config.end_date)
            throw ValidationError("cycle calendar gap: calendar ends before simulation end date");
    }

    const int n = config.num_regions();
    if (config.baseline.regions() != n)
        throw ValidationError("mobility schedule region count (" +
                              std::to_string(config.baseline.regions()) +
                              ") does not match scenario regions (" + std::to_string(n) + ")");
    const Date horizon = schedule_horizon(config);
    for (Date d = config.start_date; d < horizon; d += 1)
        if (!config.baseline.covers(d))
            throw ValidationError("mobility schedule does not cover " + d.to_string());
    for (int day = 0; day < config.baseline.days(); ++day) {
        const FlowMatrix& m = config.baseline.at(day);
        for (int o = 0; o < n; ++o) {
            for (int i = 0; i < n; ++i) {
                const double f = m.at(o, i);
                if (!std::isfinite(f) || f < 0.0)
                    throw ValidationError("negative mobility flow on day " + std::to_string(day));
                if (o == i && f != 0.0)
                    throw ValidationError("mobility schedule diagonal must be zero (day " +
                                          std::to_string(day) + ")");
            }
        }
    }

    config.validated = true;
    return config;
}

}  // namespace epiflow
