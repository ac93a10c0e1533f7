#include "epiflow/prompt.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace epiflow {

using nlohmann::json;

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

const char* strategy_task(Strategy s) {
    switch (s) {
        case Strategy::Tir:
            return "determine the inbound traffic allocation into";
        case Strategy::Sis:
            return "select one high-risk origin state whose inbound traffic into";
        case Strategy::Tis:
            return "select one origin state whose inbound travelers into";
    }
    return "";
}

}  // namespace

std::string render_prompt(const Observation& obs, const std::vector<Message>& messages,
                          Strategy strategy) {
    const int H = obs.horizon_weeks;
    std::ostringstream p;

    p << "# System Guidance:\n";
    p << "You are the epidemic control & mobility policy assistant for state " << obs.region
      << ". Your task is to recommend traffic control policies for this state to slow disease "
         "spread. ";
    if (strategy == Strategy::Tir) {
        p << "For each origin state, " << strategy_task(strategy) << " " << obs.region
          << " for the next " << H << " weeks. Total inbound Flow over " << H
          << " weeks must stay constant (equal to the ground truth); you may adjust weekly "
             "proportions.\n";
    } else if (strategy == Strategy::Sis) {
        p << "For this decision round, " << strategy_task(strategy) << " " << obs.region
          << " will be suppressed for the coming window. Each decision round targets only one "
             "origin state.\n";
    } else {
        p << "For this decision round, " << strategy_task(strategy) << " " << obs.region
          << " will be screened on arrival for the coming window. Each decision round targets "
             "only one origin state.\n";
    }

    p << "\n# Inputs:\n";
    p << "You will be given the following information for your task:\n";
    p << "- State-level pandemic statistics: current population composition of state "
      << obs.region << " and its neighboring states, including Susceptible (S), Exposed (E), "
         "Infected (I), Confirmed (Q), Recovered (R), Deaths (D)\n";
    auto stats_line = [&](const RegionSummary& s) {
        p << "    " << s.code << ": S=" << num(s.state.S) << " E=" << num(s.state.E)
          << " I=" << num(s.state.I) << " Q=" << num(s.state.Q) << " R=" << num(s.state.R)
          << " D=" << num(s.state.D) << " | recent IR=" << num(s.ir_recent)
          << " DR=" << num(s.dr_recent) << " ACR=" << num(s.acr) << " | R_t=";
        if (s.rt_defined)
            p << num(s.rt_mean);
        else
            p << "n/a";
        p << "\n";
    };
    stats_line(obs.local);
    for (const auto& nb : obs.neighbors) stats_line(nb);

    p << "- Historical inter-state mobility information: Past 21-day average daily inbound flow "
         "(from other state to " << obs.region << ")";
    if (obs.short_history) p << " [short history]";
    p << "\n";
    for (const auto& o : obs.origins)
        p << "    " << o.code << " -> " << obs.region << ": " << num(o.hist_daily_avg)
          << " per day\n";

    p << "- Planning-horizon mobility baselines: average daily inbound flow for the upcoming "
      << H * 7 << " days\n";
    for (const auto& o : obs.origins) {
        p << "    " << o.code << " -> " << obs.region << ": " << num(o.projected_daily_avg)
          << " per day (weekly totals:";
        for (double w : o.weekly_projection) p << " " << num(w);
        p << ")\n";
    }

    if (!messages.empty()) {
        p << "\n# Peer Messages:\n";
        for (const auto& m : messages) p << "- " << serialize_message(m) << "\n";
    }

    p << "\n# Constraints:\n";
    p << "You need to consider the following constraints:\n";
    if (strategy == Strategy::Tir) {
        p << "- output " << H << " fractions for each origin state i, [p_i_1, ..., p_i_" << H
          << "] with sum(p_i_m) = 1, and p_i_m > 0\n";
        p << "- Week m inbound flow from origin state i = Total Flow * p_i_m\n";
        p << "- Low p_i_m means strict mobility control; high p_i_m means relaxed control\n";
    } else {
        p << "- name exactly one origin state out of:";
        for (const auto& o : obs.origins) p << " " << o.code;
        p << "\n";
        if (strategy == Strategy::Sis)
            p << "- that origin's inbound flow will be reduced for the coming window\n";
        else
            p << "- that origin's exposed and infected travelers will be quarantined on arrival\n";
    }

    p << "\n# Final Output:\n";
    p << "Organize your final answer as following:\n";
    p << "- think_process: up to 200 words summary of reasoning process.\n";
    if (strategy == Strategy::Tir) {
        p << "- refined_solution: {\"state_i\": [p_i_1, ..., p_i_" << H << "], ...} covering";
        for (const auto& o : obs.origins) p << " " << o.code;
        p << "\n";
    } else {
        p << "- refined_solution: {\"target_state\": \"XX\"}\n";
    }
    return p.str();
}

namespace {

json extract_refined_solution(const std::string& response) {
    const auto key = response.find("refined_solution");
    if (key == std::string::npos)
        throw ParseError("response is missing refined_solution");
    const auto brace = response.find('{', key);
    if (brace == std::string::npos)
        throw ParseError("refined_solution has no JSON object");
    int depth = 0;
    for (std::size_t i = brace; i < response.size(); ++i) {
        if (response[i] == '{') ++depth;
        if (response[i] == '}') {
            --depth;
            if (depth == 0) {
                try {
                    return json::parse(response.substr(brace, i - brace + 1));
                } catch (const json::exception& e) {
                    throw ParseError(std::string("refined_solution is not valid JSON: ") +
                                     e.what());
                }
            }
        }
    }
    throw ParseError("refined_solution JSON object is unterminated");
}

std::string strip_state_prefix(std::string key) {
    if (key.rfind("state_", 0) == 0) key = key.substr(6);
    return key;
}

}  // namespace

PolicyAction parse_action(const std::string& response, const ParseSpec& spec) {
    const json sol = extract_refined_solution(response);
    if (!sol.is_object()) throw ParseError("refined_solution must be a JSON object");

    if (spec.strategy == Strategy::Tir) {
        TirAllocation alloc;
        alloc.dest = spec.acting_dest;
        std::map<std::string, std::vector<double>> raw;
        for (const auto& [k, v] : sol.items()) {
            const std::string code = strip_state_prefix(k);
            bool expected = false;
            for (const auto& o : spec.expected_origins) expected |= o == code;
            if (!expected) throw ParseError("refined_solution names unknown region '" + code + "'");
            if (raw.count(code)) throw ParseError("refined_solution repeats region '" + code + "'");
            std::vector<double> fr;
            try {
                fr = v.get<std::vector<double>>();
            } catch (const json::exception&) {
                throw ParseError("fractions for '" + code + "' are not a numeric array");
            }
            if (static_cast<int>(fr.size()) != spec.horizon_weeks)
                throw ParseError("fractions for '" + code + "' have length " +
                                 std::to_string(fr.size()) + ", expected " +
                                 std::to_string(spec.horizon_weeks));
            raw[code] = std::move(fr);
        }
        for (const auto& o : spec.expected_origins)
            if (!raw.count(o)) throw ParseError("refined_solution is missing region '" + o + "'");
        for (auto& [code, fr] : raw) alloc.by_origin[code] = normalize_tir(fr);
        return alloc;
    }

    // SIS / TIS: exactly one valid origin.
    std::string target;
    for (const char* key : {"target_state", "state", "target"}) {
        if (sol.contains(key) && sol.at(key).is_string()) {
            target = strip_state_prefix(sol.at(key).get<std::string>());
            break;
        }
    }
    if (target.empty()) throw ParseError("refined_solution does not name a target_state");
    bool expected = false;
    for (const auto& o : spec.expected_origins) expected |= o == target;
    if (!expected) throw ParseError("target_state '" + target + "' is not a known origin");

    if (spec.strategy == Strategy::Sis) {
        SisOrder order;
        order.dest = spec.acting_dest;
        order.origin = target;
        order.factor = spec.sis.factor;
        order.window_days = spec.sis.window_days;
        order.redistribute = spec.sis.redistribute;
        order.start = spec.cycle_start;
        return order;
    }
    TisOrder order;
    order.dest = spec.acting_dest;
    order.origin = target;
    order.eta = spec.tis.eta;
    order.window_days = spec.tis.window_days;
    order.start = spec.cycle_start;
    return order;
}

}  // namespace epiflow
