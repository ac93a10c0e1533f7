#include "epiflow/coordinate.hpp"

#include <json.hpp>

#include "epiflow/ingest.hpp"

namespace epiflow {

using nlohmann::json;

std::uint64_t decision_seed(std::uint64_t episode_seed, int region, int cycle, int round) {
    std::uint64_t x = episode_seed;
    for (std::uint64_t salt : {static_cast<std::uint64_t>(region) + 1,
                               static_cast<std::uint64_t>(cycle) + 1,
                               static_cast<std::uint64_t>(round) + 1}) {
        x += 0x9e3779b97f4a7c15ull * salt;
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ull;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebull;
        x ^= x >> 31;
    }
    return x;
}

namespace {

std::string action_json(const PolicyAction& a) {
    json j;
    j["type"] = action_type_name(a);
    if (const auto* tir = std::get_if<TirAllocation>(&a)) {
        json origins;
        for (const auto& [code, fr] : tir->by_origin) origins[code] = fr.p;
        j["by_origin"] = origins;
    } else if (const auto* sis = std::get_if<SisOrder>(&a)) {
        j["origin"] = sis->origin;
        j["factor"] = sis->factor;
        j["window_days"] = sis->window_days;
        j["redistribute"] = sis->redistribute;
    } else if (const auto* tis = std::get_if<TisOrder>(&a)) {
        j["origin"] = tis->origin;
        j["eta"] = tis->eta;
        j["window_days"] = tis->window_days;
    }
    return j.dump();
}

bool action_repaired(const PolicyAction& a) {
    if (const auto* tir = std::get_if<TirAllocation>(&a)) {
        for (const auto& [code, fr] : tir->by_origin)
            if (fr.repaired) return true;
    }
    return false;
}

PolicyAction fallback_action(const Observation& obs, const CoordinateOptions& opt) {
    if (opt.strategy != Strategy::Tir) return std::monostate{};
    TirAllocation alloc;
    alloc.dest = obs.region;
    for (const auto& o : obs.origins)
        alloc.by_origin[o.code] = normalize_tir(uniform_template(opt.horizon_weeks));
    return alloc;
}

}  // namespace

RoundResult coordinate_round(const std::vector<AgentBackend*>& agents,
                             const std::vector<Observation>& observations,
                             const CoordinateOptions& options) {
    if (agents.size() != observations.size())
        throw ValidationError("coordinate_round: one backend per observation required");
    if (options.rounds < 1) throw ValidationError("coordinate_round: rounds must be >= 1");

    const int n = static_cast<int>(agents.size());
    RoundResult result;
    result.actions.assign(n, std::monostate{});
    std::vector<bool> degraded(n, false);
    std::vector<Message> previous_round;

    for (int round = 1; round <= options.rounds; ++round) {
        // Messages from round k-1 become visible to every round-k decision.
        std::vector<std::vector<Message>> inbox(n);
        if (round > 1) {
            for (int i = 0; i < n; ++i) {
                for (const auto& m : previous_round)
                    if (m.sender != observations[i].region) inbox[i].push_back(m);
                ++result.ingestion_events;
            }
        }

        for (int i = 0; i < n; ++i) {
            DecideContext ctx;
            ctx.seed = decision_seed(options.episode_seed, i, options.cycle, round);
            ctx.strategy = options.strategy;
            ctx.horizon_weeks = options.horizon_weeks;
            ctx.cycle_start = options.cycle_start;
            ctx.sis = options.sis;
            ctx.tis = options.tis;

            TranscriptEntry entry;
            entry.cycle = options.cycle;
            entry.round = round;
            entry.region = observations[i].region;
            entry.prompt_hash =
                fnv1a64_hex(render_prompt(observations[i], inbox[i], options.strategy));

            ++result.decision_calls;
            try {
                result.actions[i] = agents[i]->decide(observations[i], inbox[i], ctx);
                if (auto* remote = dynamic_cast<RemoteTextBackend*>(agents[i]))
                    entry.raw_response = remote->last_raw_response();
            } catch (const std::exception& e) {
                result.actions[i] = fallback_action(observations[i], options);
                entry.fallback = true;
                if (!degraded[i]) {
                    degraded[i] = true;
                    ++result.degradations;
                }
                entry.raw_response = std::string("error: ") + e.what();
            }
            entry.parsed = action_json(result.actions[i]);
            entry.repaired = action_repaired(result.actions[i]);
            result.transcript.push_back(std::move(entry));
        }

        if (round < options.rounds) {
            previous_round.clear();
            for (int i = 0; i < n; ++i)
                previous_round.push_back(build_message(observations[i], result.actions[i]));
        }
    }

    for (int i = 0; i < n; ++i)
        result.final_messages.push_back(build_message(observations[i], result.actions[i]));
    return result;
}

}  // namespace epiflow
