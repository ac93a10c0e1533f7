#include "epiflow/backend.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace epiflow {

using nlohmann::json;

namespace {

std::vector<double> phase_template(int H, double early, double middle, double late) {
    const int b1 = (H + 2) / 3;
    const int b2 = (2 * H + 2) / 3;
    std::vector<double> p(H);
    for (int h = 0; h < b1; ++h) p[h] = early / b1;
    for (int h = b1; h < b2; ++h) p[h] = middle / (b2 - b1);
    for (int h = b2; h < H; ++h) p[h] = late / (H - b2);
    return p;
}

}  // namespace

std::vector<double> strict_first_template(int H) { return phase_template(H, 0.10, 0.30, 0.60); }
std::vector<double> relaxed_first_template(int H) { return phase_template(H, 0.50, 0.30, 0.20); }
std::vector<double> uniform_template(int H) {
    return std::vector<double>(H, 1.0 / static_cast<double>(H));
}

PolicyAction expert_heuristic(const Observation& obs, const DecideContext& ctx) {
    if (obs.origins.empty()) return std::monostate{};

    // Risk score of an origin: its own IR trend weighted by how much of it is
    // headed here over the horizon.
    struct Scored {
        std::string code;
        double score;
    };
    std::vector<Scored> scored;
    for (const auto& o : obs.origins) {
        double trend = 0.0;
        for (const auto& nb : obs.neighbors)
            if (nb.code == o.code) trend = nb.ir_trend;
        scored.push_back({o.code, trend * o.projected_total});
    }

    double lo = scored[0].score, hi = scored[0].score;
    for (const auto& s : scored) {
        lo = std::min(lo, s.score);
        hi = std::max(hi, s.score);
    }
    const double spread = hi - lo;
    const bool tied = spread <= 1e-12 * std::max(1.0, std::fabs(hi));

    if (ctx.strategy == Strategy::Tir) {
        TirAllocation alloc;
        alloc.dest = obs.region;
        double mean = 0.0;
        for (const auto& s : scored) mean += s.score;
        mean /= static_cast<double>(scored.size());
        for (const auto& s : scored) {
            std::vector<double> p;
            if (tied)
                p = uniform_template(ctx.horizon_weeks);
            else if (s.score >= mean + 0.25 * spread)
                p = strict_first_template(ctx.horizon_weeks);
            else if (s.score <= mean - 0.25 * spread)
                p = relaxed_first_template(ctx.horizon_weeks);
            else
                p = uniform_template(ctx.horizon_weeks);
            alloc.by_origin[s.code] = normalize_tir(p);
        }
        return alloc;
    }

    // SIS / TIS: target the top-scoring origin; lexicographic tiebreak.
    const Scored* top = &scored[0];
    for (const auto& s : scored)
        if (s.score > top->score || (s.score == top->score && s.code < top->code)) top = &s;

    if (ctx.strategy == Strategy::Sis) {
        SisOrder order;
        order.dest = obs.region;
        order.origin = top->code;
        order.factor = ctx.sis.factor;
        order.window_days = ctx.sis.window_days;
        order.redistribute = ctx.sis.redistribute;
        order.start = ctx.cycle_start;
        return order;
    }
    TisOrder order;
    order.dest = obs.region;
    order.origin = top->code;
    order.eta = ctx.tis.eta;
    order.window_days = ctx.tis.window_days;
    order.start = ctx.cycle_start;
    return order;
}

PolicyAction ScriptedBackend::decide(const Observation& obs, const std::vector<Message>&,
                                     const DecideContext& ctx) {
    if (ctx.strategy == Strategy::Tir) {
        TirAllocation alloc;
        alloc.dest = obs.region;
        for (const auto& o : obs.origins) {
            const auto it = tir_.find(o.code);
            if (it != tir_.end())
                alloc.by_origin[o.code] = normalize_tir(it->second);
            else
                alloc.by_origin[o.code] = normalize_tir(uniform_template(ctx.horizon_weeks));
        }
        return alloc;
    }
    if (target_.empty()) return std::monostate{};
    if (ctx.strategy == Strategy::Sis) {
        SisOrder order;
        order.dest = obs.region;
        order.origin = target_;
        order.factor = ctx.sis.factor;
        order.window_days = ctx.sis.window_days;
        order.redistribute = ctx.sis.redistribute;
        order.start = ctx.cycle_start;
        return order;
    }
    TisOrder order;
    order.dest = obs.region;
    order.origin = target_;
    order.eta = ctx.tis.eta;
    order.window_days = ctx.tis.window_days;
    order.start = ctx.cycle_start;
    return order;
}

PolicyAction RandomBackend::decide(const Observation& obs, const std::vector<Message>&,
                                   const DecideContext& ctx) {
    if (obs.origins.empty()) return std::monostate{};
    std::mt19937_64 rng(ctx.seed);

    if (ctx.strategy == Strategy::Tir) {
        TirAllocation alloc;
        alloc.dest = obs.region;
        std::exponential_distribution<double> expo(1.0);
        for (const auto& o : obs.origins) {
            // Dirichlet(1) via normalized Exp(1) draws.
            std::vector<double> p(ctx.horizon_weeks);
            for (double& v : p) v = expo(rng);
            alloc.by_origin[o.code] = normalize_tir(p);
        }
        return alloc;
    }

    std::uniform_int_distribution<std::size_t> pick(0, obs.origins.size() - 1);
    const std::string target = obs.origins[pick(rng)].code;
    if (ctx.strategy == Strategy::Sis) {
        SisOrder order;
        order.dest = obs.region;
        order.origin = target;
        order.factor = ctx.sis.factor;
        order.window_days = ctx.sis.window_days;
        order.redistribute = ctx.sis.redistribute;
        order.start = ctx.cycle_start;
        return order;
    }
    TisOrder order;
    order.dest = obs.region;
    order.origin = target;
    order.eta = ctx.tis.eta;
    order.window_days = ctx.tis.window_days;
    order.start = ctx.cycle_start;
    return order;
}

RemoteConfig RemoteConfig::from_env() {
    RemoteConfig c;
    if (const char* e = std::getenv("EPIFLOW_ENDPOINT")) c.endpoint = e;
    if (const char* t = std::getenv("EPIFLOW_TOKEN")) c.token = t;
    if (const char* m = std::getenv("EPIFLOW_MODEL")) c.model = m;
    return c;
}

PolicyAction RemoteTextBackend::decide(const Observation& obs,
                                       const std::vector<Message>& messages,
                                       const DecideContext& ctx) {
    if (config_.endpoint.empty())
        throw BackendError("remote backend has no endpoint (set EPIFLOW_ENDPOINT)");

    // Split "http://host:port/path" into client base and request path.
    std::string base = config_.endpoint, path = "/";
    const auto scheme = base.find("://");
    const auto slash = base.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (slash != std::string::npos) {
        path = base.substr(slash);
        base = base.substr(0, slash);
    }

    const std::string prompt = render_prompt(obs, messages, ctx.strategy);
    ParseSpec spec;
    spec.strategy = ctx.strategy;
    spec.acting_dest = obs.region;
    for (const auto& o : obs.origins) spec.expected_origins.push_back(o.code);
    spec.horizon_weeks = ctx.horizon_weeks;
    spec.cycle_start = ctx.cycle_start;
    spec.sis = ctx.sis;
    spec.tis = ctx.tis;

    json body;
    body["model"] = config_.model;
    body["prompt"] = prompt;
    body["max_tokens"] = config_.max_tokens;
    body["temperature"] = config_.temperature;
    const std::string payload = body.dump();

    std::string last_error;
    const int attempts = static_cast<int>(config_.backoff_ms.size());
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_ms[attempt - 1]));
        try {
            httplib::Client client(base);
            client.set_connection_timeout(config_.timeout_seconds, 0);
            client.set_read_timeout(config_.timeout_seconds, 0);
            httplib::Headers headers;
            if (!config_.token.empty())
                headers.emplace("Authorization", "Bearer " + config_.token);
            const auto res = client.Post(path, headers, payload, "application/json");
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status != 200) {
                last_error = "HTTP " + std::to_string(res->status);
                continue;
            }
            const json parsed = json::parse(res->body);
            last_raw_ = parsed.at("text").get<std::string>();
            return parse_action(last_raw_, spec);
        } catch (const ParseError& e) {
            last_error = e.what();  // malformed answer: re-prompt within the budget
        } catch (const std::exception& e) {
            last_error = e.what();
        }
    }
    throw BackendError("remote backend failed after " + std::to_string(attempts) +
                       " attempts: " + last_error);
}

std::shared_ptr<AgentBackend> make_backend(const Region& region, const ScenarioConfig& config) {
    (void)config;
    if (region.backend == "expert") return std::make_shared<ExpertBackend>();
    if (region.backend == "random") return std::make_shared<RandomBackend>();
    if (region.backend == "scripted") return std::make_shared<ScriptedBackend>(region.scripted_tir);
    if (region.backend == "remote")
        return std::make_shared<RemoteTextBackend>(RemoteConfig::from_env());
    throw ValidationError("unknown backend '" + region.backend + "'");
}

}  // namespace epiflow
