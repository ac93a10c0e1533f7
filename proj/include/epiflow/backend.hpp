#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "epiflow/observation.hpp"
#include "epiflow/policy.hpp"
#include "epiflow/prompt.hpp"

namespace epiflow {

struct DecideContext {
    std::uint64_t seed = 0;  // derived from (episode seed, region, cycle, round)
    Strategy strategy = Strategy::Tir;
    int horizon_weeks = 6;
    Date cycle_start;
    SisDefaults sis;
    TisDefaults tis;
};

/// A policy decision unit. Implementations must be deterministic given the
/// context seed; failures throw BackendError and are handled by the
/// coordination layer (retry, then uniform/no-op fallback).
class AgentBackend {
public:
    virtual ~AgentBackend() = default;
    virtual PolicyAction decide(const Observation& obs, const std::vector<Message>& messages,
                                const DecideContext& ctx) = 0;
    virtual std::string name() const = 0;
};

/// Horizon templates used by the expert rule, expressed as early/middle/late
/// phase shares spread uniformly inside ceil-split phases.
std::vector<double> strict_first_template(int horizon_weeks);   // shares 0.10/0.30/0.60
std::vector<double> relaxed_first_template(int horizon_weeks);  // shares 0.50/0.30/0.20
std::vector<double> uniform_template(int horizon_weeks);

/// Deterministic heuristic: origins ranked by (IR trend x projected inflow).
/// Scores near the top of the spread get the strict-first template, near the
/// bottom the relaxed-first template, ties go uniform. For SIS/TIS the
/// top-scoring origin is targeted.
PolicyAction expert_heuristic(const Observation& obs, const DecideContext& ctx);

/// Replays fixed per-origin fractions (TIR) or a fixed target each cycle.
class ScriptedBackend : public AgentBackend {
public:
    explicit ScriptedBackend(std::map<std::string, std::vector<double>> tir_by_origin)
        : tir_(std::move(tir_by_origin)) {}
    explicit ScriptedBackend(std::string target_origin) : target_(std::move(target_origin)) {}

    PolicyAction decide(const Observation&, const std::vector<Message>&,
                        const DecideContext&) override;
    std::string name() const override { return "scripted"; }

private:
    std::map<std::string, std::vector<double>> tir_;
    std::string target_;
};

/// Seeded draws over the valid action space: symmetric Dirichlet(1) fractions
/// per origin for TIR, a uniformly random origin for SIS/TIS.
class RandomBackend : public AgentBackend {
public:
    PolicyAction decide(const Observation&, const std::vector<Message>&,
                        const DecideContext&) override;
    std::string name() const override { return "random"; }
};

class ExpertBackend : public AgentBackend {
public:
    PolicyAction decide(const Observation& obs, const std::vector<Message>& messages,
                        const DecideContext& ctx) override {
        (void)messages;
        return expert_heuristic(obs, ctx);
    }
    std::string name() const override { return "expert"; }
};

/// Test seam: wraps an arbitrary decision function.
class FunctionBackend : public AgentBackend {
public:
    using Fn = std::function<PolicyAction(const Observation&, const std::vector<Message>&,
                                          const DecideContext&)>;
    explicit FunctionBackend(Fn fn, std::string label = "function")
        : fn_(std::move(fn)), label_(std::move(label)) {}
    PolicyAction decide(const Observation& o, const std::vector<Message>& m,
                        const DecideContext& c) override {
        return fn_(o, m, c);
    }
    std::string name() const override { return label_; }

private:
    Fn fn_;
    std::string label_;
};

struct RemoteConfig {
    std::string endpoint;  // e.g. http://host:port/v1/complete
    std::string token;
    std::string model;
    double temperature = 0.0;
    int max_tokens = 1024;
    int timeout_seconds = 60;
    std::vector<int> backoff_ms = {1000, 2000, 4000};  // retry budget 3

    /// EPIFLOW_ENDPOINT, EPIFLOW_TOKEN, EPIFLOW_MODEL.
    static RemoteConfig from_env();
};

/// Text-in/text-out HTTP adapter. POSTs {model, prompt, max_tokens,
/// temperature} as JSON and expects {"text": ...}; the response is parsed
/// with parse_action. Transport or parse failures consume the retry budget
/// with exponential backoff before surfacing BackendError.
class RemoteTextBackend : public AgentBackend {
public:
    explicit RemoteTextBackend(RemoteConfig config) : config_(std::move(config)) {}

    PolicyAction decide(const Observation& obs, const std::vector<Message>& messages,
                        const DecideContext& ctx) override;
    std::string name() const override { return "remote"; }

    const std::string& last_raw_response() const { return last_raw_; }

private:
    RemoteConfig config_;
    std::string last_raw_;
};

/// Backend factory used by the orchestrator for per-region assignments.
std::shared_ptr<AgentBackend> make_backend(const Region& region, const ScenarioConfig& config);

}  // namespace epiflow
