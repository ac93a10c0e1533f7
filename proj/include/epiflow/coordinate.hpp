#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "epiflow/backend.hpp"
#include "epiflow/observation.hpp"

namespace epiflow {

struct TranscriptEntry {
    int cycle = 0;
    int round = 0;
    std::string region;
    std::string prompt_hash;
    std::string raw_response;  // nonempty only for text backends
    std::string parsed;        // compact JSON of the parsed action
    bool repaired = false;
    bool fallback = false;
};

struct CoordinateOptions {
    int cycle = 0;
    int rounds = 2;  // K: propose, then revise with peer messages
    Strategy strategy = Strategy::Tir;
    int horizon_weeks = 6;
    Date cycle_start;
    SisDefaults sis;
    TisDefaults tis;
    std::uint64_t episode_seed = 0;
};

struct RoundResult {
    std::vector<PolicyAction> actions;  // final round, aligned with observations
    std::vector<Message> final_messages;
    std::vector<TranscriptEntry> transcript;
    int degradations = 0;     // regions that fell back this cycle
    int decision_calls = 0;   // N x K
    int ingestion_events = 0; // N x (K - 1)
};

/// K synchronized decision rounds. Round 1 decides from observations alone;
/// each later round re-decides with all peers' previous-round messages
/// appended. Rounds are barriers: no message from round k is visible before
/// every round-k decision completes. A backend that still fails after its own
/// retry budget degrades that region to a uniform TIR (or no-op SIS/TIS)
/// while the others proceed.
RoundResult coordinate_round(const std::vector<AgentBackend*>& agents,
                             const std::vector<Observation>& observations,
                             const CoordinateOptions& options);

std::uint64_t decision_seed(std::uint64_t episode_seed, int region, int cycle, int round);

}  // namespace epiflow
