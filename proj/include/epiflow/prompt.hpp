#pragma once

#include <string>
#include <vector>

#include "epiflow/observation.hpp"
#include "epiflow/policy.hpp"

namespace epiflow {

/// Render the structured decision prompt: system guidance, inputs, received
/// peer messages (section omitted when empty), constraints, and the final
/// output schema naming think_process and refined_solution. Byte-identical
/// for identical inputs.
std::string render_prompt(const Observation& obs, const std::vector<Message>& messages,
                          Strategy strategy);

struct ParseSpec {
    Strategy strategy = Strategy::Tir;
    std::string acting_dest;
    std::vector<std::string> expected_origins;
    int horizon_weeks = 6;
    Date cycle_start;
    SisDefaults sis;
    TisDefaults tis;
};

/// Extract the refined_solution mapping from a backend response. TIR vectors
/// are routed through normalize_tir; SIS/TIS must name exactly one expected
/// origin. Throws ParseError on schema violations (missing mapping, unknown
/// or missing region, wrong vector length).
PolicyAction parse_action(const std::string& response, const ParseSpec& spec);

}  // namespace epiflow
