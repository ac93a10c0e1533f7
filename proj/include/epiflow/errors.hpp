#pragma once

#include <stdexcept>
#include <string>

namespace epiflow {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scenario or action violates a documented invariant.
struct ValidationError : Error {
    using Error::Error;
};

// Malformed input text: CSV rows, scenario files, agent responses.
struct ParseError : Error {
    using Error::Error;
};

// A compartment update would go negative beyond tolerance.
struct InstabilityError : Error {
    using Error::Error;
};

// Remote or scripted decision backend failed after retries.
struct BackendError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// Request exceeds a hard size limit (e.g. exact Shapley enumeration).
struct SizeError : Error {
    using Error::Error;
};

}  // namespace epiflow
