#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace optoforce {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid parameters, malformed configuration or unreadable input data.
struct InputError : Error {
    using Error::Error;
};

/// A basis truncation would exceed the configured hard cap.
struct TruncationError : Error {
    using Error::Error;
};

/// The force could not be inferred (no ZPL candidate, empty prior, flat objective).
struct InferenceError : Error {
    using Error::Error;
};

/// The dynamical oracle refuses a discretization that cannot reach the long-time window.
struct OracleRefusal : Error {
    using Error::Error;
};

/// Norm drift during time evolution exceeded tolerance.
struct NormDriftError : Error {
    using Error::Error;
};

using WarningHandler = std::function<void(std::string_view)>;

// Warnings are advisory diagnostics (grid too coarse, sideband regime violated, ...).
// The default handler prints to stderr. An empty handler silences warnings.
// Returns the handler that was installed before.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace optoforce
