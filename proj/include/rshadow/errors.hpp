#pragma once

#include <stdexcept>
#include <string>

namespace rshadow {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operands of mismatched qubit count / vector length.
struct DimensionError : Error {
    using Error::Error;
};

/// A spec failed its construction-time checks (non-CPTP Kraus set,
/// non-stochastic kernel, parameter out of range, ...).
struct ValidationError : Error {
    using Error::Error;
};

/// A local-group coefficient was requested for a support pattern that was
/// never calibrated.
struct MissingPatternError : Error {
    explicit MissingPatternError(const std::string& pattern)
        : Error("no calibrated coefficient for pattern " + pattern), pattern_(pattern) {}
    const std::string& pattern() const { return pattern_; }

  private:
    std::string pattern_;
};

/// Channel inversion blocked: some coefficient sits below the safety floor.
struct NonInvertibleError : Error {
    using Error::Error;
};

/// Sample planning has no solution in the requested parameter regime.
struct InfeasibleError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace rshadow
