#pragma once

#include <stdexcept>
#include <string>

namespace apex {

// Base class for all engine errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Market parameters outside the admissible region (delta' <= 0, alpha == 0, ...).
struct ParameterError : Error { using Error::Error; };

// State point outside the wedge, or arguments outside a function's domain.
struct DomainError : Error { using Error::Error; };

// Evaluation exactly on a singular locus (x == extremum with j = 1).
struct SingularityError : Error { using Error::Error; };

// An iteration failed to reach its tolerance within its budget.
struct ConvergenceError : Error { using Error::Error; };

// A bracketed root solve found no sign change.
struct RootError : Error { using Error::Error; };

// A boundary equation has no root for this extremum value (outside the
// existence range); callers translate this into a domain threshold.
struct NoRootError : Error { using Error::Error; };

// A linear system or denominator degenerated (should not happen for valid params).
struct DegenerateError : Error { using Error::Error; };

// Adaptive ODE integration was forced below the minimum step size.
struct StepSizeError : Error { using Error::Error; };

// Conditioned-SDE simulation capped the singular drift too often.
struct StepError : Error { using Error::Error; };

// A path visited extremum values not covered by the supplied boundary grid.
struct CoverageError : Error { using Error::Error; };

// Invalid simulation or run configuration.
struct ConfigError : Error { using Error::Error; };

// Valuation requested without the boundary curve it needs.
struct MissingBoundaryError : Error { using Error::Error; };

}  // namespace apex
