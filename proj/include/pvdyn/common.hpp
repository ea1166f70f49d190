#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace pvdyn {

/// Per-period quantity over one billing cycle (length = periods_per_cycle).
/// Array semantics: componentwise products and clamps are the common case.
using PeriodVec = Eigen::ArrayXd;

// ---------------------------------------------------------------------------
// Error types. Infeasibility of a break-even tariff is NOT an error (it is
// the death-spiral outcome and is signalled through std::optional); these are
// genuine contract violations or failed numerical preconditions.
// ---------------------------------------------------------------------------

struct DimensionError : std::invalid_argument {
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

struct DomainError : std::domain_error {
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Calibration residual system has no admissible root.
struct NoSolutionError : std::runtime_error {
    explicit NoSolutionError(const std::string& what) : std::runtime_error(what) {}
};

/// A threshold search was asked to bisect a range whose endpoints agree.
struct NoBracketError : std::runtime_error {
    explicit NoBracketError(const std::string& what) : std::runtime_error(what) {}
};

/// No capacity admits a revenue-adequate tariff at the given retailer cost.
struct NoFeasibleRegionError : std::runtime_error {
    explicit NoFeasibleRegionError(const std::string& what) : std::runtime_error(what) {}
};

/// A potential curve holds no usable feasible samples.
struct EmptyFeasibleRegionError : std::runtime_error {
    explicit EmptyFeasibleRegionError(const std::string& what) : std::runtime_error(what) {}
};

/// Even the zero-markup connection charge fails to stabilize adoption;
/// indicates an internal inconsistency rather than a modelling outcome.
struct NoStabilizingChargeError : std::runtime_error {
    explicit NoStabilizingChargeError(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration file is syntactically or semantically invalid.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pvdyn
