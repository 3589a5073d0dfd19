#pragma once

#include <stdexcept>
#include <string>

namespace ordent {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfDomainError : Error {
    using Error::Error;
};

struct DomainMismatchError : Error {
    using Error::Error;
};

struct NotInSigmaAlgebraError : Error {
    using Error::Error;
};

/// Exact tie between two window entries under the strict policy.
struct TieError : Error {
    using Error::Error;
};

/// Tie under the discard policy; estimators catch this and count the window.
struct TieDiscard : TieError {
    using TieError::TieError;
};

struct InconsistentComparisonsError : Error {
    using Error::Error;
};

struct EmptyDistributionError : Error {
    using Error::Error;
};

struct CellExplosionError : Error {
    using Error::Error;
};

struct BudgetExceededError : Error {
    using Error::Error;
};

struct EmptyCylinderError : Error {
    using Error::Error;
};

struct SearchExhaustedError : Error {
    double best_measure_found = 0.0;
    explicit SearchExhaustedError(const std::string& msg, double best)
        : Error(msg), best_measure_found(best) {}
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace ordent
