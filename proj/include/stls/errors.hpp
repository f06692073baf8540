#pragma once

#include <stdexcept>
#include <string>

namespace stls {

// Caller passed inputs that violate an operation's preconditions
// (shape mismatch, asymmetric matrix, out-of-range parameter, ...).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An iterative kernel failed to converge or a factorization hit a
// singular/rank-deficient input it cannot proceed with.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// TLS fit whose truncated design block is singular. Estimators catch this
// and stop with their best iterate.
class DegenerateFitError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace stls
