#pragma once

#include <stdexcept>
#include <string>

namespace qsemi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Input violates a type invariant (non-Hermitian, negative eigenvalue, bad trace, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A matrix function was asked to evaluate outside its domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The state is rank deficient where full rank is required, or an operator
/// has components outside the support of the state.
class SupportError : public Error {
public:
    using Error::Error;
};

/// A finite-difference stencil left the set of valid density operators.
class BoundaryError : public Error {
public:
    using Error::Error;
};

/// An equality constraint does not hold at the true state.
class InconsistentConstraint : public Error {
public:
    using Error::Error;
};

/// The derivative of the parameter of interest is not in the range of the
/// Helstrom information matrix; no unbiased estimator exists.
class RangeConditionError : public Error {
public:
    using Error::Error;
};

/// The efficient score vanishes, so the bound is infinite.
class InfiniteBound : public Error {
public:
    using Error::Error;
};

/// An iterative or truncated computation did not reach its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

} // namespace qsemi
