#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adamregret {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Hyperparameters outside their admissible ranges (including gamma >= 1).
class InvalidParams : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

/// A trajectory record whose step index does not follow the previous one.
class SequencingError : public Error {
public:
    using Error::Error;
};

/// Numeric failure attached to an optimizer step. step() is 0 when the
/// failure is not tied to a step (e.g. a problem evaluated at a nonfinite point).
class NumericError : public Error {
public:
    NumericError(const std::string& what, std::size_t step)
        : Error(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Nonfinite gradient component or nonfinite weights.
class NumericInputError : public NumericError {
public:
    using NumericError::NumericError;
};

/// epsilon == 0 with vhat == 0 while mhat != 0.
class DivisionHazardError : public NumericError {
public:
    using NumericError::NumericError;
};

/// The summed objective does not attain its infimum (e.g. separable logistic data).
class UnboundedMinimizerError : public Error {
public:
    using Error::Error;
};

/// Minimizer computed for a different horizon than the trajectory it is paired with.
class HorizonMismatch : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// A caller-side contract was violated; carries the offending (t, i) where relevant.
class PreconditionError : public Error {
public:
    PreconditionError(const std::string& what, std::size_t t, std::size_t i)
        : Error(what), t_(t), i_(i) {}
    std::size_t t() const noexcept { return t_; }
    std::size_t i() const noexcept { return i_; }

private:
    std::size_t t_;
    std::size_t i_;
};

/// Malformed configuration or problem spec text.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace adamregret
