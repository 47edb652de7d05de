#ifndef EOTMAP_ERRORS_HPP
#define EOTMAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace eotmap {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or non-finite input, or a violated precondition on values.
class InputError : public Error {
public:
    using Error::Error;
};

/// Shapes or requested ranks that do not fit together.
class DimensionError : public InputError {
public:
    using InputError::InputError;
};

/// The median squared distance is zero, so no bandwidth can be derived.
class DegenerateBandwidthError : public InputError {
public:
    using InputError::InputError;
};

/// Non-finite intermediate values, typically a bandwidth that is too small
/// for the scale of the data.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Sinkhorn ran out of iterations before reaching the requested tolerance.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, double residual, int iterations)
        : NumericalError(what), residual_(residual), iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

/// A transport plan whose leading singular pair is not the trivial one.
/// Almost always means the scaling was stopped too early.
class PlanNotConvergedError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace eotmap

#endif  // EOTMAP_ERRORS_HPP
