#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bandchol {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* name() const noexcept { return "Error"; }
};

/// Malformed or out-of-contract input (maps to CLI exit code 2).
class InputError : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "InputError"; }
};

class DimensionMismatch : public InputError {
public:
    using InputError::InputError;
    const char* name() const noexcept override { return "DimensionMismatch"; }
};

/// Numerical failure during estimation (maps to CLI exit code 3).
class NumericalError : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "NumericalError"; }
};

class SingularMatrix : public NumericalError {
public:
    using NumericalError::NumericalError;
    const char* name() const noexcept override { return "SingularMatrix"; }
};

/// Errors tied to a particular (1-based) column or clique index.
class IndexedNumericalError : public NumericalError {
public:
    IndexedNumericalError(const std::string& what, std::size_t index)
        : NumericalError(what + " (index " + std::to_string(index) + ")"), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class SingularDesign : public IndexedNumericalError {
public:
    explicit SingularDesign(std::size_t j)
        : IndexedNumericalError("regressor second-moment matrix is not invertible", j) {}
    const char* name() const noexcept override { return "SingularDesign"; }
};

class DegenerateResidual : public IndexedNumericalError {
public:
    explicit DegenerateResidual(std::size_t j)
        : IndexedNumericalError("residual variance is not positive", j) {}
    const char* name() const noexcept override { return "DegenerateResidual"; }
};

class TruncationMassZero : public IndexedNumericalError {
public:
    explicit TruncationMassZero(std::size_t j)
        : IndexedNumericalError("posterior mass below the truncation bound underflows", j) {}
    const char* name() const noexcept override { return "TruncationMassZero"; }
};

class SingularClique : public IndexedNumericalError {
public:
    explicit SingularClique(std::size_t j)
        : IndexedNumericalError("clique sample covariance is not invertible", j) {}
    const char* name() const noexcept override { return "SingularClique"; }
};

class NonFiniteLogPosterior : public NumericalError {
public:
    using NumericalError::NumericalError;
    const char* name() const noexcept override { return "NonFiniteLogPosterior"; }
};

class EmptyGrid : public InputError {
public:
    using InputError::InputError;
    const char* name() const noexcept override { return "EmptyGrid"; }
};

}  // namespace bandchol
