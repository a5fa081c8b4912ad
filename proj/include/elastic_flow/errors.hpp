#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace elastic_flow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point was passed to a metric outside of its domain H.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid construction parameters (e.g. torus with s <= 0).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// The metric has no conformal embedding into R^3.
class UnsupportedEmbeddingError : public Error {
public:
    using Error::Error;
};

/// Coincident or overlapping vertices; `index()` names the offending vertex.
class DegenerateMeshError : public Error {
public:
    DegenerateMeshError(const std::string& what, std::size_t index)
        : Error(what), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Violated caller contract (size mismatch, missing data, non-positive input).
class ContractError : public Error {
public:
    using Error::Error;
};

/// A time step could not be performed.
class StepError : public Error {
public:
    using Error::Error;
};

/// A step produced a vertex (or quadrature point) outside the metric domain.
class DomainExitError : public StepError {
public:
    using StepError::StepError;
};

/// The adaptive ODE integrator failed.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Malformed run configuration or command line.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace elastic_flow
