#pragma once

#include <stdexcept>
#include <string>

namespace thermogeo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point or parameter lies outside the region where an object is defined
/// (e.g. p_a <= 0 for the canonical frame, q outside a model's q-domain).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A field evaluation produced a non-finite value.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// An unbounded integral was truncated while the integrand had not decayed.
/// For a Gibbs model this means q lies where the partition function diverges.
class TruncationError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A frame matrix is singular at the requested point.
class FrameError : public Error {
public:
    using Error::Error;
};

/// Caller broke a documented precondition (shape mismatch, asymmetric input, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Invalid verification-suite or model configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace thermogeo
