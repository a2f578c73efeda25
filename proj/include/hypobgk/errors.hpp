#pragma once

#include <stdexcept>
#include <string>

namespace hypobgk {

/// Base of all library errors. `exit_code()` follows the CLI contract:
/// 1 envelope-violation alarm, 2 invalid input, 3 numeric failure.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 2; }
};

/// Collision-frequency model violates 0 < sigma_min <= sigma(z).
class InvalidModelError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation (k = 0, z outside range, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Lyapunov parameter outside the admissible interval.
class CertificateError : public Error {
public:
    using Error::Error;
};

/// sigma model has no finite Taylor bound usable for the general z-derivative estimate.
class NotCertifiableError : public Error {
public:
    using Error::Error;
};

/// Initial data rejected (normalization violated).
class DataError : public Error {
public:
    using Error::Error;
};

/// Malformed call or configuration.
class UsageError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

/// An envelope proven to hold was exceeded.
class ViolationError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 1; }
};

}  // namespace hypobgk
