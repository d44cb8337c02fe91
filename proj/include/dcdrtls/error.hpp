#pragma once

#include <stdexcept>
#include <string>

namespace dcdrtls {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values, dimension mismatches, broken preconditions on inputs.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A factorization or solve hit a singular / non-positive-definite matrix.
class SingularMatrix : public Error {
public:
    using Error::Error;
};

/// Bad configuration (forgetting factor, gamma, stream layout, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The scalar denominator of the weight update vanished.
class DegenerateDenominator : public Error {
public:
    using Error::Error;
};

/// The minor eigenvector has a (near) zero last entry, so no TLS solution exists.
class NonGenericTls : public Error {
public:
    using Error::Error;
};

/// A theory model violates its preconditions (e.g. R not positive-definite).
class InvalidModel : public Error {
public:
    using Error::Error;
};

/// Asymptotic moments requested at lambda = 1.
class DivergentMoments : public Error {
public:
    using Error::Error;
};

}  // namespace dcdrtls
