#ifndef MFREG_ERRORS_HPP
#define MFREG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mfreg {

/// Bad arguments, bad configuration, malformed input files.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: factorization breakdown, quadrature non-convergence,
/// unstable model parameters, domain violations of special functions.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem / serialization failure.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace mfreg

#endif
