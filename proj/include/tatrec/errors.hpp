#ifndef TATREC_ERRORS_HPP
#define TATREC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tatrec {

// Bad experiment descriptions: malformed config files, invalid geometry or
// medium specifications, incompatible objects. Maps to process exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failures of the numerical machinery at run time: CFL violations, solver
// non-convergence, non-finite field values. Maps to process exit code 2.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace tatrec

#endif
