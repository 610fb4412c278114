#pragma once

#include <stdexcept>
#include <string>

namespace qres {

// Thrown when subsystem dimensions of operands do not line up.
class dimension_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Thrown when an argument is outside the mathematical domain (d < 2, bad bracket, ...).
class domain_error : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// Thrown when an object fails its structural validation (POVM not summing to
// identity, negative eigenvalues beyond tolerance, malformed files, ...).
class validation_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Thrown when the conic backend cannot produce a usable solution.
class solver_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Thrown when a problem exceeds a configured resource cap (e.g. the
// deterministic-strategy enumeration limit).
class resource_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace qres
