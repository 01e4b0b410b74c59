#pragma once

#include <stdexcept>
#include <string>

namespace pfdr {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Iterative routine failed to converge; message carries the diagnostics.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace pfdr
