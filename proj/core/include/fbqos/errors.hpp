#pragma once

#include <stdexcept>
#include <string>

namespace fbqos {

// Log-domain stabilization ran out of representable range (or was handed
// values it cannot absorb, e.g. +inf sample exponents).
class NumericRangeError : public std::runtime_error {
 public:
  explicit NumericRangeError(const std::string& what) : std::runtime_error(what) {}
};

// A solver target cannot be bracketed within its admissible bounds.
class InfeasibleTargetError : public std::runtime_error {
 public:
  explicit InfeasibleTargetError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fbqos
