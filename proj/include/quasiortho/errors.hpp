#pragma once

#include <stdexcept>
#include <string>

namespace quasiortho {

// Dimension is zero, or two operands live in different spaces.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A configured resource cap would be exceeded.
class ResourceError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Result is finite but not representable in the requested type.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

}  // namespace quasiortho
