#pragma once

#include <stdexcept>
#include <string>

namespace gdplan {

// An input file could not be parsed; message carries the offending line/field.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// A domain invariant failed; message names the violated check.
class InvariantError : public std::runtime_error {
 public:
  explicit InvariantError(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor shape mismatch; message names both shapes.
class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gdplan
