#pragma once

#include <stdexcept>
#include <string>

namespace hatt {

/// Incompatible sizes, mode mismatches or malformed rank chains.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A 1-based index or split position outside its valid range.
class BoundsError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// An allocation would exceed a configured element-count cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite input to a numerical kernel.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mathematically undefined request (e.g. relative error against a zero reference).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Bad user input: unknown algorithm names, conflicting flags.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hatt
