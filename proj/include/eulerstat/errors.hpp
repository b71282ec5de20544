#pragma once

#include <stdexcept>
#include <string>

namespace eulerstat {

/// Requested grid cannot represent the modal content without aliasing.
class ResolutionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Grid or array dimensions do not match.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input outside the mathematical domain of an operation (e.g. log of a
/// nonpositive value, vorticity with nonzero mean).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A trajectory produced non-finite coefficients.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(double time, const std::string& what)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace eulerstat
