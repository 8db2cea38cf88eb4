#pragma once

#include <stdexcept>
#include <string>

namespace porodarcy {

// Base class for everything the library throws on a contract violation.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DegenerateElement : public Error {
 public:
  using Error::Error;
};

// Linear drag law evaluated where 1 + beta*p <= 0.
class NonpositiveDrag : public Error {
 public:
  using Error::Error;
};

// Strong normal-velocity constraint requested on a facet that is not axis aligned.
class UnsupportedGeometry : public Error {
 public:
  using Error::Error;
};

class SourcePlacement : public Error {
 public:
  using Error::Error;
};

// Pure-flux problem whose boundary flux and sources do not balance.
class CompatibilityError : public Error {
 public:
  using Error::Error;
};

class LinearSolveError : public Error {
 public:
  using Error::Error;
};

// Closed-form solution evaluated outside the range where it exists.
class ModelBreakdown : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace porodarcy
