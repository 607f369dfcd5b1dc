#pragma once

#include <stdexcept>
#include <string>

namespace aniflow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class SizeMismatch : public Error {
 public:
  using Error::Error;
};

/// A curve edge has zero length.
class DegenerateEdge : public Error {
 public:
  using Error::Error;
};

class SelfIntersecting : public Error {
 public:
  using Error::Error;
};

/// k_0 is infinite at some table node, so no finite stabilizer exists.
class NonexistentStabilizer : public Error {
 public:
  NonexistentStabilizer(double theta, std::string condition)
      : Error("no finite stabilizer at theta=" + std::to_string(theta) + ": " + condition),
        theta_(theta),
        condition_(std::move(condition)) {}

  double theta() const { return theta_; }
  const std::string& condition() const { return condition_; }

 private:
  double theta_;
  std::string condition_;
};

class NewtonDiverged : public Error {
 public:
  using Error::Error;
};

/// A time step produced an edge shorter than the degeneracy threshold.
class DegenerateCurve : public Error {
 public:
  using Error::Error;
};

/// Configuration file problem, tagged with the offending line (0 if none).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace aniflow
