#pragma once

#include <stdexcept>
#include <string>

namespace wide {

/// Base of every error raised by the library. The CLI maps the subclasses
/// onto its exit-code contract (2 = input/config, 3 = run).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened or decoded.
class LoadError : public Error {
 public:
  LoadError(const std::string& path, const std::string& what)
      : Error("cannot load '" + path + "': " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// A record or manifest violates a data invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or unusable configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A function precondition on an argument does not hold.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// The input carries no information for the requested measure (e.g. zero energy).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

/// The pipeline ran but produced no usable result.
class RunError : public Error {
 public:
  using Error::Error;
};

}  // namespace wide
