#pragma once

#include <stdexcept>
#include <string>

namespace fraudbench {

// Base error. exit_code() maps onto the CLI convention:
// 1 for configuration/schema problems, 2 for runtime failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
  virtual int exit_code() const { return 2; }
};

class ConfigLikeError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 1; }
};

class ConfigError : public ConfigLikeError {
 public:
  ConfigError(const std::string& field, const std::string& msg)
      : ConfigLikeError("config field '" + field + "': " + msg), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class SchemaError : public ConfigLikeError {
 public:
  using ConfigLikeError::ConfigLikeError;
};

class CapacityError : public ConfigLikeError {
 public:
  using ConfigLikeError::ConfigLikeError;
};

class RangeError : public ConfigLikeError {
 public:
  using ConfigLikeError::ConfigLikeError;
};

class RatioError : public ConfigLikeError {
 public:
  using ConfigLikeError::ConfigLikeError;
};

class TinyClassError : public ConfigLikeError {
 public:
  using ConfigLikeError::ConfigLikeError;
};

class OverlapError : public ConfigLikeError {
 public:
  using ConfigLikeError::ConfigLikeError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class EmptyLogError : public Error {
 public:
  using Error::Error;
};

class DanglingAccountError : public Error {
 public:
  using Error::Error;
};

class UndefinedRatioError : public Error {
 public:
  using Error::Error;
};

class DegenerateSplitError : public Error {
 public:
  using Error::Error;
};

class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class RelationError : public Error {
 public:
  using Error::Error;
};

class LengthMismatchError : public Error {
 public:
  using Error::Error;
};

class OneClassError : public Error {
 public:
  using Error::Error;
};

class TooFewRunsError : public Error {
 public:
  using Error::Error;
};

class ValueError : public Error {
 public:
  using Error::Error;
};

}  // namespace fraudbench
