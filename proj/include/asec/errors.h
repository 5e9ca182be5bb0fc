#pragma once

#include <stdexcept>
#include <string>

namespace asec {

// Base for every error the library reports. Subclasses let callers (mostly
// the CLI) map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

class InconsistentEstimate : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string &message, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " +
              message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class UnsupportedFeature : public Error {
 public:
  explicit UnsupportedFeature(const std::string &feature)
      : Error("unsupported PDDL feature: " + feature), feature_(feature) {}

  const std::string &feature() const { return feature_; }

 private:
  std::string feature_;
};

class GroundingError : public Error {
 public:
  using Error::Error;
};

class ManifestError : public Error {
 public:
  using Error::Error;
};

class ChainExhausted : public Error {
 public:
  using Error::Error;
};

// Raised by estimator sources that cannot answer (connection or protocol
// failure, unknown action). The registry turns it into an exhausted chain.
class EstimatorUnavailable : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class OracleError : public Error {
 public:
  using Error::Error;
};

} // namespace asec
