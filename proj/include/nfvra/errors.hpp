#pragma once

#include <stdexcept>
#include <string>

namespace nfvra {

// Configuration values that fail validation. `field` names the offending
// config path (e.g. "vn.arrival_rate").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& detail)
      : std::runtime_error(field.empty() ? detail : field + ": " + detail),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Malformed input files (GraphML, serialized records).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed input that violates a structural invariant (e.g. disconnected graph).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Illegal state transition: double release, stepping a finished episode, ...
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Broken internal invariant, e.g. a solution marked feasible with holes in it.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A solver declined the instance (size limits).
class SolverRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nfvra
