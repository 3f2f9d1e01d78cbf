#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bddlearn {

/// Malformed or unusable input data (CSV shape, label column, splits).
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when perfect classification is requested on a dataset where two
/// examples share a feature vector but carry different labels.
class InconsistentDataError : public DataError {
public:
  InconsistentDataError(std::string what,
                        std::vector<std::vector<std::size_t>> groups)
      : DataError(std::move(what)), conflicts(std::move(groups)) {}

  std::vector<std::vector<std::size_t>> conflicts;
};

/// An external solver misbehaved: no status line, garbage output, or a model
/// that fails local verification.
class SolverIntegrationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Learning could not produce a model.
class LearnError : public std::runtime_error {
public:
  enum class Kind { depth_insufficient, timeout, solver_failure };

  LearnError(Kind kind, const std::string &what)
      : std::runtime_error(what), kind(kind) {}

  Kind kind;
};

} // namespace bddlearn
