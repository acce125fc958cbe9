#pragma once

#include <stdexcept>
#include <string>

namespace rdc {

/// Bad configuration (invalid values, missing fields, dimension mismatch).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite loss during critic training; carries diagnostics in what().
struct TrainingDivergence : std::runtime_error {
  explicit TrainingDivergence(const std::string& what) : std::runtime_error(what) {}
};

/// Singular or ill-conditioned confusion matrix in the surrogate solve.
struct InversionError : std::runtime_error {
  explicit InversionError(const std::string& what) : std::runtime_error(what) {}
};

/// Quantile query on a sketch with no inserted values.
struct EmptyStreamError : std::runtime_error {
  explicit EmptyStreamError(const std::string& what) : std::runtime_error(what) {}
};

/// API misuse (invalid action index, wrong noise variant, ...).
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rdc
