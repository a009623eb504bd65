#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qsync {

/// The three open-system models: local collision model, global collision
/// model, and the collective-decay master equation.
enum class Model { Lcm, Gcm, Me };

std::string_view to_string(Model model);

/// Accepts "lcm", "gcm" or "me" (case-sensitive).
Model parse_model(std::string_view tag);

/// Raised when an intermediate quantity violates a numerical invariant
/// (trace drift, imaginary expectation value, non-PSD state).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pearson coefficient requested for a series with (near) zero variance.
class UndefinedCorrelation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed dataset/model file or format-version mismatch.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A grid-point simulation failed; carries the offending grid index.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(std::size_t grid_index, const std::string& what)
      : std::runtime_error("grid index " + std::to_string(grid_index) + ": " + what),
        grid_index_(grid_index) {}

  std::size_t grid_index() const noexcept { return grid_index_; }

 private:
  std::size_t grid_index_;
};

}  // namespace qsync
