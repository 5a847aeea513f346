#pragma once

#include <stdexcept>
#include <string>

namespace sdspec {

enum class Errc {
  invalid_dimension,
  invalid_points,
  invalid_extent,
  invalid_argument,
  non_finite_multiplier,
  invalid_norm_order,
  integration_diverged,
  no_contraction,
  aliasing,
  zero_field,
  empty_ensemble,
  wrong_dimension,
  too_few_records,
  single_snapshot,
  outside_region,
  missing_restart,
  config_invalid,
  io_failure,
  header_mismatch,
  truncated_payload,
};

const char* to_string(Errc code);

// Single exception type for the library; `code()` carries the category.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Raised when a step produces a non-finite sample.
class DivergenceError : public Error {
 public:
  DivergenceError(double time, const std::string& what)
      : Error(Errc::integration_diverged, what), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace sdspec
