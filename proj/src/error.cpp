#include "sdspec/error.hpp"

namespace sdspec {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::invalid_dimension: return "invalid-dimension";
    case Errc::invalid_points: return "non-power-of-two-or-too-small";
    case Errc::invalid_extent: return "non-positive-extent";
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::non_finite_multiplier: return "non-finite-multiplier";
    case Errc::invalid_norm_order: return "invalid-norm-order";
    case Errc::integration_diverged: return "integration-diverged";
    case Errc::no_contraction: return "no-contraction";
    case Errc::aliasing: return "aliasing";
    case Errc::zero_field: return "zero-field";
    case Errc::empty_ensemble: return "empty-ensemble";
    case Errc::wrong_dimension: return "wrong-dimension";
    case Errc::too_few_records: return "too-few-records";
    case Errc::single_snapshot: return "single-snapshot";
    case Errc::outside_region: return "outside-region";
    case Errc::missing_restart: return "missing-restart";
    case Errc::config_invalid: return "config-invalid";
    case Errc::io_failure: return "io-failure";
    case Errc::header_mismatch: return "header-mismatch";
    case Errc::truncated_payload: return "truncated-payload";
  }
  return "unknown";
}

}  // namespace sdspec
