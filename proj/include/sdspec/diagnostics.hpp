#pragma once

#include <span>
#include <vector>

#include "sdspec/dynamics.hpp"

namespace sdspec {

/// One time sample of the scalar functionals tracked along a run.
struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;          // ||u||_2^2
  double energy_a = 0.0;      // int |grad u|^2 + lambda |u|^4 - lambda mu^2 v_t^2
  double energy_b = 0.0;      // int |grad u|^2 + 2 v |u|^2 - lambda v^2
  double grad_u_l2_sq = 0.0;
  double v_l2_sq = 0.0;
  double f = 0.0;             // grad_u_l2_sq + v_l2_sq
  double u_linf = 0.0;
  double u_l4 = 0.0;
  double vt_l2_sq = 0.0;
  double gronwall_envelope = 0.0;
};

double mass(const ComplexField& u);

/// v_t = (lambda |u|^2 - v) / mu, read off the relaxation equation.
RealField v_time_derivative(const SDState& state);

struct EnergyPair {
  double a = 0.0;
  double b = 0.0;
};

/// Both integrand forms of the pseudo-energy. They agree identically once
/// mu v_t is replaced by lambda |u|^2 - v.
EnergyPair energy(const SDState& state);

/// Fills every field except gronwall_envelope.
DiagnosticsRecord measure(const SDState& state);

/// Residual of dE/dt = 2 lambda mu ||v_t||_2^2 per interval of `stride`
/// records:
///   r_k = E(t_{(k+1)s}) - E(t_{ks}) - 2 lambda mu * trapezoid(||v_t||^2)
/// with the trapezoid taken over every record inside the interval. Uses
/// energy_a. Throws too_few_records for fewer than two records.
std::vector<double> energy_rate_residual(std::span<const DiagnosticsRecord> records, const SDParams& params,
                                         std::size_t stride = 1);

/// ||u||_4^4 / (||u||_2^2 ||grad u||_2^2); the 2D Gagliardo-Nirenberg
/// inequality bounds it by beta^4. Throws zero_field if u or grad u vanishes.
double gn_ratio(const ComplexField& u);

/// beta with beta^4 = safety * max gn_ratio over the ensemble.
/// Throws empty_ensemble.
double calibrate_beta(std::span<const ComplexField> candidates, double safety = 2.0);

/// g(t) = f(t) + ||v_x||_2 (norm, not squared) for one-dimensional states.
double g_functional_1d(const SDState& state);

/// (|xi1|^2 - |xi2|^2) / 2, the modulation gap sigma1 - sigma2 - sigma forced
/// by xi = xi1 - xi2.
double resonance_gap(std::span<const double> xi1, std::span<const double> xi2);

}  // namespace sdspec
