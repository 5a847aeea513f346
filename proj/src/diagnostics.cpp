#include "sdspec/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "sdspec/error.hpp"
#include "sdspec/spectral.hpp"

namespace sdspec {

double mass(const ComplexField& u) {
  double sum = 0.0;
  for (const auto& z : u.values) sum += std::norm(z);
  return sum * u.grid.cell_volume();
}

RealField v_time_derivative(const SDState& state) {
  RealField vt(state.v.grid);
  const double lam = state.params.lambda;
  const double inv_mu = 1.0 / state.params.mu;
  for (std::size_t i = 0; i < vt.size(); ++i) vt[i] = (lam * std::norm(state.u[i]) - state.v[i]) * inv_mu;
  return vt;
}

namespace {

struct Integrals {
  double grad_sq = 0.0;
  double u4 = 0.0;
  double vt_sq = 0.0;
  double v_sq = 0.0;
  double v_rho = 0.0;
  double u_sq = 0.0;
  double u_linf = 0.0;
};

Integrals integrate(const SDState& s) {
  Integrals r;
  const double g = gradient_l2(s.u);
  r.grad_sq = g * g;
  const double lam = s.params.lambda;
  const double inv_mu = 1.0 / s.params.mu;
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    const double rho = std::norm(s.u[i]);
    const double v = s.v[i];
    const double vt = (lam * rho - v) * inv_mu;
    r.u_sq += rho;
    r.u4 += rho * rho;
    r.vt_sq += vt * vt;
    r.v_sq += v * v;
    r.v_rho += v * rho;
    r.u_linf = std::max(r.u_linf, std::sqrt(rho));
  }
  const double h = s.u.grid.cell_volume();
  r.u_sq *= h;
  r.u4 *= h;
  r.vt_sq *= h;
  r.v_sq *= h;
  r.v_rho *= h;
  return r;
}

}  // namespace

EnergyPair energy(const SDState& state) {
  const Integrals r = integrate(state);
  const double lam = state.params.lambda;
  const double mu = state.params.mu;
  return {r.grad_sq + lam * r.u4 - lam * mu * mu * r.vt_sq, r.grad_sq + 2.0 * r.v_rho - lam * r.v_sq};
}

DiagnosticsRecord measure(const SDState& state) {
  const Integrals r = integrate(state);
  const double lam = state.params.lambda;
  const double mu = state.params.mu;
  DiagnosticsRecord d;
  d.t = state.t;
  d.mass = r.u_sq;
  d.energy_a = r.grad_sq + lam * r.u4 - lam * mu * mu * r.vt_sq;
  d.energy_b = r.grad_sq + 2.0 * r.v_rho - lam * r.v_sq;
  d.grad_u_l2_sq = r.grad_sq;
  d.v_l2_sq = r.v_sq;
  d.f = r.grad_sq + r.v_sq;
  d.u_linf = r.u_linf;
  d.u_l4 = std::pow(r.u4, 0.25);
  d.vt_l2_sq = r.vt_sq;
  return d;
}

std::vector<double> energy_rate_residual(std::span<const DiagnosticsRecord> records, const SDParams& params,
                                         std::size_t stride) {
  if (records.size() < 2) throw Error(Errc::too_few_records, "energy rate residual needs at least two records");
  if (stride == 0) throw Error(Errc::invalid_argument, "stride must be positive");
  const double coeff = 2.0 * params.lambda * params.mu;
  std::vector<double> out;
  for (std::size_t start = 0; start + stride < records.size(); start += stride) {
    const std::size_t end = start + stride;
    double integral = 0.0;
    for (std::size_t j = start; j < end; ++j) {
      integral += 0.5 * (records[j + 1].t - records[j].t) * (records[j].vt_l2_sq + records[j + 1].vt_l2_sq);
    }
    out.push_back(records[end].energy_a - records[start].energy_a - coeff * integral);
  }
  return out;
}

double gn_ratio(const ComplexField& u) {
  const double l2 = lp_norm(u, 2.0);
  const double grad = gradient_l2(u);
  if (l2 == 0.0 || grad == 0.0) throw Error(Errc::zero_field, "gn_ratio is undefined for a field with zero norm");
  const double l4 = lp_norm(u, 4.0);
  return std::pow(l4, 4) / (l2 * l2 * grad * grad);
}

double calibrate_beta(std::span<const ComplexField> candidates, double safety) {
  if (candidates.empty()) throw Error(Errc::empty_ensemble, "calibrate_beta needs at least one field");
  if (!(safety > 0.0)) throw Error(Errc::invalid_argument, "safety factor must be positive");
  double worst = 0.0;
  for (const auto& f : candidates) worst = std::max(worst, gn_ratio(f));
  return std::pow(safety * worst, 0.25);
}

double g_functional_1d(const SDState& state) {
  if (state.u.grid.dim() != 1) throw Error(Errc::wrong_dimension, "g functional is defined for 1D states only");
  const DiagnosticsRecord d = measure(state);
  return d.f + gradient_l2(state.v);
}

double resonance_gap(std::span<const double> xi1, std::span<const double> xi2) {
  if (xi1.size() != xi2.size()) throw Error(Errc::invalid_argument, "wavevectors differ in dimension");
  double a = 0.0, b = 0.0;
  for (std::size_t d = 0; d < xi1.size(); ++d) {
    a += xi1[d] * xi1[d];
    b += xi2[d] * xi2[d];
  }
  return 0.5 * (a - b);
}

}  // namespace sdspec
