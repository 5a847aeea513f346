#include "sdspec/dynamics.hpp"

#include <cmath>
#include <string>

#include "sdspec/error.hpp"
#include "sdspec/spectral.hpp"

namespace sdspec {

SDParams make_params(double mu, int lambda) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw Error(Errc::invalid_argument, "relaxation time mu must be positive");
  }
  if (lambda != 1 && lambda != -1) {
    throw Error(Errc::invalid_argument, "lambda must be +1 or -1, got " + std::to_string(lambda));
  }
  return SDParams{mu, lambda};
}

void check_state(const SDState& s) {
  if (!(s.u.grid == s.v.grid)) throw Error(Errc::invalid_argument, "u and v live on different grids");
  if (s.u.size() != s.u.grid.size() || s.v.size() != s.v.grid.size()) {
    throw Error(Errc::invalid_argument, "field length does not match its grid");
  }
  if (!(s.t >= 0.0)) throw Error(Errc::invalid_argument, "state time must be non-negative");
  make_params(s.params.mu, s.params.lambda);
}

LinearPropagator::LinearPropagator(const Grid& grid, double dt) : dt_(dt), phase_(grid.size()) {
  const auto& ksq = grid.wavenumber_sq();
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (std::size_t i = 0; i < phase_.size(); ++i) {
    phase_[i] = std::polar(scale, -0.5 * dt * ksq[i]);
  }
}

void LinearPropagator::apply(ComplexField& u, bool dealias) const {
  const std::vector<int> shape(u.grid.dim(), u.grid.points());
  dft_inplace(u.values, shape, -1);
  for (std::size_t i = 0; i < phase_.size(); ++i) u[i] *= phase_[i];
  if (dealias) dealias_two_thirds(u);
  dft_inplace(u.values, shape, +1);
}

ComplexField schrodinger_flow(const ComplexField& u, double dt) {
  ComplexField out = u;
  LinearPropagator(u.grid, dt).apply(out);
  return out;
}

void nonlinear_substep_inplace(SDState& state, double tau) {
  const double mu = state.params.mu;
  const double lam = state.params.lambda;
  const double decay = std::exp(-tau / mu);
  const double one_minus_decay = -std::expm1(-tau / mu);
  for (std::size_t i = 0; i < state.u.size(); ++i) {
    const double target = lam * std::norm(state.u[i]);
    const double offset = state.v[i] - target;
    const double phase = target * tau + mu * offset * one_minus_decay;
    state.u[i] *= std::polar(1.0, -phase);
    state.v[i] = target + offset * decay;
  }
}

SDState nonlinear_substep(const SDState& state, double tau) {
  SDState out = state;
  nonlinear_substep_inplace(out, tau);
  return out;
}

namespace {

void strang_inplace(SDState& s, const LinearPropagator& prop, bool dealias, double t_next) {
  const double half = 0.5 * prop.dt();
  nonlinear_substep_inplace(s, half);
  prop.apply(s.u);
  nonlinear_substep_inplace(s, half);
  if (dealias) {
    // Truncation after the full step; v is left untouched.
    const std::vector<int> shape(s.u.grid.dim(), s.u.grid.points());
    dft_inplace(s.u.values, shape, -1);
    dealias_two_thirds(s.u);
    const double scale = 1.0 / static_cast<double>(s.u.size());
    dft_inplace(s.u.values, shape, +1);
    for (auto& z : s.u.values) z *= scale;
  }
  s.t = t_next;
  if (!s.u.all_finite() || !s.v.all_finite()) {
    throw DivergenceError(t_next, "integration diverged: non-finite field at t = " + std::to_string(t_next));
  }
}

}  // namespace

SDState strang_step(const SDState& state, const StepControl& ctl) {
  if (!(ctl.dt != 0.0) || !std::isfinite(ctl.dt)) throw Error(Errc::invalid_argument, "time step must be nonzero and finite");
  SDState out = state;
  strang_inplace(out, LinearPropagator(state.u.grid, ctl.dt), ctl.dealias, state.t + ctl.dt);
  return out;
}

std::size_t step_count(double duration, double dt) {
  if (duration <= 0.0) return 0;
  const double ratio = duration / dt;
  auto full = static_cast<std::size_t>(std::floor(ratio + 1e-9));
  const double rest = duration - static_cast<double>(full) * dt;
  return rest > 1e-12 * std::max(1.0, duration) ? full + 1 : full;
}

SDState evolve(SDState state, const StepControl& ctl, double t_end, const Observer& observer,
               std::size_t cadence) {
  if (!(ctl.dt > 0.0)) throw Error(Errc::invalid_argument, "time step must be positive");
  if (t_end < state.t) throw Error(Errc::invalid_argument, "t_end precedes the state time");
  if (cadence == 0) cadence = 1;
  check_state(state);

  const double t0 = state.t;
  const std::size_t steps = step_count(t_end - t0, ctl.dt);
  if (observer) observer(state, 0);

  const LinearPropagator full(state.u.grid, ctl.dt);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t_next = k == steps ? t_end : t0 + static_cast<double>(k) * ctl.dt;
    const double h = t_next - state.t;
    if (std::abs(h - ctl.dt) <= 1e-12 * ctl.dt) {
      strang_inplace(state, full, ctl.dealias, t_next);
    } else {
      strang_inplace(state, LinearPropagator(state.u.grid, h), ctl.dealias, t_next);
    }
    if (observer && (k % cadence == 0 || k == steps)) observer(state, k);
  }
  return state;
}

ComplexField nls_step(const ComplexField& u, int lambda, double dt) {
  ComplexField out = u;
  auto phase = [&](double tau) {
    for (auto& z : out.values) z *= std::polar(1.0, -lambda * std::norm(z) * tau);
  };
  phase(0.5 * dt);
  LinearPropagator(u.grid, dt).apply(out);
  phase(0.5 * dt);
  if (!out.all_finite()) throw DivergenceError(dt, "NLS integration diverged");
  return out;
}

ComplexField nls_evolve(ComplexField u, int lambda, double dt, double t_end) {
  const std::size_t steps = step_count(t_end, dt);
  const LinearPropagator full(u.grid, dt);
  double t = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t_next = k == steps ? t_end : static_cast<double>(k) * dt;
    const double h = t_next - t;
    auto phase = [&](double tau) {
      for (auto& z : u.values) z *= std::polar(1.0, -lambda * std::norm(z) * tau);
    };
    phase(0.5 * h);
    if (std::abs(h - dt) <= 1e-12 * dt) {
      full.apply(u);
    } else {
      LinearPropagator(u.grid, h).apply(u);
    }
    phase(0.5 * h);
    t = t_next;
    if (!u.all_finite()) throw DivergenceError(t, "NLS integration diverged");
  }
  return u;
}

SDState scaling_transform(const SDState& state) {
  check_state(state);
  const double mu = state.params.mu;
  const double root = std::sqrt(mu);
  const Grid g = make_grid(state.u.grid.dim(), state.u.grid.points(), state.u.grid.extent() / root);
  SDState out;
  out.u = ComplexField(g, state.u.values);
  out.v = RealField(g, state.v.values);
  out.u *= cplx(root);
  out.v *= mu;
  out.t = state.t / mu;
  out.params = SDParams{1.0, state.params.lambda};
  return out;
}

SDState scaling_transform(const SDState& state, int target_points) {
  SDState out = scaling_transform(state);
  out.u = spectral_resample(out.u, target_points);
  out.v = spectral_resample(out.v, target_points);
  return out;
}

ComplexField spectral_resample(const ComplexField& f, int target_points, double tolerance) {
  const Grid& src = f.grid;
  if (target_points == src.points()) return f;
  const Grid dst = make_grid(src.dim(), target_points, src.extent());
  const ComplexField spec = forward_transform(f);

  double peak = 0.0;
  for (const auto& z : spec.values) peak = std::max(peak, std::abs(z));
  const double limit = tolerance * peak;

  const int half_src = src.points() / 2;
  const int half_dst = target_points / 2;
  ComplexField out_spec(dst);
  const double scale = std::pow(static_cast<double>(target_points) / src.points(), src.dim());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto idx = src.unflatten(i);
    std::array<int, 3> didx{0, 0, 0};
    bool representable = true;
    bool nyquist = false;
    for (int d = 0; d < src.dim(); ++d) {
      const int k = src.signed_index(idx[d]);
      if (k == -half_src && target_points > src.points()) nyquist = true;
      if (k < -half_dst || k >= half_dst) representable = false;
      didx[d] = k < 0 ? k + target_points : k;
    }
    if (!representable || nyquist) {
      if (std::abs(spec[i]) > limit) {
        throw Error(Errc::aliasing, "resampling would alias: field has content outside the target band");
      }
      continue;
    }
    out_spec[dst.flatten(didx)] = spec[i] * scale;
  }
  return inverse_transform(out_spec);
}

RealField spectral_resample(const RealField& f, int target_points, double tolerance) {
  const ComplexField c = spectral_resample(to_complex(f), target_points, tolerance);
  RealField out(c.grid);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c[i].real();
  return out;
}

}  // namespace sdspec
