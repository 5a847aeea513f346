#pragma once

#include <cstddef>
#include <functional>

#include "sdspec/field.hpp"

namespace sdspec {

/// Relaxation time mu > 0 and sign lambda in {+1 (defocusing), -1 (focusing)}.
struct SDParams {
  double mu = 1.0;
  int lambda = 1;
};

/// Throws invalid_argument unless mu > 0 and lambda is +1 or -1.
SDParams make_params(double mu, int lambda);

struct SDState {
  ComplexField u;
  RealField v;
  double t = 0.0;
  SDParams params;
};

/// Throws invalid_argument if u and v live on different grids or t < 0.
void check_state(const SDState& s);

struct StepControl {
  double dt = 1e-3;
  bool dealias = false;
};

/// Free Schrödinger group exp(i dt Laplacian / 2): the spectrum is multiplied
/// by exp(-i dt |xi|^2 / 2).
ComplexField schrodinger_flow(const ComplexField& u, double dt);

/// Precomputed phase table for repeated free flows with a fixed step.
class LinearPropagator {
 public:
  LinearPropagator(const Grid& grid, double dt);

  double dt() const { return dt_; }
  /// Applies the flow in place (forward DFT, phase, inverse DFT).
  void apply(ComplexField& u, bool dealias = false) const;

 private:
  double dt_;
  std::vector<cplx> phase_;
};

/// Exact flow of i u_t = u v, mu v_t + v = lambda |u|^2 over tau. |u| is
/// constant in time for this subsystem, so rho = |u|^2 is frozen and
///   v <- lambda rho + (v - lambda rho) e^{-tau/mu}
///   u <- u exp(-i [lambda rho tau + mu (v - lambda rho)(1 - e^{-tau/mu})]).
SDState nonlinear_substep(const SDState& state, double tau);
void nonlinear_substep_inplace(SDState& state, double tau);

/// Strang step N(dt/2) L(dt) N(dt/2); throws DivergenceError on non-finite output.
/// A negative dt steps backwards.
SDState strang_step(const SDState& state, const StepControl& ctl);

using Observer = std::function<void(const SDState&, std::size_t step)>;

/// Steps from state.t to t_end with a shortened final step when needed.
/// The observer sees the initial state (step 0), every `cadence`-th step and
/// the final step.
SDState evolve(SDState state, const StepControl& ctl, double t_end, const Observer& observer = {},
               std::size_t cadence = 1);

/// Number of Strang steps evolve() takes to cover `duration` with step dt.
std::size_t step_count(double duration, double dt);

/// One Strang split step of i u_t + Laplacian u / 2 = lambda |u|^2 u.
ComplexField nls_step(const ComplexField& u, int lambda, double dt);

/// Evolves the cubic NLS from t = 0 to t_end with the same step policy as evolve().
ComplexField nls_evolve(ComplexField u, int lambda, double dt, double t_end);

/// Maps a solution for relaxation time mu to the mu = 1 solution
///   u~(x, t~) = mu^{1/2} u(mu^{1/2} x, mu t~),  v~ = mu v(mu^{1/2} x, mu t~).
/// The sample values keep their positions on a box of extent L / mu^{1/2};
/// the returned time is t / mu.
SDState scaling_transform(const SDState& state);

/// scaling_transform followed by spectral resampling to `target_points` per
/// axis. Throws aliasing if the target grid cannot represent the field.
SDState scaling_transform(const SDState& state, int target_points);

/// Band-limited interpolation to a new point count on the same box. Throws
/// aliasing if modes carrying more than `tolerance` of the peak amplitude
/// would be dropped.
ComplexField spectral_resample(const ComplexField& f, int target_points, double tolerance = 1e-12);
RealField spectral_resample(const RealField& f, int target_points, double tolerance = 1e-12);

}  // namespace sdspec
