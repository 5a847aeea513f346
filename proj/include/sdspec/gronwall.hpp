#pragma once

#include <functional>
#include <span>
#include <vector>

#include "sdspec/dynamics.hpp"

namespace sdspec {

/// One window of an iterated Gronwall bound:
///   bound(t) = amplitude * exp(rate * (t - t_start)) - offset
/// valid for t in [t_start, t_start + window].
struct EnvelopeSegment {
  double t_start = 0.0;
  double amplitude = 0.0;
  double rate = 0.0;
  double window = 0.0;
  double offset = 0.0;
};

/// Constants of the a-priori bound f(t) <= alpha0 exp(alpha1 t) on [0, T_mu]
/// for f = ||grad u||^2 + ||v||^2 in two dimensions:
///   alpha0 = 2|E0| + 4 ||v0||^2 (2 beta^4 ||u0||^2 + 3/2)
///   alpha1 = (2/mu) (5 beta^4 ||u0||^2 + 19/4)
///   T_mu   = mu / (4 beta^4 ||u0||^2)   (infinite when u0 = 0)
struct GronwallConstants {
  double beta = 0.0;
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  double T_mu = 0.0;
  double E0 = 0.0;
  double u0_mass = 0.0;
  double v0_l2_sq = 0.0;

  EnvelopeSegment segment(double t_start) const { return {t_start, alpha0, alpha1, T_mu, 0.0}; }
};

GronwallConstants gronwall_constants(const ComplexField& u0, const RealField& v0, const SDParams& params,
                                     double beta);
/// Constants with (state.u, state.v) as initial data.
GronwallConstants gronwall_constants(const SDState& state, double beta);

/// Piecewise envelope at t: the first window uses `constants`, later windows
/// use the restart segments (constants recomputed from the measured state at
/// each restart). Throws missing_restart if t lies beyond the last window.
double gronwall_envelope(const GronwallConstants& constants, double t,
                         std::span<const EnvelopeSegment> restarts = {});

/// Evaluates the segment whose start is the latest one not after t.
double envelope_at(std::span<const EnvelopeSegment> segments, double t);

/// Bound for the one-dimensional functional g(t) = f(t) + ||v_x||_2 in H^1 x H^1.
/// With m = ||u0||^2 and the 1D inequalities
///   ||u||_4^2 <= ||u||_inf ||u||_2 <= ||u||_{H^1} ||u||_2,
///   ||u||_inf <= C ||u||_{H^1},  C = 1/sqrt(2),
/// the quantity G = g + m obeys G <= gamma0 + gamma1 int G on windows of
/// length T = mu / (4 m), where
///   gamma0 = alpha0 + 2 m + ||v0_x|| + C m T / mu,   gamma1 = alpha1 + 2 C / mu
/// and alpha0, alpha1 are the two-dimensional constants with beta^4 = 1.
struct GEnvelopeConstants {
  double gamma0 = 0.0;
  double gamma1 = 0.0;
  double window = 0.0;
  double u0_mass = 0.0;

  EnvelopeSegment segment(double t_start) const { return {t_start, gamma0, gamma1, window, u0_mass}; }
};

/// Throws wrong_dimension unless the state is one-dimensional.
GEnvelopeConstants g_envelope_constants_1d(const SDState& state);

/// Restarts an envelope whenever the next step would leave the current
/// window. The window length depends only on the conserved mass, so every
/// segment has the same length; the tracker checks that the measured mass at
/// a restart agrees with the initial one.
class EnvelopeTracker {
 public:
  using SegmentFactory = std::function<EnvelopeSegment(const SDState&)>;

  EnvelopeTracker(const SDState& initial, SegmentFactory factory);

  /// Call once per accepted state; `next_dt` is the upcoming step size.
  void observe(const SDState& state, double next_dt);

  double envelope(double t) const { return envelope_at(segments_, t); }
  const std::vector<EnvelopeSegment>& segments() const { return segments_; }

 private:
  SegmentFactory factory_;
  std::vector<EnvelopeSegment> segments_;
  double initial_mass_;
};

EnvelopeTracker make_gronwall_tracker(const SDState& initial, double beta);
EnvelopeTracker make_g_tracker_1d(const SDState& initial);

}  // namespace sdspec
