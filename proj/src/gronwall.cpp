#include "sdspec/gronwall.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sdspec/diagnostics.hpp"
#include "sdspec/error.hpp"
#include "sdspec/spectral.hpp"

namespace sdspec {
namespace {

constexpr double kWindowSlack = 1e-12;

double squared_l2(const RealField& v) {
  const double n = lp_norm(v, 2.0);
  return n * n;
}

GronwallConstants constants_from(double e0, double m, double v_sq, double mu, double beta4, double beta) {
  GronwallConstants c;
  c.beta = beta;
  c.E0 = e0;
  c.u0_mass = m;
  c.v0_l2_sq = v_sq;
  c.alpha0 = 2.0 * std::abs(e0) + 4.0 * v_sq * (2.0 * beta4 * m + 1.5);
  c.alpha1 = (2.0 / mu) * (5.0 * beta4 * m + 19.0 / 4.0);
  c.T_mu = m > 0.0 ? mu / (4.0 * beta4 * m) : std::numeric_limits<double>::infinity();
  return c;
}

}  // namespace

GronwallConstants gronwall_constants(const ComplexField& u0, const RealField& v0, const SDParams& params,
                                     double beta) {
  if (!(beta > 0.0)) throw Error(Errc::invalid_argument, "Gagliardo-Nirenberg constant beta must be positive");
  SDState s{u0, v0, 0.0, params};
  return gronwall_constants(s, beta);
}

GronwallConstants gronwall_constants(const SDState& state, double beta) {
  if (!(beta > 0.0)) throw Error(Errc::invalid_argument, "Gagliardo-Nirenberg constant beta must be positive");
  const double e0 = energy(state).a;
  return constants_from(e0, mass(state.u), squared_l2(state.v), state.params.mu, std::pow(beta, 4), beta);
}

double envelope_at(std::span<const EnvelopeSegment> segments, double t) {
  if (segments.empty()) throw Error(Errc::missing_restart, "no envelope segment available");
  const EnvelopeSegment* seg = &segments.front();
  for (const auto& s : segments) {
    if (s.t_start <= t) seg = &s;
  }
  if (t < seg->t_start) throw Error(Errc::invalid_argument, "envelope queried before its first window");
  const double tau = t - seg->t_start;
  if (tau > seg->window * (1.0 + kWindowSlack) + kWindowSlack) {
    throw Error(Errc::missing_restart,
                "envelope queried at t = " + std::to_string(t) + " beyond its last window; restart data missing");
  }
  return seg->amplitude * std::exp(seg->rate * tau) - seg->offset;
}

double gronwall_envelope(const GronwallConstants& constants, double t, std::span<const EnvelopeSegment> restarts) {
  if (t < 0.0) throw Error(Errc::invalid_argument, "envelope time must be non-negative");
  std::vector<EnvelopeSegment> all;
  all.reserve(restarts.size() + 1);
  all.push_back(constants.segment(0.0));
  all.insert(all.end(), restarts.begin(), restarts.end());
  return envelope_at(all, t);
}

GEnvelopeConstants g_envelope_constants_1d(const SDState& state) {
  if (state.u.grid.dim() != 1) throw Error(Errc::wrong_dimension, "g envelope is defined for 1D states only");
  const double m = mass(state.u);
  const double mu = state.params.mu;
  const GronwallConstants base = constants_from(energy(state).a, m, squared_l2(state.v), mu, 1.0, 1.0);
  const double c = 1.0 / std::sqrt(2.0);
  GEnvelopeConstants g;
  g.u0_mass = m;
  g.window = base.T_mu;
  const double window_term = std::isfinite(g.window) ? c * m * g.window / mu : 0.0;
  g.gamma0 = base.alpha0 + 2.0 * m + gradient_l2(state.v) + window_term;
  g.gamma1 = base.alpha1 + 2.0 * c / mu;
  return g;
}

EnvelopeTracker::EnvelopeTracker(const SDState& initial, SegmentFactory factory)
    : factory_(std::move(factory)), initial_mass_(mass(initial.u)) {
  EnvelopeSegment first = factory_(initial);
  first.t_start = initial.t;
  segments_.push_back(first);
}

void EnvelopeTracker::observe(const SDState& state, double next_dt) {
  const EnvelopeSegment& cur = segments_.back();
  if (!std::isfinite(cur.window)) return;
  if (next_dt > cur.window) {
    throw Error(Errc::invalid_argument, "time step exceeds the envelope window length");
  }
  if (state.t + next_dt <= cur.t_start + cur.window * (1.0 + kWindowSlack)) return;

  const double m = mass(state.u);
  if (std::abs(m - initial_mass_) > 1e-8 * std::max(initial_mass_, 1e-300)) {
    throw Error(Errc::invalid_argument, "mass drifted at an envelope restart; window length is no longer valid");
  }
  EnvelopeSegment next = factory_(state);
  next.t_start = state.t;
  // The window is fixed by the initial mass.
  next.window = segments_.front().window;
  segments_.push_back(next);
}

EnvelopeTracker make_gronwall_tracker(const SDState& initial, double beta) {
  return EnvelopeTracker(initial, [beta](const SDState& s) { return gronwall_constants(s, beta).segment(s.t); });
}

EnvelopeTracker make_g_tracker_1d(const SDState& initial) {
  return EnvelopeTracker(initial, [](const SDState& s) { return g_envelope_constants_1d(s).segment(s.t); });
}

}  // namespace sdspec
