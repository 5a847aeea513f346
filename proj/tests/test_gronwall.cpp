#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "sdspec/diagnostics.hpp"
#include "sdspec/error.hpp"
#include "sdspec/gronwall.hpp"
#include "sdspec/spectral.hpp"

using namespace sdspec;
using oracle::error_of;

namespace {

constexpr double pi = std::numbers::pi;

SDState equilibrium_gaussian(int lambda) {
  const Grid g = make_grid(2, 256, 20.0);
  SDState s;
  s.params = make_params(1.0, lambda);
  s.u = oracle::centred_gaussian(g, 1.0);
  s.v = RealField(g);
  for (std::size_t i = 0; i < g.size(); ++i) s.v[i] = lambda * std::norm(s.u[i]);
  return s;
}

}  // namespace

TEST_CASE("constants on the equilibrium Gaussian, evaluated by hand") {
  // m = pi, ||v0||^2 = pi/2, E0 = 3 pi / 2; beta^4 = 1/pi keeps the numbers round:
  // alpha0 = 3 pi + 2 pi (2 + 3/2) = 10 pi, alpha1 = 2 (5 + 19/4) = 19.5, T = 1/4.
  const double beta = std::pow(pi, -0.25);
  const GronwallConstants c = gronwall_constants(equilibrium_gaussian(1), beta);
  CHECK(std::abs(c.E0 - 1.5 * pi) < 1e-10);
  CHECK(std::abs(c.u0_mass - pi) < 1e-10);
  CHECK(std::abs(c.v0_l2_sq - pi / 2.0) < 1e-10);
  CHECK(std::abs(c.alpha0 - 10.0 * pi) < 1e-10 * 10.0 * pi);
  CHECK(std::abs(c.alpha1 - 19.5) < 1e-10 * 19.5);
  CHECK(std::abs(c.T_mu - 0.25) < 1e-10 * 0.25);

  // Focusing twin: E0 = pi / 2, so alpha0 = pi + 7 pi = 8 pi.
  const GronwallConstants f = gronwall_constants(equilibrium_gaussian(-1), beta);
  CHECK(std::abs(f.alpha0 - 8.0 * pi) < 1e-10 * 8.0 * pi);
}

TEST_CASE("degenerate data") {
  const Grid g = make_grid(2, 16, 4.0);
  RealField v(g);
  for (auto& x : v.values) x = 0.5;
  const GronwallConstants c = gronwall_constants(ComplexField(g), v, make_params(2.0, -1), 0.8);
  const double vsq = 0.25 * 16.0;
  const double e0 = 1.0 * vsq;  // E_b = -lambda ||v||^2
  CHECK(c.E0 == doctest::Approx(e0));
  CHECK(c.alpha0 == doctest::Approx(2.0 * e0 + 6.0 * vsq));
  CHECK(std::isinf(c.T_mu));
  CHECK(c.alpha1 == doctest::Approx(19.0 / 4.0));

  SDState s = equilibrium_gaussian(1);
  for (auto& x : s.v.values) x = 0.0;
  s.u *= cplx(0.0);
  const GronwallConstants z = gronwall_constants(s, 1.0);
  CHECK(z.alpha0 == 0.0);
  CHECK(error_of([&] { gronwall_constants(s, 0.0); }) == Errc::invalid_argument);
}

TEST_CASE("piecewise envelope") {
  GronwallConstants c;
  c.alpha0 = 2.0;
  c.alpha1 = 3.0;
  c.T_mu = 0.5;
  CHECK(gronwall_envelope(c, 0.0) == 2.0);
  CHECK(gronwall_envelope(c, 0.5) == doctest::Approx(2.0 * std::exp(1.5)));
  CHECK(error_of([&] { gronwall_envelope(c, 0.6); }) == Errc::missing_restart);
  const std::vector<EnvelopeSegment> restarts{{0.45, 7.0, 1.0, 0.5, 0.0}};
  CHECK(gronwall_envelope(c, 0.4, restarts) == doctest::Approx(2.0 * std::exp(1.2)));
  CHECK(gronwall_envelope(c, 0.6, restarts) == doctest::Approx(7.0 * std::exp(0.15)));
  CHECK(error_of([&] { gronwall_envelope(c, 0.96, restarts); }) == Errc::missing_restart);
  CHECK(error_of([&] { gronwall_envelope(c, -0.1); }) == Errc::invalid_argument);
  const EnvelopeSegment shifted{1.0, 5.0, 2.0, 1.0, 1.5};
  CHECK(envelope_at(std::span(&shifted, 1), 1.5) == doctest::Approx(5.0 * std::exp(1.0) - 1.5));
}

TEST_CASE("tracker restarts at the last step inside each window") {
  const Grid g = make_grid(1, 8, 1.0);
  SDState s{ComplexField(g), RealField(g), 0.0, make_params(1.0, 1)};
  for (auto& z : s.u.values) z = 1.0;
  int calls = 0;
  EnvelopeTracker tr(s, [&](const SDState& st) {
    ++calls;
    return EnvelopeSegment{st.t, 1.0 + st.t, 0.0, 0.25, 0.0};
  });
  const double dt = 0.1;
  std::vector<double> starts;
  for (int k = 0; k <= 10; ++k) {
    s.t = k * dt;
    tr.observe(s, dt);
  }
  for (const auto& seg : tr.segments()) starts.push_back(seg.t_start);
  REQUIRE(starts.size() == 6u);
  CHECK(starts[1] == doctest::Approx(0.2));
  CHECK(starts[2] == doctest::Approx(0.4));
  CHECK(starts[5] == doctest::Approx(1.0));
  for (const auto& seg : tr.segments()) CHECK(seg.window == 0.25);
  CHECK(tr.envelope(0.55) == doctest::Approx(1.4));
  CHECK(calls == 6);
  CHECK(error_of([&] { tr.observe(s, 0.3); }) == Errc::invalid_argument);
  s.u *= cplx(2.0);
  s.t = 1.2;
  CHECK(error_of([&] { tr.observe(s, 0.1); }) == Errc::invalid_argument);
}

TEST_CASE("measured f stays below the envelope on short 2D runs") {
  for (int lambda : {1, -1}) {
    const Grid g = make_grid(2, 64, 20.0);
    SDState s;
    s.params = make_params(1.0, lambda);
    s.u = oracle::centred_gaussian(g, 1.0);
    s.v = RealField(g);
    for (std::size_t i = 0; i < g.size(); ++i) s.v[i] = lambda * std::norm(s.u[i]);
    const double beta = calibrate_beta(std::vector<ComplexField>{s.u});
    EnvelopeTracker tr = make_gronwall_tracker(s, beta);
    const double dt = 5e-3;
    double worst = 1e300;
    evolve(s, StepControl{dt, false}, 1.0, [&](const SDState& st, std::size_t) {
      tr.observe(st, dt);
      worst = std::min(worst, tr.envelope(st.t) - measure(st).f);
    });
    CHECK(tr.segments().size() > 1u);
    CHECK(worst > 0.0);
  }
}

TEST_CASE("one-dimensional g envelope") {
  const Grid g = make_grid(1, 256, 40.0);
  SDState s;
  s.params = make_params(1.0, -1);
  s.u = oracle::centred_gaussian(g, 1.0);
  s.v = RealField(g);
  for (std::size_t i = 0; i < g.size(); ++i) s.v[i] = -std::norm(s.u[i]);
  const GEnvelopeConstants c = g_envelope_constants_1d(s);
  const GronwallConstants base = gronwall_constants(s, 1.0);
  const double m = mass(s.u);
  CHECK(c.window == doctest::Approx(1.0 / (4.0 * m)));
  CHECK(c.gamma0 == doctest::Approx(base.alpha0 + 2.0 * m + gradient_l2(s.v) + m * c.window / std::sqrt(2.0)));
  CHECK(c.gamma1 == doctest::Approx(base.alpha1 + std::sqrt(2.0)));

  EnvelopeTracker tr = make_g_tracker_1d(s);
  const double dt = 2e-3;
  double worst = 1e300;
  evolve(s, StepControl{dt, false}, 2.0, [&](const SDState& st, std::size_t) {
    tr.observe(st, dt);
    const double gval = g_functional_1d(st);
    CHECK(std::isfinite(gval));
    worst = std::min(worst, tr.envelope(st.t) - gval);
  });
  CHECK(worst > 0.0);
  const Grid g2 = make_grid(2, 8, 1.0);
  CHECK(error_of([&] { g_envelope_constants_1d(SDState{ComplexField(g2), RealField(g2), 0.0, {}}); }) ==
        Errc::wrong_dimension);
}
