#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "sdspec/bourgain.hpp"
#include "sdspec/error.hpp"

using namespace sdspec;
using oracle::error_of;

namespace {

constexpr double pi = std::numbers::pi;

// 1D trace of exp(i k x - i omega t) on a 2 pi box.
SpaceTimeTrace mode_trace(int points, int k, double omega, std::size_t n_times, double dt) {
  const Grid g = make_grid(1, points, 2.0 * pi);
  std::vector<ComplexField> snaps;
  for (std::size_t n = 0; n < n_times; ++n) {
    ComplexField f(g);
    for (std::size_t j = 0; j < g.size(); ++j) f[j] = std::polar(1.0, k * g.position(j)[0] - omega * n * dt);
    snaps.push_back(std::move(f));
  }
  return make_trace(g, 0.0, dt, snaps);
}

// Weighted norm by direct summation of the space-time transform.
double direct_norm(const SpaceTimeTrace& tr, double s, double b, bool dispersive) {
  const std::size_t P = tr.grid.size(), N = tr.n_times;
  const double L = tr.grid.extent();
  double sum = 0.0;
  for (std::size_t m = 0; m < N; ++m) {
    const long mm = m < N / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(N);
    const double tau = 2.0 * pi * mm / (N * tr.dt);
    for (std::size_t k = 0; k < P; ++k) {
      const long kk = k < P / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(P);
      const double xi = 2.0 * pi * kk / L;
      cplx acc = 0.0;
      for (std::size_t n = 0; n < N; ++n) {
        const double w = taper_weight(tr.taper, n, N);
        for (std::size_t j = 0; j < P; ++j) {
          acc += w * tr.values[n * P + j] * std::polar(1.0, -2.0 * pi * (double(m * n) / N + double(k * j) / P));
        }
      }
      const double sigma = dispersive ? tau + 0.5 * xi * xi : tau;
      sum += std::pow(1.0 + std::abs(xi), 2 * s) * std::pow(1.0 + std::abs(sigma), 2 * b) * std::norm(acc);
    }
  }
  return std::sqrt(sum * (L / P) * tr.dt / (P * N));
}

}  // namespace

TEST_CASE("taper weights") {
  CHECK(taper_weight(Taper::none, 3, 10) == 1.0);
  CHECK(taper_weight(Taper::raised_cosine, 0, 4) == doctest::Approx(std::pow(std::sin(pi / 8), 2)));
  double sum = 0.0;
  for (std::size_t n = 0; n < 16; ++n) sum += std::pow(taper_weight(Taper::raised_cosine, n, 16), 2);
  CHECK(sum == doctest::Approx(16.0 * 3.0 / 8.0));
}

TEST_CASE("s = b = 0 gives the space-time L2 norm of the tapered trace") {
  const Grid g = make_grid(2, 8, 3.0);
  std::vector<ComplexField> snaps;
  for (int n = 0; n < 12; ++n) snaps.push_back(oracle::random_complex(g, 70 + n));
  const SpaceTimeTrace tr = make_trace(g, 0.0, 0.1, snaps);
  double l2 = 0.0;
  for (std::size_t n = 0; n < 12; ++n) {
    const double w = taper_weight(tr.taper, n, 12);
    for (const auto& z : snaps[n].values) l2 += w * w * std::norm(z);
  }
  l2 = std::sqrt(l2 * g.cell_volume() * 0.1);
  CHECK(std::abs(xsb_norm(tr, 0.0, 0.0) - l2) < 1e-12 * l2);
  CHECK(std::abs(hlc_norm(tr, 0.0, 0.0) - l2) < 1e-12 * l2);

  const SpaceTimeTrace zero = make_trace(g, 0.0, 0.1, std::vector<ComplexField>(3, ComplexField(g)));
  CHECK(xsb_norm(zero, 1.0, 0.5) == 0.0);
  CHECK(hlc_norm(zero, 1.0, 0.5) == 0.0);
  CHECK(error_of([&] { make_trace(g, 0.0, 0.1, std::span(snaps).first(1)); }) == Errc::single_snapshot);
}

TEST_CASE("free single mode: direct summation and the three-bin closed form") {
  // omega = k^2/2 = 2 sits on a tau bin when dt = pi m0 / N.
  const std::size_t N = 32;
  const double dt = pi * 4.0 / N;
  const SpaceTimeTrace tr = mode_trace(8, 2, 2.0, N, dt);
  for (auto [s, b] : {std::pair{0.0, 0.0}, std::pair{1.0, 0.55}, std::pair{-0.5, -0.45}}) {
    const double fft = xsb_norm(tr, s, b);
    CHECK(std::abs(fft - direct_norm(tr, s, b, true)) < 1e-11 * fft);
    // Centre bin weight 1/2, neighbours 1/4 at modulation +-2 pi / (N dt) = +-0.5.
    const double closed = std::pow(3.0, s) * std::sqrt(N * 2.0 * pi * dt * (0.25 + 0.125 * std::pow(1.5, 2 * b)));
    CHECK(std::abs(fft - closed) < 1e-11 * closed);
  }
}

TEST_CASE("time-constant field: restriction norm reduces to the spatial weight") {
  const std::size_t N = 16;
  const double dt = 0.2;
  const SpaceTimeTrace tr = mode_trace(8, -3, 0.0, N, dt);
  const double dtau = 2.0 * pi / (N * dt);
  for (auto [ell, c] : {std::pair{0.0, 0.0}, std::pair{1.0, 0.55}, std::pair{2.0, -0.45}}) {
    const double v = hlc_norm(tr, ell, c);
    CHECK(std::abs(v - direct_norm(tr, ell, c, false)) < 1e-11 * v);
    const double closed = std::pow(4.0, ell) * std::sqrt(N * 2.0 * pi * dt * (0.25 + 0.125 * std::pow(1.0 + dtau, 2 * c)));
    CHECK(std::abs(v - closed) < 1e-11 * closed);
  }
}

TEST_CASE("region W membership") {
  struct Case {
    double s, ell;
    const char* violated;
  };
  const std::vector<Case> cases{
      {1.0, 0.0, nullptr},      {0.0, 1.0, "ell <= 2s"}, {1.0, 2.0, nullptr},  {0.5, 1.0, nullptr},
      {0.0, 0.0, nullptr},      {3.0, 2.0, nullptr},     {3.0, 1.5, "ell >= s - 1"}, {2.0, 3.5, "ell <= s + 1"},
      {1.0, -0.25, "ell >= 0"}, {0.4, 0.81, "ell <= 2s"}, {2.0, 3.0, nullptr},
  };
  for (const auto& c : cases) {
    CAPTURE(c.s);
    CAPTURE(c.ell);
    const auto why = region_w_violation(c.s, c.ell);
    if (c.violated) {
      REQUIRE(why.has_value());
      CHECK(why->find(c.violated) != std::string::npos);
      CHECK(error_of([&] { make_bourgain_params(c.s, c.ell, 0.5, 0.5); }) == Errc::outside_region);
    } else {
      CHECK_FALSE(why.has_value());
    }
  }
}

TEST_CASE("products need baked tapers") {
  const SpaceTimeTrace a = mode_trace(8, 1, 0.5, 8, 0.1);
  CHECK(error_of([&] { product(a, a); }) == Errc::invalid_argument);
  const SpaceTimeTrace b = bake_taper(a);
  CHECK(b.taper == Taper::none);
  CHECK(std::abs(xsb_norm(b, 0.7, 0.3) - xsb_norm(a, 0.7, 0.3)) < 1e-13 * xsb_norm(a, 0.7, 0.3));
  const SpaceTimeTrace p = product_conj(b, b);
  for (std::size_t i = 0; i < p.values.size(); ++i) CHECK(p.values[i].real() == doctest::Approx(std::norm(b.values[i])));
}

TEST_CASE("bilinear ratios are homogeneous of degree zero") {
  EnsembleSetup setup;
  setup.n_times = 16;
  auto uv = make_uv_ensemble(setup, 6, 7);
  auto uw = make_uw_ensemble(setup, 6, 8);
  const BilinearConfig cfg;
  const RatioStats a = bilinear_ratio_uv(uv, cfg);
  const RatioStats c = bilinear_ratio_uw(uw, cfg);
  for (auto& p : uv) {
    for (auto& z : p.first.values) z *= cplx(3.0, -2.0);
    for (auto& z : p.second.values) z *= 0.125;
  }
  for (auto& p : uw) {
    for (auto& z : p.first.values) z *= 7.5;
    for (auto& z : p.second.values) z *= cplx(0.0, 0.01);
  }
  const RatioStats b = bilinear_ratio_uv(uv, cfg);
  const RatioStats d = bilinear_ratio_uw(uw, cfg);
  REQUIRE(a.evaluated == 6u);
  REQUIRE(c.evaluated == 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(std::abs(a.ratios[i] - b.ratios[i]) <= 1e-12 * a.ratios[i]);
    CHECK(std::abs(c.ratios[i] - d.ratios[i]) <= 1e-12 * c.ratios[i]);
    CHECK(std::isfinite(a.ratios[i]));
  }
}

TEST_CASE("zero members are skipped and counted") {
  EnsembleSetup setup;
  setup.n_times = 8;
  auto uv = make_uv_ensemble(setup, 4, 1);
  for (auto& z : uv[1].second.values) z = 0.0;
  for (auto& z : uv[3].first.values) z = 0.0;
  const RatioStats st = bilinear_ratio_uv(uv, BilinearConfig{});
  CHECK(st.evaluated == 2u);
  CHECK(st.skipped == 2u);
  std::size_t hist = 0;
  for (auto h : st.histogram) hist += h;
  CHECK(hist == 2u);
  CHECK(st.mean <= st.max);
  BilinearConfig outside;
  outside.s = 0.0;
  outside.ell = 1.0;
  CHECK(error_of([&] { bilinear_ratio_uv(uv, outside); }) == Errc::outside_region);
}

TEST_CASE("ensembles are reproducible from the seed") {
  EnsembleSetup setup;
  setup.n_times = 8;
  const auto a = make_uw_ensemble(setup, 3, 99);
  const auto b = make_uw_ensemble(setup, 3, 99);
  for (std::size_t i = 0; i < 3; ++i) CHECK(a[i].first.values == b[i].first.values);
  const auto v = make_uv_ensemble(setup, 2, 5);
  for (const auto& z : v[0].second.values) CHECK(z.imag() == 0.0);
  EnsembleSetup wide = setup;
  wide.band = 4;
  CHECK(error_of([&] { make_uv_ensemble(wide, 1, 1); }) == Errc::aliasing);
}
