#include <doctest.h>

#include "oracles.hpp"
#include "sdspec/dynamics.hpp"
#include "sdspec/error.hpp"
#include "sdspec/picard.hpp"
#include "sdspec/spectral.hpp"

using namespace sdspec;
using oracle::error_of;

namespace {

double l2(const ComplexField& a, const ComplexField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s * a.grid.cell_volume());
}

}  // namespace

TEST_CASE("zero data converges at once") {
  const Grid g = make_grid(2, 16, 5.0);
  const PicardResult r = picard_duhamel_solve(ComplexField(g), RealField(g), make_params(1.0, 1), 0.1, 10, 5, 1e-12);
  CHECK(r.iterations == 1);
  CHECK(r.last_increment == 0.0);
  for (const auto& u : r.u) CHECK(lp_norm(u, kInfinity) == 0.0);
}

TEST_CASE("constant data matches the closed form to quadrature accuracy") {
  const Grid g = make_grid(1, 8, 2.0);
  const cplx a(0.6, 0.2);
  const double b = -0.3, mu = 0.5;
  ComplexField u0(g);
  RealField v0(g);
  for (auto& z : u0.values) z = a;
  for (auto& z : v0.values) z = b;
  for (int lambda : {1, -1}) {
    const PicardResult r = picard_duhamel_solve(u0, v0, make_params(mu, lambda), 0.2, 400, 50, 1e-13);
    for (std::size_t k = 0; k < r.times.size(); k += 50) {
      cplx ue;
      double ve;
      oracle::constant_solution(a, b, mu, lambda, r.times[k], ue, ve);
      CHECK(std::abs(r.u[k][0] - ue) < 1e-6);
      CHECK(std::abs(r.v[k][0] - ve) < 1e-6);
    }
  }
}

TEST_CASE("Duhamel oracle agrees with the split-step integrator") {
  const Grid g = make_grid(2, 64, 20.0);
  const ComplexField u0 = oracle::centred_gaussian(g, 1.0, 0.5);
  RealField v0(g);
  for (std::size_t i = 0; i < g.size(); ++i) v0[i] = 0.3 * std::norm(u0[i]);
  const SDParams p = make_params(1.0, -1);
  const int n_time = 400;
  const double T = 0.1;
  const PicardResult r = picard_duhamel_solve(u0, v0, p, T, n_time, 60, 1e-12);
  SDState s{u0, v0, 0.0, p};
  double worst = 0.0;
  evolve(s, StepControl{T / n_time, false}, T,
         [&](const SDState& st, std::size_t k) { worst = std::max(worst, l2(st.u, r.u[k])); }, 40);
  CHECK(worst < 1e-6);
}

TEST_CASE("oversized time horizon fails to contract") {
  const Grid g = make_grid(1, 16, 4.0);
  ComplexField u0(g);
  RealField v0(g);
  for (auto& z : u0.values) z = 3.0;
  for (auto& z : v0.values) z = 2.0;
  CHECK(error_of([&] { picard_duhamel_solve(u0, v0, make_params(0.1, -1), 50.0, 200, 40, 1e-12); }) ==
        Errc::no_contraction);
  CHECK(error_of([&] { picard_duhamel_solve(u0, v0, make_params(1.0, 1), 0.1, 10, 1, 1e-30); }) ==
        Errc::no_contraction);
  CHECK(error_of([&] { picard_duhamel_solve(u0, v0, make_params(1.0, 1), -1.0, 10, 5, 1e-8); }) ==
        Errc::invalid_argument);
}
