#pragma once

#include <vector>

#include "sdspec/dynamics.hpp"

namespace sdspec {

struct PicardResult {
  std::vector<double> times;       // uniform mesh t_n = n T / n_time, n = 0..n_time
  std::vector<ComplexField> u;     // u(t_n)
  std::vector<RealField> v;        // v(t_n) reconstructed from the final iterate
  int iterations = 0;
  double last_increment = 0.0;     // max_n ||u^{k+1}(t_n) - u^k(t_n)||_2
};

/// Fixed-point iteration on the Duhamel form
///   u(t) = S(t) u0 - i int_0^t S(t - t') [u v](t') dt',
///   v(t) = e^{-t/mu} v0 + (lambda/mu) int_0^t e^{-(t-t')/mu} |u(t')|^2 dt',
/// both integrals by the composite trapezoid rule on the uniform mesh.
/// Starts from the free evolution S(t) u0 and stops once successive iterates
/// differ by less than `tol` in max-in-time L2. Throws no_contraction when the
/// increments blow up or max_iter is exhausted.
PicardResult picard_duhamel_solve(const ComplexField& u0, const RealField& v0, const SDParams& params, double T,
                                  int n_time, int max_iter, double tol);

}  // namespace sdspec
