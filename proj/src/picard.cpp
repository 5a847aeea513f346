#include "sdspec/picard.hpp"

#include <cmath>
#include <string>

#include "sdspec/error.hpp"
#include "sdspec/spectral.hpp"

namespace sdspec {
namespace {

double l2_distance(const ComplexField& a, const ComplexField& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::norm(a[i] - b[i]);
  return std::sqrt(sum * a.grid.cell_volume());
}

}  // namespace

PicardResult picard_duhamel_solve(const ComplexField& u0, const RealField& v0, const SDParams& params, double T,
                                  int n_time, int max_iter, double tol) {
  make_params(params.mu, params.lambda);
  if (!(u0.grid == v0.grid)) throw Error(Errc::invalid_argument, "u0 and v0 live on different grids");
  if (!(T > 0.0) || n_time < 1 || max_iter < 1 || !(tol > 0.0)) {
    throw Error(Errc::invalid_argument, "picard_duhamel_solve needs T > 0, n_time >= 1, max_iter >= 1, tol > 0");
  }

  const Grid& g = u0.grid;
  const std::size_t n = g.size();
  const std::vector<int> shape(g.dim(), g.points());
  const double h = T / n_time;
  const double mu = params.mu;
  const double lam = params.lambda;
  const double decay = std::exp(-h / mu);

  // Per-step free propagator exp(-i h |xi|^2 / 2).
  std::vector<cplx> step_phase(n);
  for (std::size_t i = 0; i < n; ++i) step_phase[i] = std::polar(1.0, -0.5 * h * g.wavenumber_sq()[i]);

  PicardResult res;
  res.times.resize(n_time + 1);
  for (int k = 0; k <= n_time; ++k) res.times[k] = k * h;

  // Free evolution in spectral space, S(t_n) u0.
  std::vector<ComplexField> free_spec(n_time + 1);
  free_spec[0] = forward_transform(u0);
  for (int k = 1; k <= n_time; ++k) {
    free_spec[k] = free_spec[k - 1];
    for (std::size_t i = 0; i < n; ++i) free_spec[k][i] *= step_phase[i];
  }
  std::vector<ComplexField> current(n_time + 1);
  for (int k = 0; k <= n_time; ++k) current[k] = inverse_transform(free_spec[k]);

  std::vector<ComplexField> next(n_time + 1);
  std::vector<RealField> v_traj(n_time + 1);
  double first_increment = -1.0;

  for (int iter = 1; iter <= max_iter; ++iter) {
    RealField v = v0;
    ComplexField duhamel(g);  // int_0^{t_n} S(t_n - t') F(t') dt' in spectral space
    ComplexField f_prev;      // spectrum of u v at t_{n-1}
    double increment = 0.0;

    for (int k = 0; k <= n_time; ++k) {
      const ComplexField& u = current[k];
      if (k > 0) {
        const ComplexField& u_prev = current[k - 1];
        for (std::size_t i = 0; i < n; ++i) {
          const double rho_prev = std::norm(u_prev[i]);
          const double rho = std::norm(u[i]);
          v[i] = decay * v[i] + (lam / mu) * 0.5 * h * (decay * rho_prev + rho);
        }
      }
      v_traj[k] = v;

      ComplexField f(g);
      for (std::size_t i = 0; i < n; ++i) f[i] = u[i] * v[i];
      dft_inplace(f.values, shape, -1);

      if (k > 0) {
        for (std::size_t i = 0; i < n; ++i) {
          duhamel[i] = step_phase[i] * (duhamel[i] + 0.5 * h * f_prev[i]) + 0.5 * h * f[i];
        }
      }
      f_prev = std::move(f);

      ComplexField spec = free_spec[k];
      for (std::size_t i = 0; i < n; ++i) spec[i] -= cplx(0.0, 1.0) * duhamel[i];
      next[k] = inverse_transform(spec);
      increment = std::max(increment, l2_distance(next[k], current[k]));
    }

    std::swap(current, next);
    res.iterations = iter;
    res.last_increment = increment;

    if (!std::isfinite(increment)) {
      throw Error(Errc::no_contraction, "Picard iterates became non-finite; T is too large for contraction");
    }
    if (increment < tol) {
      res.u = std::move(current);
      res.v = std::move(v_traj);
      return res;
    }
    if (first_increment < 0.0) {
      first_increment = increment;
    } else if (increment > 1e3 * first_increment) {
      throw Error(Errc::no_contraction,
                  "Picard iterates diverge (increment " + std::to_string(increment) + "); T is too large");
    }
  }
  throw Error(Errc::no_contraction, "Picard iteration did not converge in " + std::to_string(max_iter) +
                                        " iterations (last increment " + std::to_string(res.last_increment) + ")");
}

}  // namespace sdspec
