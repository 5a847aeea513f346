#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sdspec/field.hpp"

namespace sdspec {

enum class Taper { none, raised_cosine };

/// Snapshots of a field on a uniform time mesh t_n = t0 + n dt, stored
/// snapshot-major (time outermost, then the grid's row-major order).
struct SpaceTimeTrace {
  Grid grid;
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t n_times = 0;
  std::vector<cplx> values;
  Taper taper = Taper::raised_cosine;

  std::span<cplx> snapshot(std::size_t n) { return {values.data() + n * grid.size(), grid.size()}; }
  std::span<const cplx> snapshot(std::size_t n) const { return {values.data() + n * grid.size(), grid.size()}; }
};

SpaceTimeTrace make_trace(const Grid& grid, double t0, double dt, std::span<const ComplexField> snapshots,
                          Taper taper = Taper::raised_cosine);
SpaceTimeTrace make_trace(const Grid& grid, double t0, double dt, std::span<const RealField> snapshots,
                          Taper taper = Taper::raised_cosine);

/// Weight sin^2(pi (n + 1/2) / n_times) for the raised-cosine taper, 1 otherwise.
double taper_weight(Taper taper, std::size_t n, std::size_t n_times);

/// Returns a copy with the taper multiplied into the samples and taper = none.
SpaceTimeTrace bake_taper(const SpaceTimeTrace& trace);

/// Pointwise products of two traces on the same mesh; tapers must both be none.
SpaceTimeTrace product(const SpaceTimeTrace& a, const SpaceTimeTrace& b);
SpaceTimeTrace product_conj(const SpaceTimeTrace& a, const SpaceTimeTrace& b);

/// ||(1+|xi|)^s (1+|tau + |xi|^2/2|)^b u^(xi, tau)||, discretized by a
/// space-time DFT of the tapered trace and normalized so s = b = 0 gives the
/// space-time L2 norm. Throws single_snapshot for fewer than two snapshots.
double xsb_norm(const SpaceTimeTrace& trace, double s, double b);

/// ||(1+|xi|)^ell (1+|tau|)^c v^(xi, tau)|| with the same discretization.
double hlc_norm(const SpaceTimeTrace& trace, double ell, double c);

/// Reports the first inequality of max{0, s-1} <= ell <= min{2s, s+1} that
/// (s, ell) violates, or nullopt inside the region.
std::optional<std::string> region_w_violation(double s, double ell);

struct BourgainParams {
  double s = 0.0;
  double ell = 0.0;
  double b = 0.5;
  double c = 0.5;
};

/// Throws outside_region naming the violated inequality.
BourgainParams make_bourgain_params(double s, double ell, double b, double c);

double bourgain_norm_u(const SpaceTimeTrace& trace, const BourgainParams& p);
double restriction_norm_v(const SpaceTimeTrace& trace, double ell, double c);

/// Exponents of the two bilinear experiments, all derived from epsilons.
struct BilinearConfig {
  double s = 1.0;
  double ell = 0.0;
  double eps = 0.05;   // c = 1/2 + eps for v; b = 1/2 - eps in the u conj(w) target norm
  double eps1 = 0.05;  // b1 = 1/2 - eps1
  double eps2 = 0.05;  // b2 = 1/2 + eps2
  double eps3 = 0.05;  // b3 = 1/2 + eps3
};

/// R = ||u v||_{X^{s,-b1}} / (||u||_{X^{s,b2}} ||v||_{H^{ell,c}}); nullopt if
/// the denominator vanishes.
std::optional<double> uv_ratio(const SpaceTimeTrace& u, const SpaceTimeTrace& v, const BilinearConfig& cfg);

/// R' = ||u conj(w)||_{H^{ell,-b}} / (||u||_{X^{s,b3}} ||w||_{X^{s,b3}}).
std::optional<double> uw_ratio(const SpaceTimeTrace& u, const SpaceTimeTrace& w, const BilinearConfig& cfg);

struct RatioStats {
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  double max = 0.0;
  double mean = 0.0;
  double hist_lo = 0.0;
  double hist_hi = 0.0;
  std::vector<std::size_t> histogram;
  std::vector<double> ratios;
};

struct TracePair {
  SpaceTimeTrace first;
  SpaceTimeTrace second;
};

/// Throws outside_region if (cfg.s, cfg.ell) is not in W.
RatioStats bilinear_ratio_uv(std::span<const TracePair> ensemble, const BilinearConfig& cfg,
                             std::size_t bins = 20);
RatioStats bilinear_ratio_uw(std::span<const TracePair> ensemble, const BilinearConfig& cfg,
                             std::size_t bins = 20);

/// Random band-limited members for the bilinear probes.
struct EnsembleSetup {
  int dim = 2;
  int points = 16;
  double extent = 6.283185307179586;
  std::size_t n_times = 64;
  double dt = 0.05;
  int band = 3;             // |k_d| <= band on every axis
  double modulation = 2.0;  // max |tau + |xi|^2/2| for u-type, max |tau| for v-type
};

/// u-type member: sum_k a_k exp(i xi.x - i t (|xi|^2/2 + delta_k)), tapered.
SpaceTimeTrace random_dispersive_trace(const EnsembleSetup& setup, std::mt19937_64& rng);
/// v-type member: real, sum_k Re b_k exp(i xi.x - i omega_k t), tapered.
SpaceTimeTrace random_real_trace(const EnsembleSetup& setup, std::mt19937_64& rng);

std::vector<TracePair> make_uv_ensemble(const EnsembleSetup& setup, std::size_t members, std::uint64_t seed);
std::vector<TracePair> make_uw_ensemble(const EnsembleSetup& setup, std::size_t members, std::uint64_t seed);

}  // namespace sdspec
