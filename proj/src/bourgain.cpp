#include "sdspec/bourgain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sdspec/error.hpp"
#include "sdspec/spectral.hpp"

namespace sdspec {
namespace {

void check_mesh(double dt, std::size_t n_times) {
  if (n_times < 2) throw Error(Errc::single_snapshot, "a space-time trace needs at least two snapshots");
  if (!(dt > 0.0)) throw Error(Errc::invalid_argument, "trace time step must be positive");
}

template <typename F>
SpaceTimeTrace collect(const Grid& grid, double t0, double dt, std::span<const F> snapshots, Taper taper) {
  SpaceTimeTrace tr;
  tr.grid = grid;
  tr.t0 = t0;
  tr.dt = dt;
  tr.n_times = snapshots.size();
  tr.taper = taper;
  check_mesh(dt, tr.n_times);
  tr.values.reserve(tr.n_times * grid.size());
  for (const auto& f : snapshots) {
    if (!(f.grid == grid)) throw Error(Errc::invalid_argument, "snapshot grid differs from the trace grid");
    tr.values.insert(tr.values.end(), f.values.begin(), f.values.end());
  }
  return tr;
}

// sum over (tau, xi) of weight^2 |F|^2, scaled to the space-time L2 norm.
template <typename Weight>
double weighted_norm(const SpaceTimeTrace& trace, Weight&& weight_sq) {
  check_mesh(trace.dt, trace.n_times);
  const Grid& g = trace.grid;
  const std::size_t n = g.size();
  std::vector<cplx> buf(trace.values.size());
  for (std::size_t k = 0; k < trace.n_times; ++k) {
    const double w = taper_weight(trace.taper, k, trace.n_times);
    for (std::size_t i = 0; i < n; ++i) buf[k * n + i] = w * trace.values[k * n + i];
  }
  std::vector<int> shape{static_cast<int>(trace.n_times)};
  shape.insert(shape.end(), g.dim(), g.points());
  dft_inplace(buf, shape, -1);

  const auto nt = static_cast<long>(trace.n_times);
  const double dtau = 2.0 * std::numbers::pi / (static_cast<double>(nt) * trace.dt);
  const auto& ksq = g.wavenumber_sq();
  double sum = 0.0;
  for (long m = 0; m < nt; ++m) {
    // exp(-i tau t) convention: the free wave exp(-i t |xi|^2/2) sits at tau = -|xi|^2/2.
    const double tau = dtau * static_cast<double>(m < nt / 2 ? m : m - nt);
    for (std::size_t i = 0; i < n; ++i) {
      sum += weight_sq(std::sqrt(ksq[i]), tau) * std::norm(buf[static_cast<std::size_t>(m) * n + i]);
    }
  }
  const double scale = g.cell_volume() * trace.dt / (static_cast<double>(n) * static_cast<double>(nt));
  return std::sqrt(sum * scale);
}

}  // namespace

double taper_weight(Taper taper, std::size_t n, std::size_t n_times) {
  if (taper == Taper::none) return 1.0;
  const double s = std::sin(std::numbers::pi * (static_cast<double>(n) + 0.5) / static_cast<double>(n_times));
  return s * s;
}

SpaceTimeTrace make_trace(const Grid& grid, double t0, double dt, std::span<const ComplexField> snapshots,
                          Taper taper) {
  return collect(grid, t0, dt, snapshots, taper);
}

SpaceTimeTrace make_trace(const Grid& grid, double t0, double dt, std::span<const RealField> snapshots,
                          Taper taper) {
  return collect(grid, t0, dt, snapshots, taper);
}

SpaceTimeTrace bake_taper(const SpaceTimeTrace& trace) {
  SpaceTimeTrace out = trace;
  const std::size_t n = trace.grid.size();
  for (std::size_t k = 0; k < trace.n_times; ++k) {
    const double w = taper_weight(trace.taper, k, trace.n_times);
    for (std::size_t i = 0; i < n; ++i) out.values[k * n + i] *= w;
  }
  out.taper = Taper::none;
  return out;
}

namespace {

template <typename Op>
SpaceTimeTrace combine(const SpaceTimeTrace& a, const SpaceTimeTrace& b, Op op) {
  if (!(a.grid == b.grid) || a.n_times != b.n_times || a.dt != b.dt || a.t0 != b.t0) {
    throw Error(Errc::invalid_argument, "traces live on different space-time meshes");
  }
  if (a.taper != Taper::none || b.taper != Taper::none) {
    throw Error(Errc::invalid_argument, "bake the taper into both traces before forming products");
  }
  SpaceTimeTrace out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = op(a.values[i], b.values[i]);
  return out;
}

}  // namespace

SpaceTimeTrace product(const SpaceTimeTrace& a, const SpaceTimeTrace& b) {
  return combine(a, b, [](cplx x, cplx y) { return x * y; });
}

SpaceTimeTrace product_conj(const SpaceTimeTrace& a, const SpaceTimeTrace& b) {
  return combine(a, b, [](cplx x, cplx y) { return x * std::conj(y); });
}

double xsb_norm(const SpaceTimeTrace& trace, double s, double b) {
  return weighted_norm(trace, [s, b](double xi, double tau) {
    return std::pow(bracket(xi), 2.0 * s) * std::pow(bracket(tau + 0.5 * xi * xi), 2.0 * b);
  });
}

double hlc_norm(const SpaceTimeTrace& trace, double ell, double c) {
  return weighted_norm(trace, [ell, c](double xi, double tau) {
    return std::pow(bracket(xi), 2.0 * ell) * std::pow(bracket(tau), 2.0 * c);
  });
}

std::optional<std::string> region_w_violation(double s, double ell) {
  constexpr double tol = 1e-12;
  std::ostringstream os;
  if (ell < -tol) {
    os << "ell >= 0 violated (ell = " << ell << ")";
  } else if (ell < s - 1.0 - tol) {
    os << "ell >= s - 1 violated (s = " << s << ", ell = " << ell << ")";
  } else if (ell > 2.0 * s + tol) {
    os << "ell <= 2s violated (s = " << s << ", ell = " << ell << ")";
  } else if (ell > s + 1.0 + tol) {
    os << "ell <= s + 1 violated (s = " << s << ", ell = " << ell << ")";
  } else {
    return std::nullopt;
  }
  return os.str();
}

BourgainParams make_bourgain_params(double s, double ell, double b, double c) {
  if (auto why = region_w_violation(s, ell)) throw Error(Errc::outside_region, "(s, ell) outside region W: " + *why);
  return {s, ell, b, c};
}

double bourgain_norm_u(const SpaceTimeTrace& trace, const BourgainParams& p) { return xsb_norm(trace, p.s, p.b); }

double restriction_norm_v(const SpaceTimeTrace& trace, double ell, double c) { return hlc_norm(trace, ell, c); }

std::optional<double> uv_ratio(const SpaceTimeTrace& u, const SpaceTimeTrace& v, const BilinearConfig& cfg) {
  const double b1 = 0.5 - cfg.eps1;
  const double b2 = 0.5 + cfg.eps2;
  const double c = 0.5 + cfg.eps;
  const double den = xsb_norm(u, cfg.s, b2) * hlc_norm(v, cfg.ell, c);
  if (!(den > 0.0)) return std::nullopt;
  const SpaceTimeTrace uv = product(bake_taper(u), bake_taper(v));
  return xsb_norm(uv, cfg.s, -b1) / den;
}

std::optional<double> uw_ratio(const SpaceTimeTrace& u, const SpaceTimeTrace& w, const BilinearConfig& cfg) {
  const double b = 0.5 - cfg.eps;
  const double b3 = 0.5 + cfg.eps3;
  const double den = xsb_norm(u, cfg.s, b3) * xsb_norm(w, cfg.s, b3);
  if (!(den > 0.0)) return std::nullopt;
  const SpaceTimeTrace uw = product_conj(bake_taper(u), bake_taper(w));
  return hlc_norm(uw, cfg.ell, -b) / den;
}

namespace {

template <typename RatioFn>
RatioStats ensemble_stats(std::span<const TracePair> ensemble, const BilinearConfig& cfg, std::size_t bins,
                          RatioFn ratio) {
  make_bourgain_params(cfg.s, cfg.ell, 0.5, 0.5);
  RatioStats st;
  for (const auto& pair : ensemble) {
    if (auto r = ratio(pair.first, pair.second, cfg)) {
      st.ratios.push_back(*r);
    } else {
      ++st.skipped;
    }
  }
  st.evaluated = st.ratios.size();
  if (st.ratios.empty()) return st;
  double sum = 0.0;
  st.hist_lo = st.ratios.front();
  for (double r : st.ratios) {
    st.max = std::max(st.max, r);
    st.hist_lo = std::min(st.hist_lo, r);
    sum += r;
  }
  st.mean = sum / static_cast<double>(st.ratios.size());
  st.hist_hi = st.max;
  st.histogram.assign(std::max<std::size_t>(bins, 1), 0);
  const double width = (st.hist_hi - st.hist_lo) / static_cast<double>(st.histogram.size());
  for (double r : st.ratios) {
    std::size_t k = width > 0.0 ? static_cast<std::size_t>((r - st.hist_lo) / width) : 0;
    st.histogram[std::min(k, st.histogram.size() - 1)]++;
  }
  return st;
}

}  // namespace

RatioStats bilinear_ratio_uv(std::span<const TracePair> ensemble, const BilinearConfig& cfg, std::size_t bins) {
  return ensemble_stats(ensemble, cfg, bins, uv_ratio);
}

RatioStats bilinear_ratio_uw(std::span<const TracePair> ensemble, const BilinearConfig& cfg, std::size_t bins) {
  return ensemble_stats(ensemble, cfg, bins, uw_ratio);
}

namespace {

struct Mode {
  std::size_t flat;
  double xi_sq;
};

std::vector<Mode> band_modes(const Grid& g, int band) {
  std::vector<Mode> modes;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.unflatten(i);
    bool inside = true;
    for (int d = 0; d < g.dim(); ++d) inside = inside && std::abs(g.signed_index(idx[d])) <= band;
    if (inside) modes.push_back({i, g.wavenumber_sq()[i]});
  }
  return modes;
}

template <typename Coefficient>
SpaceTimeTrace synthesize(const EnsembleSetup& setup, Coefficient&& coeff_at) {
  const Grid g = make_grid(setup.dim, setup.points, setup.extent);
  if (2 * setup.band >= setup.points / 2) {
    throw Error(Errc::aliasing, "ensemble band too wide: products would alias on this grid");
  }
  SpaceTimeTrace tr;
  tr.grid = g;
  tr.t0 = 0.0;
  tr.dt = setup.dt;
  tr.n_times = setup.n_times;
  tr.taper = Taper::raised_cosine;
  tr.values.resize(setup.n_times * g.size());
  const std::vector<int> shape(g.dim(), g.points());
  for (std::size_t k = 0; k < setup.n_times; ++k) {
    const double t = static_cast<double>(k) * setup.dt;
    std::vector<cplx> spec(g.size(), 0.0);
    coeff_at(t, spec);
    dft_inplace(spec, shape, +1);
    std::copy(spec.begin(), spec.end(), tr.values.begin() + static_cast<long>(k * g.size()));
  }
  return tr;
}

}  // namespace

SpaceTimeTrace random_dispersive_trace(const EnsembleSetup& setup, std::mt19937_64& rng) {
  const Grid g = make_grid(setup.dim, setup.points, setup.extent);
  const auto modes = band_modes(g, setup.band);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> mod(-setup.modulation, setup.modulation);
  std::vector<cplx> amp(modes.size());
  std::vector<double> shift(modes.size());
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const double decay = 1.0 / bracket(std::sqrt(modes[j].xi_sq));
    amp[j] = decay * cplx(gauss(rng), gauss(rng));
    shift[j] = mod(rng);
  }
  return synthesize(setup, [&](double t, std::vector<cplx>& spec) {
    for (std::size_t j = 0; j < modes.size(); ++j) {
      spec[modes[j].flat] = amp[j] * std::polar(1.0, -t * (0.5 * modes[j].xi_sq + shift[j]));
    }
  });
}

SpaceTimeTrace random_real_trace(const EnsembleSetup& setup, std::mt19937_64& rng) {
  const Grid g = make_grid(setup.dim, setup.points, setup.extent);
  const auto modes = band_modes(g, setup.band);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> freq(-setup.modulation, setup.modulation);
  std::vector<cplx> amp(modes.size());
  std::vector<double> omega(modes.size());
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const double decay = 1.0 / bracket(std::sqrt(modes[j].xi_sq));
    amp[j] = decay * cplx(gauss(rng), gauss(rng));
    omega[j] = freq(rng);
  }
  SpaceTimeTrace tr = synthesize(setup, [&](double t, std::vector<cplx>& spec) {
    for (std::size_t j = 0; j < modes.size(); ++j) spec[modes[j].flat] = amp[j] * std::polar(1.0, -omega[j] * t);
  });
  for (auto& z : tr.values) z = z.real();
  return tr;
}

std::vector<TracePair> make_uv_ensemble(const EnsembleSetup& setup, std::size_t members, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TracePair> out;
  out.reserve(members);
  for (std::size_t i = 0; i < members; ++i) {
    SpaceTimeTrace u = random_dispersive_trace(setup, rng);
    SpaceTimeTrace v = random_real_trace(setup, rng);
    out.push_back({std::move(u), std::move(v)});
  }
  return out;
}

std::vector<TracePair> make_uw_ensemble(const EnsembleSetup& setup, std::size_t members, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TracePair> out;
  out.reserve(members);
  for (std::size_t i = 0; i < members; ++i) {
    SpaceTimeTrace u = random_dispersive_trace(setup, rng);
    SpaceTimeTrace w = random_dispersive_trace(setup, rng);
    out.push_back({std::move(u), std::move(w)});
  }
  return out;
}

}  // namespace sdspec
