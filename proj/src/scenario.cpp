#include "sdspec/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>

#include "sdspec/error.hpp"
#include "sdspec/gronwall.hpp"
#include "sdspec/snapshot.hpp"
#include "sdspec/spectral.hpp"

namespace sdspec {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

InitialKind parse_kind(const std::string& s, const std::string& key) {
  if (s == "gaussian") return InitialKind::gaussian;
  if (s == "constant") return InitialKind::constant;
  if (s == "mode") return InitialKind::mode;
  if (s == "random_bandlimited") return InitialKind::random_bandlimited;
  if (s == "debye_equilibrium") return InitialKind::debye_equilibrium;
  if (s == "from_file") return InitialKind::from_file;
  throw Error(Errc::config_invalid, "unknown initial data kind '" + s + "' for " + key);
}

InitialDataSpec resolve_initial(const ConfigMap& cfg, const std::string& field, int dim, std::uint64_t run_seed) {
  const std::string p = "initial." + field + ".";
  InitialDataSpec spec;
  spec.kind = parse_kind(get_text(cfg, p + "kind"), p + "kind");
  spec.amplitude = get_real(cfg, p + "amplitude");
  spec.width = get_real(cfg, p + "width");
  spec.center = get_real_list(cfg, p + "center");
  for (double k : get_real_list(cfg, p + "mode")) {
    if (k != std::round(k)) throw Error(Errc::config_invalid, p + "mode entries must be integers");
    spec.mode.push_back(static_cast<int>(k));
  }
  spec.cutoff = static_cast<int>(get_int(cfg, p + "cutoff"));
  const long seed = get_int(cfg, p + "seed");
  spec.seed = seed != 0 ? static_cast<std::uint64_t>(seed) : run_seed + (field == "u" ? 1 : 2);
  spec.path = get_text(cfg, p + "path");

  if (spec.kind == InitialKind::gaussian && !(spec.width > 0.0)) {
    throw Error(Errc::config_invalid, p + "width must be positive");
  }
  if (!spec.center.empty() && static_cast<int>(spec.center.size()) != dim) {
    throw Error(Errc::config_invalid, p + "center needs one entry per dimension");
  }
  if (spec.kind == InitialKind::mode && static_cast<int>(spec.mode.size()) != dim) {
    throw Error(Errc::config_invalid, p + "mode needs one integer wave index per dimension");
  }
  if (spec.kind == InitialKind::random_bandlimited && spec.cutoff < 0) {
    throw Error(Errc::config_invalid, p + "cutoff must be non-negative");
  }
  if (spec.kind == InitialKind::from_file && spec.path.empty()) {
    throw Error(Errc::config_invalid, p + "path is required for from_file");
  }
  if (spec.kind == InitialKind::debye_equilibrium && field == "u") {
    throw Error(Errc::config_invalid, "debye_equilibrium is only meaningful for initial.v");
  }
  return spec;
}

std::vector<cplx> random_bandlimited_values(const Grid& g, int cutoff, std::uint64_t seed) {
  if (2 * cutoff >= g.points()) throw Error(Errc::config_invalid, "random_bandlimited cutoff exceeds the grid band");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<cplx> spec(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.unflatten(i);
    bool inside = true;
    for (int d = 0; d < g.dim(); ++d) inside = inside && std::abs(g.signed_index(idx[d])) <= cutoff;
    if (inside) spec[i] = cplx(gauss(rng), gauss(rng));
  }
  const std::vector<int> shape(g.dim(), g.points());
  dft_inplace(spec, shape, +1);
  return spec;
}

void scale_to_peak(std::vector<cplx>& v, double peak) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  const double s = m > 0.0 ? peak / m : 0.0;
  for (auto& z : v) z *= s;
}

std::array<double, 3> centre_of(const InitialDataSpec& spec, const Grid& g) {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  for (int d = 0; d < g.dim(); ++d) c[d] = spec.center.empty() ? 0.5 * g.extent() : spec.center[d];
  return c;
}

double gaussian_at(const Grid& g, std::size_t i, const std::array<double, 3>& c, double width) {
  const auto x = g.position(i);
  double r2 = 0.0;
  for (int d = 0; d < g.dim(); ++d) r2 += (x[d] - c[d]) * (x[d] - c[d]);
  return std::exp(-r2 / (width * width));
}

double mode_phase(const Grid& g, std::size_t i, const std::vector<int>& mode) {
  const auto x = g.position(i);
  double ph = 0.0;
  for (int d = 0; d < g.dim(); ++d) ph += 2.0 * std::numbers::pi * mode[d] / g.extent() * x[d];
  return ph;
}

Snapshot load_matching(const std::string& path, const Grid& g) {
  Snapshot s = read_snapshot(path);
  if (!(s.grid() == g)) throw Error(Errc::config_invalid, "snapshot '" + path + "' grid differs from the run grid");
  return s;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

ScenarioConfig resolve_scenario(const ConfigMap& cfg) {
  ScenarioConfig sc;
  sc.name = get_text(cfg, "name");
  if (sc.name.empty()) throw Error(Errc::config_invalid, "name must not be empty");
  sc.seed = static_cast<std::uint64_t>(get_int(cfg, "seed"));
  sc.dim = static_cast<int>(get_int(cfg, "grid.dim"));
  sc.points = static_cast<int>(get_int(cfg, "grid.points"));
  sc.extent = get_real(cfg, "grid.extent");
  try {
    make_grid(sc.dim, sc.points, sc.extent);
    sc.params = make_params(get_real(cfg, "params.mu"), static_cast<int>(get_int(cfg, "params.lambda")));
  } catch (const Error& e) {
    if (e.code() == Errc::config_invalid) throw;
    throw Error(Errc::config_invalid, e.what());
  }
  sc.dt = get_real(cfg, "time.dt");
  sc.t_end = get_real(cfg, "time.t_end");
  sc.dealias = get_bool(cfg, "time.dealias");
  if (!(sc.dt > 0.0)) throw Error(Errc::config_invalid, "time.dt must be positive");
  if (!(sc.t_end >= 0.0)) throw Error(Errc::config_invalid, "time.t_end must be non-negative");
  const long cadence = get_int(cfg, "diagnostics.cadence");
  if (cadence < 1) throw Error(Errc::config_invalid, "diagnostics.cadence must be at least 1");
  sc.cadence = static_cast<std::size_t>(cadence);
  sc.initial_u = resolve_initial(cfg, "u", sc.dim, sc.seed);
  sc.initial_v = resolve_initial(cfg, "v", sc.dim, sc.seed);
  sc.output_dir = get_text(cfg, "output.dir");
  sc.snapshot_times = get_real_list(cfg, "output.snapshot_times");
  for (double t : sc.snapshot_times) {
    if (t < 0.0 || t > sc.t_end) throw Error(Errc::config_invalid, "output.snapshot_times must lie in [0, t_end]");
  }
  std::sort(sc.snapshot_times.begin(), sc.snapshot_times.end());
  sc.plot = get_bool(cfg, "output.plot");
  sc.beta = get_real(cfg, "beta.value");
  sc.beta_safety = get_real(cfg, "beta.safety");
  if (sc.beta < 0.0) throw Error(Errc::config_invalid, "beta.value must be non-negative");
  if (!(sc.beta_safety > 0.0)) throw Error(Errc::config_invalid, "beta.safety must be positive");
  const long ens = get_int(cfg, "beta.ensemble_size");
  if (ens < 0) throw Error(Errc::config_invalid, "beta.ensemble_size must be non-negative");
  sc.beta_ensemble_size = static_cast<std::size_t>(ens);
  return sc;
}

ComplexField make_initial_u(const InitialDataSpec& spec, const Grid& g) {
  ComplexField u(g);
  switch (spec.kind) {
    case InitialKind::gaussian: {
      const auto c = centre_of(spec, g);
      for (std::size_t i = 0; i < g.size(); ++i) u[i] = spec.amplitude * gaussian_at(g, i, c, spec.width);
      break;
    }
    case InitialKind::constant:
      std::fill(u.values.begin(), u.values.end(), cplx(spec.amplitude));
      break;
    case InitialKind::mode:
      for (std::size_t i = 0; i < g.size(); ++i) u[i] = std::polar(spec.amplitude, mode_phase(g, i, spec.mode));
      break;
    case InitialKind::random_bandlimited:
      u.values = random_bandlimited_values(g, spec.cutoff, spec.seed);
      scale_to_peak(u.values, spec.amplitude);
      break;
    case InitialKind::debye_equilibrium:
      throw Error(Errc::config_invalid, "debye_equilibrium is only meaningful for v");
    case InitialKind::from_file: {
      Snapshot s = load_matching(spec.path, g);
      if (s.is_complex()) {
        u = std::get<ComplexField>(std::move(s.field));
      } else {
        u = to_complex(std::get<RealField>(s.field));
      }
      break;
    }
  }
  return u;
}

RealField make_initial_v(const InitialDataSpec& spec, const Grid& g, const ComplexField& u0, int lambda) {
  RealField v(g);
  switch (spec.kind) {
    case InitialKind::gaussian: {
      const auto c = centre_of(spec, g);
      for (std::size_t i = 0; i < g.size(); ++i) v[i] = spec.amplitude * gaussian_at(g, i, c, spec.width);
      break;
    }
    case InitialKind::constant:
      std::fill(v.values.begin(), v.values.end(), spec.amplitude);
      break;
    case InitialKind::mode:
      for (std::size_t i = 0; i < g.size(); ++i) v[i] = spec.amplitude * std::cos(mode_phase(g, i, spec.mode));
      break;
    case InitialKind::random_bandlimited: {
      auto vals = random_bandlimited_values(g, spec.cutoff, spec.seed);
      for (auto& z : vals) z = z.real();
      scale_to_peak(vals, spec.amplitude);
      for (std::size_t i = 0; i < g.size(); ++i) v[i] = vals[i].real();
      break;
    }
    case InitialKind::debye_equilibrium:
      for (std::size_t i = 0; i < g.size(); ++i) v[i] = lambda * std::norm(u0[i]);
      break;
    case InitialKind::from_file: {
      Snapshot s = load_matching(spec.path, g);
      if (s.is_complex()) throw Error(Errc::config_invalid, "initial v snapshot must hold a real field");
      v = std::get<RealField>(std::move(s.field));
      break;
    }
  }
  return v;
}

SDState initial_state(const ScenarioConfig& cfg) {
  const Grid g = make_grid(cfg.dim, cfg.points, cfg.extent);
  SDState s;
  s.params = cfg.params;
  s.u = make_initial_u(cfg.initial_u, g);
  s.v = make_initial_v(cfg.initial_v, g, s.u, cfg.params.lambda);
  s.t = 0.0;
  return s;
}

std::vector<ComplexField> gn_calibration_ensemble(const Grid& g, std::size_t random_members, std::uint64_t seed) {
  std::vector<ComplexField> out;
  const double L = g.extent();
  std::array<double, 3> c{0.5 * L, 0.5 * L, 0.5 * L};
  for (double w : {L / 20.0, L / 10.0, L / 6.0}) {
    ComplexField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = gaussian_at(g, i, c, w);
    out.push_back(std::move(f));
  }
  // Localized random members: a Gaussian window times a few random plane waves.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double w = L / 8.0;
  const int band = 3;
  const double dk = 2.0 * std::numbers::pi / (2.0 * w);
  for (std::size_t m = 0; m < random_members; ++m) {
    std::vector<std::pair<std::array<int, 3>, cplx>> waves;
    std::array<int, 3> k{0, 0, 0};
    const int span = 2 * band + 1;
    int total = 1;
    for (int d = 0; d < g.dim(); ++d) total *= span;
    for (int n = 0; n < total; ++n) {
      int rest = n;
      for (int d = 0; d < g.dim(); ++d) {
        k[d] = rest % span - band;
        rest /= span;
      }
      waves.push_back({k, cplx(gauss(rng), gauss(rng))});
    }
    ComplexField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto x = g.position(i);
      cplx sum = 0.0;
      for (const auto& [kk, a] : waves) {
        double ph = 0.0;
        for (int d = 0; d < g.dim(); ++d) ph += dk * kk[d] * (x[d] - c[d]);
        sum += a * std::polar(1.0, ph);
      }
      f[i] = sum * gaussian_at(g, i, c, w);
    }
    out.push_back(std::move(f));
  }
  return out;
}

double resolve_beta(const ScenarioConfig& cfg, const ComplexField& u0) {
  if (cfg.beta > 0.0) return cfg.beta;
  std::vector<ComplexField> ensemble = gn_calibration_ensemble(u0.grid, cfg.beta_ensemble_size, cfg.seed);
  if (lp_norm(u0, 2.0) > 0.0 && gradient_l2(u0) > 0.0) ensemble.push_back(u0);
  return calibrate_beta(ensemble, cfg.beta_safety);
}

EnvelopeKind envelope_kind(int dim) {
  if (dim == 2) return EnvelopeKind::f_2d;
  if (dim == 1) return EnvelopeKind::g_1d;
  return EnvelopeKind::none;
}

std::string diagnostics_csv_header() {
  return "t,mass,energy_a,energy_b,grad_u_l2_sq,v_l2_sq,f,u_linf,u_l4,vt_l2_sq,gronwall_envelope\n";
}

std::string diagnostics_csv_row(const DiagnosticsRecord& r) {
  std::string row;
  for (double x : {r.t, r.mass, r.energy_a, r.energy_b, r.grad_u_l2_sq, r.v_l2_sq, r.f, r.u_linf, r.u_l4,
                   r.vt_l2_sq, r.gronwall_envelope}) {
    if (!row.empty()) row += ',';
    row += format_double(x);
  }
  return row + "\n";
}

std::string gnuplot_script() {
  return "# gnuplot script for diagnostics.csv\n"
         "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set xlabel 't'\n"
         "set multiplot layout 3,1\n"
         "plot 'diagnostics.csv' using 1:2 with lines\n"
         "set logscale y\n"
         "plot 'diagnostics.csv' using 1:7 with lines, '' using 1:11 with lines\n"
         "unset logscale y\n"
         "plot 'diagnostics.csv' using 1:8 with lines\n"
         "unset multiplot\n";
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  RunResult res;
  SDState state = initial_state(cfg);
  const StepControl ctl{cfg.dt, cfg.dealias};
  const std::size_t steps = step_count(cfg.t_end, cfg.dt);
  const EnvelopeKind kind = envelope_kind(cfg.dim);

  double beta = kNaN;
  std::optional<EnvelopeTracker> tracker;
  std::string envelope_note;
  if (kind == EnvelopeKind::f_2d) {
    beta = resolve_beta(cfg, state.u);
    tracker.emplace(make_gronwall_tracker(state, beta));
  } else if (kind == EnvelopeKind::g_1d) {
    tracker.emplace(make_g_tracker_1d(state));
  } else {
    envelope_note = "no a-priori envelope is available in three dimensions";
  }
  if (tracker && tracker->segments().front().window < std::min(cfg.dt, std::max(cfg.t_end, cfg.dt))) {
    envelope_note = "envelope window is shorter than the time step; envelope not tracked";
    tracker.reset();
  }

  const bool write = !cfg.output_dir.empty();
  if (write) std::filesystem::create_directories(std::filesystem::path(cfg.output_dir) / "snapshots");
  std::size_t next_snapshot = 0;
  std::vector<std::string> snapshot_files;

  double min_margin = kInfinity;
  double min_rel_margin = kInfinity;
  double max_f = 0.0, max_linf = 0.0, max_drift = 0.0, max_mismatch = 0.0;
  const double mass0 = mass(state.u);

  auto observer = [&](const SDState& s, std::size_t k) {
    const double next_dt = std::min(cfg.dt, cfg.t_end - s.t);
    if (tracker && next_dt > 0.0) tracker->observe(s, next_dt);

    while (write && next_snapshot < cfg.snapshot_times.size() &&
           s.t >= cfg.snapshot_times[next_snapshot] - 1e-12 * std::max(1.0, s.t)) {
      char name[64];
      std::snprintf(name, sizeof name, "%04zu", next_snapshot);
      const auto dir = std::filesystem::path(cfg.output_dir) / "snapshots";
      const std::string up = (dir / (std::string("u_") + name + ".snap")).string();
      const std::string vp = (dir / (std::string("v_") + name + ".snap")).string();
      write_snapshot(s.u, s.t, up);
      write_snapshot(s.v, s.t, vp);
      snapshot_files.push_back(up);
      snapshot_files.push_back(vp);
      ++next_snapshot;
    }

    if (k % cfg.cadence != 0 && k != steps) return;
    DiagnosticsRecord r = measure(s);
    r.gronwall_envelope = kNaN;
    if (tracker) {
      r.gronwall_envelope = tracker->envelope(s.t);
      const double bounded = kind == EnvelopeKind::g_1d ? g_functional_1d(s) : r.f;
      const double margin = r.gronwall_envelope - bounded;
      min_margin = std::min(min_margin, margin);
      min_rel_margin = std::min(min_rel_margin, margin / std::max(std::abs(r.gronwall_envelope), 1e-300));
    }
    max_f = std::max(max_f, r.f);
    max_linf = std::max(max_linf, r.u_linf);
    if (mass0 > 0.0) max_drift = std::max(max_drift, std::abs(r.mass - mass0) / mass0);
    max_mismatch = std::max(max_mismatch, std::abs(r.energy_a - r.energy_b) / (1.0 + std::abs(r.energy_a)));
    res.records.push_back(r);
  };

  try {
    state = evolve(state, ctl, cfg.t_end, observer, 1);
    res.final_state = state;
  } catch (const DivergenceError& e) {
    res.diverged = true;
    res.divergence_time = e.time();
  }

  res.min_envelope_margin = tracker ? min_margin : kNaN;
  res.envelope_violated = tracker && min_margin < 0.0;

  auto& s = res.summary;
  s["name"] = cfg.name;
  s["dim"] = cfg.dim;
  s["points"] = cfg.points;
  s["extent"] = cfg.extent;
  s["mu"] = cfg.params.mu;
  s["lambda"] = cfg.params.lambda;
  s["dt"] = cfg.dt;
  s["t_end"] = cfg.t_end;
  s["seed"] = cfg.seed;
  s["completed"] = !res.diverged;
  s["diverged"] = res.diverged;
  s["divergence_time"] = res.diverged ? nlohmann::ordered_json(res.divergence_time) : nlohmann::ordered_json();
  if (res.diverged) {
    s["hint"] = "integration diverged; retry with grid.points = " + std::to_string(2 * cfg.points) +
                " or time.dt = " + format_double(cfg.dt / 2);
  }
  s["records"] = res.records.size();
  s["t_final"] = res.records.empty() ? 0.0 : res.records.back().t;
  s["mass_initial"] = mass0;
  s["mass_final"] = res.records.empty() ? mass0 : res.records.back().mass;
  s["max_relative_mass_drift"] = max_drift;
  s["max_energy_form_mismatch"] = max_mismatch;
  s["max_f"] = max_f;
  s["u_linf_initial"] = res.records.empty() ? 0.0 : res.records.front().u_linf;
  s["max_u_linf"] = max_linf;
  auto& env = s["envelope"];
  env["functional"] = kind == EnvelopeKind::f_2d ? "f" : (kind == EnvelopeKind::g_1d ? "g" : "none");
  env["tracked"] = tracker.has_value();
  if (!envelope_note.empty()) env["note"] = envelope_note;
  env["beta"] = std::isnan(beta) ? nlohmann::ordered_json() : nlohmann::ordered_json(beta);
  if (tracker) {
    const auto& segs = tracker->segments();
    env["window"] = std::isfinite(segs.front().window) ? nlohmann::ordered_json(segs.front().window)
                                                       : nlohmann::ordered_json("unbounded");
    env["alpha0"] = segs.front().amplitude;
    env["alpha1"] = segs.front().rate;
    env["restarts"] = segs.size() - 1;
    env["min_margin"] = min_margin;
    env["min_relative_margin"] = min_rel_margin;
  } else {
    env["min_margin"] = nlohmann::ordered_json();
  }
  env["violated"] = res.envelope_violated;
  if (!snapshot_files.empty()) s["snapshots"] = snapshot_files;

  if (write) {
    res.output_dir = cfg.output_dir;
    std::string csv = diagnostics_csv_header();
    for (const auto& r : res.records) csv += diagnostics_csv_row(r);
    const auto dir = std::filesystem::path(cfg.output_dir);
    write_file_atomic((dir / "diagnostics.csv").string(), csv);
    write_file_atomic((dir / "summary.json").string(), s.dump(2) + "\n");
    if (cfg.plot) write_file_atomic((dir / "plot.gp").string(), gnuplot_script());
  }
  return res;
}

ScenarioConfig besse_bidegaray_config(const ProbeOptions& opt) {
  ScenarioConfig c;
  c.name = "besse_bidegaray";
  c.dim = 2;
  c.points = opt.points;
  c.extent = opt.extent;
  c.params = make_params(opt.mu, opt.lambda);
  c.dt = opt.dt;
  c.t_end = opt.t_end;
  c.initial_u.kind = InitialKind::gaussian;
  c.initial_u.amplitude = 1.0;
  c.initial_u.width = 1.0;
  c.initial_v.kind = InitialKind::debye_equilibrium;
  c.cadence = opt.cadence;
  c.seed = opt.seed;
  c.beta_safety = opt.beta_safety;
  c.output_dir = opt.output_dir;
  return c;
}

ProbeReport besse_bidegaray_probe(const ProbeOptions& opt) {
  ProbeReport rep;
  rep.run = run_scenario(besse_bidegaray_config(opt));
  const auto& recs = rep.run.records;
  if (!recs.empty() && recs.front().u_linf > 0.0) {
    double m = 0.0;
    for (const auto& r : recs) m = std::max(m, r.u_linf);
    rep.linf_growth = m / recs.front().u_linf;
  }
  for (const auto& r : recs) rep.max_f = std::max(rep.max_f, r.f);
  rep.min_envelope_margin = rep.run.min_envelope_margin;
  rep.diverged = rep.run.diverged;
  rep.divergence_time = rep.run.divergence_time;
  if (rep.diverged) {
    rep.hint = "diverged at t = " + format_double(rep.divergence_time) + "; refine to grid.points = " +
               std::to_string(2 * opt.points) + " or time.dt = " + format_double(opt.dt / 2);
  }
  auto& s = rep.run.summary;
  s["probe"] = {{"linf_growth", rep.linf_growth}, {"max_f", rep.max_f}, {"min_envelope_margin", rep.min_envelope_margin}};
  if (!rep.hint.empty()) s["probe"]["hint"] = rep.hint;
  if (!opt.output_dir.empty()) {
    write_file_atomic((std::filesystem::path(opt.output_dir) / "summary.json").string(), s.dump(2) + "\n");
  }
  return rep;
}

double l2_distance(const ComplexField& a, const ComplexField& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::norm(a[i] - b[i]);
  return std::sqrt(sum * a.grid.cell_volume());
}

double l2_distance(const RealField& a, const RealField& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum * a.grid.cell_volume());
}

ScalingReport scaling_symmetry_check(const ScenarioConfig& base, double mu, const std::vector<double>& times) {
  ScenarioConfig cfg = base;
  cfg.params = make_params(mu, base.params.lambda);
  SDState run_mu = initial_state(cfg);
  SDState run_one = scaling_transform(run_mu);
  const StepControl ctl_mu{cfg.dt, cfg.dealias};
  const StepControl ctl_one{cfg.dt / mu, cfg.dealias};

  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());
  ScalingReport rep;
  for (double t : sorted) {
    if (t < 0.0) throw Error(Errc::invalid_argument, "comparison times must be non-negative");
    run_mu = evolve(std::move(run_mu), ctl_mu, mu * t);
    run_one = evolve(std::move(run_one), ctl_one, t);
    const SDState mapped = scaling_transform(run_mu);
    rep.times.push_back(t);
    rep.u_discrepancy.push_back(l2_distance(mapped.u, run_one.u));
    rep.v_discrepancy.push_back(l2_distance(mapped.v, run_one.v));
    rep.max_discrepancy = std::max({rep.max_discrepancy, rep.u_discrepancy.back(), rep.v_discrepancy.back()});
  }
  return rep;
}

std::vector<NlsLimitRow> nls_limit_study(const ScenarioConfig& base, const std::vector<double>& mu_list) {
  if (mu_list.empty()) throw Error(Errc::invalid_argument, "mu list is empty");
  for (std::size_t i = 0; i < mu_list.size(); ++i) {
    if (!(mu_list[i] > 0.0)) throw Error(Errc::invalid_argument, "mu values must be positive");
    if (i > 0 && !(mu_list[i] < mu_list[i - 1])) throw Error(Errc::invalid_argument, "mu list must be strictly decreasing");
  }
  const Grid g = make_grid(base.dim, base.points, base.extent);
  const ComplexField u0 = make_initial_u(base.initial_u, g);
  const int lambda = base.params.lambda;

  ComplexField reference;
  try {
    reference = nls_evolve(u0, lambda, base.dt, base.t_end);
  } catch (const DivergenceError&) {
    throw Error(Errc::integration_diverged, "NLS reference diverged; the limit study has no reference");
  }

  std::vector<NlsLimitRow> rows;
  for (double mu : mu_list) {
    NlsLimitRow row;
    row.mu = mu;
    SDState s;
    s.params = make_params(mu, lambda);
    s.u = u0;
    s.v = RealField(g);
    for (std::size_t i = 0; i < g.size(); ++i) s.v[i] = lambda * std::norm(u0[i]);
    try {
      s = evolve(std::move(s), StepControl{base.dt, base.dealias}, base.t_end);
      row.error = l2_distance(s.u, reference);
    } catch (const DivergenceError& e) {
      row.diverged = true;
      row.error = kNaN;
      row.note = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

std::string default_output_root() {
  const char* env = std::getenv("SD_SPECTRAL_OUT");
  return env && *env ? std::string(env) : std::string("runs");
}

}  // namespace sdspec
