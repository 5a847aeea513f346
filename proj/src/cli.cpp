#include "sdspec/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <thread>

#include "sdspec/bourgain.hpp"
#include "sdspec/config.hpp"
#include "sdspec/diagnostics.hpp"
#include "sdspec/error.hpp"
#include "sdspec/scenario.hpp"
#include "sdspec/snapshot.hpp"
#include "sdspec/spectral.hpp"

namespace sdspec {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Common {
  std::string config_path;
  std::string positional_config;
  std::vector<std::string> sets;
  std::string out;
  int jobs = 1;
  std::optional<long> seed;
  bool quiet = false;
};

struct Layers {
  ConfigMap full;      // defaults < file < overrides
  ConfigMap explicit_;  // file < overrides, without defaults
};

Layers load_layers(const Common& c) {
  if (!c.config_path.empty() && !c.positional_config.empty() && c.config_path != c.positional_config) {
    throw Error(Errc::config_invalid, "two different config files given");
  }
  const std::string path = c.config_path.empty() ? c.positional_config : c.config_path;
  Layers l;
  if (!path.empty()) l.explicit_ = load_config_file(path);
  std::vector<std::string> overrides = c.sets;
  if (c.seed) overrides.push_back("seed=" + std::to_string(*c.seed));
  l.full = layer_config(l.explicit_, overrides);
  for (const auto& o : overrides) apply_override(l.explicit_, o);
  return l;
}

std::string output_dir(const Common& c, const ConfigMap& full, const std::string& name) {
  if (!c.out.empty()) return c.out;
  const std::string configured = get_text(full, "output.dir");
  if (!configured.empty()) return configured;
  return (fs::path(default_output_root()) / name).string();
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int finish(const json& summary, const Common& c, std::ostream& out, int code) {
  if (!c.quiet) out << summary.dump(2) << "\n";
  return code;
}

int cmd_validate(const Common& c, std::ostream& out) {
  const Layers l = load_layers(c);
  resolve_scenario(l.full);
  if (get_real_list(l.full, "bilinear.s").size() != get_real_list(l.full, "bilinear.ell").size()) {
    throw Error(Errc::config_invalid, "bilinear.s and bilinear.ell must have the same length");
  }
  if (!c.quiet) out << render_config(l.full);
  return exit_ok;
}

int cmd_run(const Common& c, std::ostream& out, std::ostream& err) {
  const Layers l = load_layers(c);
  ScenarioConfig cfg = resolve_scenario(l.full);
  cfg.output_dir = output_dir(c, l.full, cfg.name);
  const RunResult res = run_scenario(cfg);
  if (res.diverged) {
    err << "run '" << cfg.name << "' diverged at t = " << fmt(res.divergence_time) << "\n";
    return finish(res.summary, c, out, exit_diverged);
  }
  if (res.envelope_violated) {
    err << "run '" << cfg.name << "' violated the a-priori envelope (min margin " << fmt(res.min_envelope_margin)
        << ")\n";
    return finish(res.summary, c, out, exit_invariant_failed);
  }
  return finish(res.summary, c, out, exit_ok);
}

int cmd_probe(const Common& c, std::optional<double> mu, std::optional<int> lambda, std::ostream& out,
              std::ostream& err) {
  const Layers l = load_layers(c);
  const ConfigMap& e = l.explicit_;
  ProbeOptions opt;
  if (e.count("grid.dim") && get_int(e, "grid.dim") != 2) {
    throw Error(Errc::config_invalid, "probe-blowup is two-dimensional");
  }
  if (e.count("grid.points")) opt.points = static_cast<int>(get_int(e, "grid.points"));
  if (e.count("grid.extent")) opt.extent = get_real(e, "grid.extent");
  if (e.count("time.dt")) opt.dt = get_real(e, "time.dt");
  if (e.count("time.t_end")) opt.t_end = get_real(e, "time.t_end");
  if (e.count("diagnostics.cadence")) opt.cadence = static_cast<std::size_t>(get_int(e, "diagnostics.cadence"));
  if (e.count("beta.safety")) opt.beta_safety = get_real(e, "beta.safety");
  if (e.count("params.mu")) opt.mu = get_real(e, "params.mu");
  if (e.count("params.lambda")) opt.lambda = static_cast<int>(get_int(e, "params.lambda"));
  opt.seed = static_cast<std::uint64_t>(get_int(l.full, "seed"));
  if (mu) opt.mu = *mu;
  if (lambda) opt.lambda = *lambda;
  try {
    make_grid(2, opt.points, opt.extent);
    make_params(opt.mu, opt.lambda);
  } catch (const Error& ex) {
    throw Error(Errc::config_invalid, ex.what());
  }
  if (!(opt.dt > 0.0) || !(opt.t_end >= 0.0) || opt.cadence < 1) {
    throw Error(Errc::config_invalid, "probe needs dt > 0, t_end >= 0 and cadence >= 1");
  }
  opt.output_dir = output_dir(c, e.count("output.dir") ? e : ConfigMap{{"output.dir", ""}}, "besse_bidegaray");
  const ProbeReport rep = besse_bidegaray_probe(opt);
  if (rep.diverged) {
    err << rep.hint << "\n";
    return finish(rep.run.summary, c, out, exit_diverged);
  }
  if (rep.run.envelope_violated) {
    err << "f(t) exceeded the iterated envelope (min margin " << fmt(rep.min_envelope_margin) << ")\n";
    return finish(rep.run.summary, c, out, exit_invariant_failed);
  }
  return finish(rep.run.summary, c, out, exit_ok);
}

int cmd_scaling(const Common& c, double mu, double tolerance, std::ostream& out, std::ostream& err) {
  const Layers l = load_layers(c);
  const ScenarioConfig cfg = resolve_scenario(l.full);
  const ScalingReport rep = scaling_symmetry_check(cfg, mu, get_real_list(l.full, "scaling.times"));
  const fs::path dir = output_dir(c, l.full, cfg.name + "-scaling");
  fs::create_directories(dir);
  std::string csv = "t,u_discrepancy,v_discrepancy\n";
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    csv += fmt(rep.times[i]) + "," + fmt(rep.u_discrepancy[i]) + "," + fmt(rep.v_discrepancy[i]) + "\n";
  }
  write_file_atomic((dir / "scaling.csv").string(), csv);
  json s;
  s["mu"] = mu;
  s["times"] = rep.times;
  s["max_discrepancy"] = rep.max_discrepancy;
  s["tolerance"] = tolerance;
  s["passed"] = rep.max_discrepancy < tolerance;
  write_file_atomic((dir / "summary.json").string(), s.dump(2) + "\n");
  if (!(rep.max_discrepancy < tolerance)) {
    err << "scaling discrepancy " << fmt(rep.max_discrepancy) << " exceeds " << fmt(tolerance) << "\n";
    return finish(s, c, out, exit_invariant_failed);
  }
  return finish(s, c, out, exit_ok);
}

int cmd_nls_limit(const Common& c, std::ostream& out, std::ostream& err) {
  const Layers l = load_layers(c);
  const ScenarioConfig cfg = resolve_scenario(l.full);
  std::vector<NlsLimitRow> rows;
  try {
    rows = nls_limit_study(cfg, get_real_list(l.full, "nls_limit.mu"));
  } catch (const Error& e) {
    if (e.code() == Errc::invalid_argument) throw Error(Errc::config_invalid, e.what());
    throw;
  }
  const fs::path dir = output_dir(c, l.full, cfg.name + "-nls-limit");
  fs::create_directories(dir);
  std::string csv = "mu,error,diverged\n";
  json s;
  s["t_end"] = cfg.t_end;
  s["rows"] = json::array();
  bool any_diverged = false;
  bool decreasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    csv += fmt(r.mu) + "," + fmt(r.error) + "," + (r.diverged ? "1" : "0") + "\n";
    json row = {{"mu", r.mu}, {"error", r.diverged ? json() : json(r.error)}, {"diverged", r.diverged}};
    if (!r.note.empty()) row["note"] = r.note;
    s["rows"].push_back(row);
    any_diverged = any_diverged || r.diverged;
    if (i > 0 && !r.diverged && !rows[i - 1].diverged && !(r.error < rows[i - 1].error)) decreasing = false;
  }
  s["strictly_decreasing"] = decreasing;
  write_file_atomic((dir / "nls_limit.csv").string(), csv);
  write_file_atomic((dir / "summary.json").string(), s.dump(2) + "\n");
  if (any_diverged) {
    err << "at least one relaxation time diverged\n";
    return finish(s, c, out, exit_diverged);
  }
  if (!decreasing) {
    err << "errors are not strictly decreasing in mu\n";
    return finish(s, c, out, exit_invariant_failed);
  }
  return finish(s, c, out, exit_ok);
}

struct SweepRow {
  double s = 0.0, ell = 0.0;
  RatioStats uv, uw;
};

int cmd_bilinear(const Common& c, std::ostream& out, std::ostream& err) {
  const Layers l = load_layers(c);
  const ConfigMap& f = l.full;
  const auto s_list = get_real_list(f, "bilinear.s");
  const auto ell_list = get_real_list(f, "bilinear.ell");
  if (s_list.size() != ell_list.size() || s_list.empty()) {
    throw Error(Errc::config_invalid, "bilinear.s and bilinear.ell must be non-empty lists of the same length");
  }
  for (std::size_t i = 0; i < s_list.size(); ++i) {
    if (auto why = region_w_violation(s_list[i], ell_list[i])) {
      throw Error(Errc::outside_region, "lattice point (s, ell) = (" + fmt(s_list[i]) + ", " + fmt(ell_list[i]) +
                                            ") lies outside region W: " + *why);
    }
  }
  EnsembleSetup setup;
  setup.dim = static_cast<int>(get_int(f, "bilinear.dim"));
  setup.points = static_cast<int>(get_int(f, "bilinear.points"));
  setup.n_times = static_cast<std::size_t>(get_int(f, "bilinear.n_times"));
  setup.dt = get_real(f, "bilinear.dt");
  setup.band = static_cast<int>(get_int(f, "bilinear.band"));
  setup.modulation = get_real(f, "bilinear.modulation");
  const long members = get_int(f, "bilinear.members");
  if (members < 1) throw Error(Errc::config_invalid, "bilinear.members must be positive");
  const auto seed = static_cast<std::uint64_t>(get_int(f, "seed"));
  const auto uv = make_uv_ensemble(setup, static_cast<std::size_t>(members), seed);
  const auto uw = make_uw_ensemble(setup, static_cast<std::size_t>(members), seed + 1);

  std::vector<SweepRow> rows(s_list.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(s_list.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      try {
        BilinearConfig bc;
        bc.s = s_list[i];
        bc.ell = ell_list[i];
        bc.eps = get_real(f, "bilinear.eps");
        bc.eps1 = get_real(f, "bilinear.eps1");
        bc.eps2 = get_real(f, "bilinear.eps2");
        bc.eps3 = get_real(f, "bilinear.eps3");
        rows[i] = {bc.s, bc.ell, bilinear_ratio_uv(uv, bc), bilinear_ratio_uw(uw, bc)};
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const int jobs = std::clamp(c.jobs, 1, static_cast<int>(rows.size()));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : failures) {
    if (e) std::rethrow_exception(e);
  }

  std::string csv = "s,ell,probe,max_ratio,mean_ratio,evaluated,skipped\n";
  json s;
  s["members"] = members;
  s["points"] = json::array();
  bool finite = true;
  for (const auto& r : rows) {
    for (const auto& [probe, st] : {std::pair{"uv", &r.uv}, std::pair{"uw", &r.uw}}) {
      csv += fmt(r.s) + "," + fmt(r.ell) + "," + probe + "," + fmt(st->max) + "," + fmt(st->mean) + "," +
             std::to_string(st->evaluated) + "," + std::to_string(st->skipped) + "\n";
      finite = finite && st->evaluated > 0 && std::isfinite(st->max);
      s["points"].push_back({{"s", r.s}, {"ell", r.ell}, {"probe", probe}, {"max_ratio", st->max},
                             {"mean_ratio", st->mean}, {"evaluated", st->evaluated}, {"skipped", st->skipped}});
    }
  }
  const fs::path dir = output_dir(c, f, get_text(f, "name") + "-bilinear");
  fs::create_directories(dir);
  write_file_atomic((dir / "bilinear_sweep.csv").string(), csv);
  write_file_atomic((dir / "summary.json").string(), s.dump(2) + "\n");
  if (!finite) {
    err << "an ensemble produced no finite ratio\n";
    return finish(s, c, out, exit_invariant_failed);
  }
  return finish(s, c, out, exit_ok);
}

int cmd_calibrate(const Common& c, std::ostream& out) {
  const Layers l = load_layers(c);
  const ScenarioConfig cfg = resolve_scenario(l.full);
  const SDState st = initial_state(cfg);
  auto ensemble = gn_calibration_ensemble(st.u.grid, cfg.beta_ensemble_size, cfg.seed);
  if (lp_norm(st.u, 2.0) > 0.0 && gradient_l2(st.u) > 0.0) ensemble.push_back(st.u);
  json s;
  s["ratios"] = json::array();
  double worst = 0.0;
  for (const auto& m : ensemble) {
    const double r = gn_ratio(m);
    worst = std::max(worst, r);
    s["ratios"].push_back(r);
  }
  const double beta = calibrate_beta(ensemble, cfg.beta_safety);
  s["max_ratio"] = worst;
  s["safety"] = cfg.beta_safety;
  s["beta4"] = std::pow(beta, 4);
  s["beta"] = beta;
  const fs::path dir = output_dir(c, l.full, cfg.name + "-beta");
  fs::create_directories(dir);
  write_file_atomic((dir / "beta.json").string(), s.dump(2) + "\n");
  return finish(s, c, out, exit_ok);
}

int cmd_plot(const Common& c, const std::string& run_dir, std::ostream& out) {
  const fs::path dir = run_dir.empty() ? fs::path(c.out) : fs::path(run_dir);
  if (dir.empty()) throw Error(Errc::config_invalid, "plot-emit needs a run directory");
  if (!fs::exists(dir / "diagnostics.csv")) {
    throw Error(Errc::io_failure, "no diagnostics.csv in " + dir.string());
  }
  write_file_atomic((dir / "plot.gp").string(), gnuplot_script());
  if (!c.quiet) out << (dir / "plot.gp").string() << "\n";
  return exit_ok;
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::integration_diverged:
      return exit_diverged;
    case Errc::no_contraction:
    case Errc::aliasing:
    case Errc::non_finite_multiplier:
    case Errc::missing_restart:
    case Errc::zero_field:
    case Errc::empty_ensemble:
      return exit_invariant_failed;
    default:
      return exit_config_error;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral solver and diagnostics for the Schrodinger-Debye system", "sdspec"};
  app.require_subcommand(1);
  app.fallthrough();
  Common c;
  app.add_option("--config", c.config_path, "config file (flat dotted key = value text)");
  app.add_option("--set", c.sets, "override key=value; repeatable, wins over the config file");
  app.add_option("--out", c.out, "output directory");
  app.add_option("--jobs", c.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "seed override");
  app.add_flag("--quiet", c.quiet, "no summary on standard output");

  auto positional = [&](CLI::App* sub) { sub->add_option("config_file", c.positional_config, "config file"); };
  auto* run = app.add_subcommand("run", "evolve a configured scenario");
  positional(run);
  auto* probe = app.add_subcommand("probe-blowup", "focusing Gaussian run with envelope check");
  std::optional<double> probe_mu;
  std::optional<int> probe_lambda;
  probe->add_option("--mu", probe_mu, "relaxation time");
  probe->add_option("--lambda", probe_lambda, "+1 or -1");
  positional(probe);
  auto* scaling = app.add_subcommand("check-scaling", "compare a mu run against the rescaled mu = 1 run");
  double scaling_mu = 4.0;
  double scaling_tol = 1e-6;
  scaling->add_option("--mu", scaling_mu, "relaxation time of the scaled run");
  scaling->add_option("--tolerance", scaling_tol, "largest accepted L2 discrepancy");
  positional(scaling);
  auto* nls = app.add_subcommand("nls-limit", "error against cubic NLS for decreasing mu");
  positional(nls);
  auto* bilinear = app.add_subcommand("bilinear-sweep", "ensemble bilinear ratios over an (s, ell) lattice");
  positional(bilinear);
  auto* calibrate = app.add_subcommand("calibrate-beta", "Gagliardo-Nirenberg constant from an ensemble");
  positional(calibrate);
  auto* validate = app.add_subcommand("validate-config", "check a config and print it fully resolved");
  positional(validate);
  auto* plot = app.add_subcommand("plot-emit", "write a gnuplot script next to a run's diagnostics.csv");
  std::string plot_dir;
  plot->add_option("run_dir", plot_dir, "run directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_config_error;
  }

  try {
    if (*run) return cmd_run(c, out, err);
    if (*probe) return cmd_probe(c, probe_mu, probe_lambda, out, err);
    if (*scaling) return cmd_scaling(c, scaling_mu, scaling_tol, out, err);
    if (*nls) return cmd_nls_limit(c, out, err);
    if (*bilinear) return cmd_bilinear(c, out, err);
    if (*calibrate) return cmd_calibrate(c, out);
    if (*validate) return cmd_validate(c, out);
    if (*plot) return cmd_plot(c, plot_dir, out);
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return exit_diverged;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_invariant_failed;
  }
  return exit_config_error;
}

}  // namespace sdspec
