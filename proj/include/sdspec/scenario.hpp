#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "sdspec/config.hpp"
#include "sdspec/diagnostics.hpp"
#include "sdspec/dynamics.hpp"

namespace sdspec {

enum class InitialKind { gaussian, constant, mode, random_bandlimited, debye_equilibrium, from_file };

struct InitialDataSpec {
  InitialKind kind = InitialKind::constant;
  double amplitude = 0.0;
  double width = 1.0;
  std::vector<double> center;  // empty: box centre
  std::vector<int> mode;       // integer wave index per axis
  int cutoff = 4;
  std::uint64_t seed = 0;
  std::string path;
};

struct ScenarioConfig {
  std::string name = "scenario";
  int dim = 2;
  int points = 128;
  double extent = 20.0;
  SDParams params;
  double dt = 1e-3;
  double t_end = 1.0;
  bool dealias = false;
  InitialDataSpec initial_u;
  InitialDataSpec initial_v;
  std::size_t cadence = 10;
  std::string output_dir;  // empty: keep results in memory only
  std::vector<double> snapshot_times;
  bool plot = false;
  std::uint64_t seed = 12345;
  double beta = 0.0;  // 0: calibrate
  double beta_safety = 2.0;
  std::size_t beta_ensemble_size = 8;
};

/// Type-checks and validates a layered config map. Throws config_invalid.
ScenarioConfig resolve_scenario(const ConfigMap& cfg);

/// Samples an initial-data spec on the grid. `u0` is required for
/// debye_equilibrium (v0 = lambda |u0|^2).
ComplexField make_initial_u(const InitialDataSpec& spec, const Grid& grid);
RealField make_initial_v(const InitialDataSpec& spec, const Grid& grid, const ComplexField& u0, int lambda);

SDState initial_state(const ScenarioConfig& cfg);

/// Gaussians of several widths plus `random_members` band-limited fields,
/// generated deterministically from `seed`.
std::vector<ComplexField> gn_calibration_ensemble(const Grid& grid, std::size_t random_members, std::uint64_t seed);

/// beta for a run: cfg.beta if positive, otherwise calibrate_beta over the
/// calibration ensemble plus u0 (when nonzero).
double resolve_beta(const ScenarioConfig& cfg, const ComplexField& u0);

/// Which functional the envelope bounds: f in 2D, g in 1D, none in 3D.
enum class EnvelopeKind { f_2d, g_1d, none };
EnvelopeKind envelope_kind(int dim);

struct RunResult {
  nlohmann::ordered_json summary;
  std::vector<DiagnosticsRecord> records;
  std::optional<SDState> final_state;
  bool diverged = false;
  double divergence_time = 0.0;
  bool envelope_violated = false;
  double min_envelope_margin = 0.0;
  std::string output_dir;
};

/// Evolves the configured state, recording diagnostics every `cadence`
/// steps (plus the first and last) and checking the iterated envelope at
/// every record. Writes diagnostics.csv, summary.json and snapshots when
/// cfg.output_dir is set. Divergence is recorded in the summary, not thrown.
RunResult run_scenario(const ScenarioConfig& cfg);

/// Fixed CSV header of diagnostics.csv.
std::string diagnostics_csv_header();
std::string diagnostics_csv_row(const DiagnosticsRecord& r);

/// gnuplot script stub reading diagnostics.csv from its own directory.
std::string gnuplot_script();

struct ProbeOptions {
  double mu = 1.0;
  int lambda = -1;
  int points = 256;
  double extent = 20.0;
  double dt = 5e-4;
  double t_end = 5.0;
  std::size_t cadence = 20;
  double beta_safety = 2.0;
  std::uint64_t seed = 12345;
  std::string output_dir;
};

/// Config of the focusing Gaussian run u0 = exp(-|x - c|^2), v0 = lambda |u0|^2.
ScenarioConfig besse_bidegaray_config(const ProbeOptions& opt);

struct ProbeReport {
  double linf_growth = 0.0;  // max_t ||u||_inf / ||u0||_inf
  double max_f = 0.0;
  double min_envelope_margin = 0.0;
  bool diverged = false;
  double divergence_time = 0.0;
  std::string hint;
  RunResult run;
};

ProbeReport besse_bidegaray_probe(const ProbeOptions& opt);

struct ScalingReport {
  std::vector<double> times;  // mu = 1 times
  std::vector<double> u_discrepancy;
  std::vector<double> v_discrepancy;
  double max_discrepancy = 0.0;  // over u and v
};

/// Runs `base` with relaxation time mu, maps states at t = mu * t_j to the
/// mu = 1 problem and compares them with a direct mu = 1 run started from
/// the transformed initial data (extent L / sqrt(mu), step dt / mu).
ScalingReport scaling_symmetry_check(const ScenarioConfig& base, double mu, const std::vector<double>& times);

struct NlsLimitRow {
  double mu = 0.0;
  double error = 0.0;
  bool diverged = false;
  std::string note;
};

/// For each mu (strictly decreasing, positive) evolves the system from
/// equilibrium data v0 = lambda |u0|^2 and reports ||u_SD(t_end) - u_NLS(t_end)||_2.
std::vector<NlsLimitRow> nls_limit_study(const ScenarioConfig& base, const std::vector<double>& mu_list);

/// Output root: $SD_SPECTRAL_OUT if set, otherwise "runs".
std::string default_output_root();

double l2_distance(const ComplexField& a, const ComplexField& b);
double l2_distance(const RealField& a, const RealField& b);

}  // namespace sdspec
