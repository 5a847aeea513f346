#include "sdspec/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sdspec/error.hpp"

namespace sdspec {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_long(std::string_view s, long& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end && std::isfinite(out);
}

bool parse_bool(std::string_view s, bool& out) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes" || s == "on") {
    out = true;
    return true;
  }
  if (s == "false" || s == "0" || s == "no" || s == "off") {
    out = false;
    return true;
  }
  return false;
}

bool parse_list(std::string_view s, std::vector<double>& out) {
  out.clear();
  s = trim(s);
  if (s.empty()) return true;
  while (true) {
    const auto comma = s.find(',');
    double x = 0.0;
    if (!parse_double(s.substr(0, comma), x)) return false;
    out.push_back(x);
    if (comma == std::string_view::npos) return true;
    s = s.substr(comma + 1);
  }
}

const char* type_name(ValueType t) {
  switch (t) {
    case ValueType::integer: return "integer";
    case ValueType::real: return "real";
    case ValueType::boolean: return "boolean";
    case ValueType::text: return "text";
    case ValueType::real_list: return "comma-separated reals";
  }
  return "?";
}

void check_value(const KeySpec& spec, std::string_view value, std::string_view where) {
  bool ok = true;
  switch (spec.type) {
    case ValueType::integer: {
      long x;
      ok = parse_long(value, x);
      break;
    }
    case ValueType::real: {
      double x;
      ok = parse_double(value, x);
      break;
    }
    case ValueType::boolean: {
      bool x;
      ok = parse_bool(value, x);
      break;
    }
    case ValueType::text: break;
    case ValueType::real_list: {
      std::vector<double> x;
      ok = parse_list(value, x);
      break;
    }
  }
  if (!ok) {
    throw Error(Errc::config_invalid, std::string(where) + ": value '" + std::string(value) + "' for key '" +
                                          spec.key + "' is not a valid " + type_name(spec.type));
  }
}

const KeySpec& require_key(std::string_view key, std::string_view where) {
  const KeySpec* spec = find_key(key);
  if (!spec) throw Error(Errc::config_invalid, std::string(where) + ": unknown key '" + std::string(key) + "'");
  return *spec;
}

std::vector<KeySpec> build_schema() {
  using VT = ValueType;
  std::vector<KeySpec> s = {
      {"name", VT::text, "scenario", "run name, also the default output subdirectory"},
      {"seed", VT::integer, "12345", "seed for every random ensemble"},
      {"grid.dim", VT::integer, "2", "spatial dimension (1, 2 or 3)"},
      {"grid.points", VT::integer, "128", "points per axis (power of two >= 8)"},
      {"grid.extent", VT::real, "20", "box side length L; the box is [0, L)^dim"},
      {"params.mu", VT::real, "1", "relaxation time mu > 0"},
      {"params.lambda", VT::integer, "1", "+1 defocusing, -1 focusing"},
      {"time.dt", VT::real, "0.001", "Strang step"},
      {"time.t_end", VT::real, "1", "final time"},
      {"time.dealias", VT::boolean, "false", "two-thirds truncation of u after each step"},
      {"diagnostics.cadence", VT::integer, "10", "steps between diagnostics rows"},
      {"beta.value", VT::real, "0", "Gagliardo-Nirenberg constant; 0 calibrates it from an ensemble"},
      {"beta.safety", VT::real, "2", "factor applied to the calibrated beta^4"},
      {"beta.ensemble_size", VT::integer, "8", "random band-limited fields in the calibration ensemble"},
      {"output.dir", VT::text, "", "output directory; empty uses $SD_SPECTRAL_OUT/<name> or runs/<name>"},
      {"output.snapshot_times", VT::real_list, "", "times at which u and v snapshots are written"},
      {"output.plot", VT::boolean, "false", "also write a gnuplot script next to the CSV"},
      {"bilinear.s", VT::real_list, "1", "s values of the bilinear sweep lattice (paired with bilinear.ell)"},
      {"bilinear.ell", VT::real_list, "0", "ell values of the bilinear sweep lattice"},
      {"bilinear.eps", VT::real, "0.05", "epsilon for c = 1/2 + eps and b = 1/2 - eps"},
      {"bilinear.eps1", VT::real, "0.05", "b1 = 1/2 - eps1"},
      {"bilinear.eps2", VT::real, "0.05", "b2 = 1/2 + eps2"},
      {"bilinear.eps3", VT::real, "0.05", "b3 = 1/2 + eps3"},
      {"bilinear.members", VT::integer, "200", "ensemble members per lattice point"},
      {"bilinear.dim", VT::integer, "2", "spatial dimension of ensemble members"},
      {"bilinear.points", VT::integer, "16", "points per axis of ensemble members"},
      {"bilinear.n_times", VT::integer, "64", "time samples per member"},
      {"bilinear.dt", VT::real, "0.05", "time spacing of member traces"},
      {"bilinear.band", VT::integer, "3", "spatial band |k_d| <= band"},
      {"bilinear.modulation", VT::real, "2", "maximum modulation of members"},
      {"nls_limit.mu", VT::real_list, "0.1,0.05,0.025", "decreasing relaxation times for the NLS limit study"},
      {"scaling.times", VT::real_list, "0.1,0.2,0.3,0.4,0.5", "mu = 1 times compared by check-scaling"},
  };
  for (const char* field : {"u", "v"}) {
    const std::string p = std::string("initial.") + field + ".";
    const bool is_u = field[0] == 'u';
    s.push_back({p + "kind", VT::text, is_u ? "gaussian" : "constant",
                 "gaussian | constant | mode | random_bandlimited | debye_equilibrium (v only) | from_file"});
    s.push_back({p + "amplitude", VT::real, is_u ? "1" : "0", "amplitude / constant value"});
    s.push_back({p + "width", VT::real, "1", "gaussian: A exp(-|x - c|^2 / width^2)"});
    s.push_back({p + "center", VT::real_list, "", "gaussian centre; empty is the box centre"});
    s.push_back({p + "mode", VT::real_list, "", "integer wave index k per axis (xi = 2 pi k / L)"});
    s.push_back({p + "cutoff", VT::integer, "4", "random_bandlimited: |k_d| <= cutoff"});
    s.push_back({p + "seed", VT::integer, "0", "random_bandlimited seed; 0 derives it from the run seed"});
    s.push_back({p + "path", VT::text, "", "from_file: snapshot path"});
  }
  return s;
}

}  // namespace

const std::vector<KeySpec>& config_schema() {
  static const std::vector<KeySpec> schema = build_schema();
  return schema;
}

const KeySpec* find_key(std::string_view key) {
  for (const auto& k : config_schema()) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

ConfigMap default_config() {
  ConfigMap m;
  for (const auto& k : config_schema()) m[k.key] = k.default_value;
  return m;
}

ConfigMap parse_config_text(std::string_view text, std::string_view origin) {
  ConfigMap out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const std::string where = std::string(origin) + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(Errc::config_invalid, where + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    const KeySpec& spec = require_key(key, where);
    check_value(spec, value, where);
    if (!out.emplace(key, value).second) throw Error(Errc::config_invalid, where + ": duplicate key '" + key + "'");
  }
  return out;
}

ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config_invalid, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

void apply_override(ConfigMap& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw Error(Errc::config_invalid, "override '" + std::string(assignment) + "' is not of the form key=value");
  }
  const std::string key(trim(assignment.substr(0, eq)));
  const std::string value(trim(assignment.substr(eq + 1)));
  const KeySpec& spec = require_key(key, "--set");
  check_value(spec, value, "--set");
  cfg[key] = value;
}

ConfigMap layer_config(const ConfigMap& file_values, const std::vector<std::string>& overrides) {
  ConfigMap cfg = default_config();
  for (const auto& [k, v] : file_values) {
    const KeySpec& spec = require_key(k, "config");
    check_value(spec, v, "config");
    cfg[k] = v;
  }
  for (const auto& o : overrides) apply_override(cfg, o);
  return cfg;
}

std::string render_config(const ConfigMap& cfg) {
  std::string out;
  for (const auto& [k, v] : cfg) out += k + " = " + v + "\n";
  return out;
}

namespace {

const std::string& raw(const ConfigMap& cfg, const std::string& key, ValueType want) {
  const KeySpec& spec = require_key(key, "config");
  if (spec.type != want) throw Error(Errc::config_invalid, "key '" + key + "' read with the wrong type");
  const auto it = cfg.find(key);
  return it == cfg.end() ? spec.default_value : it->second;
}

}  // namespace

long get_int(const ConfigMap& cfg, const std::string& key) {
  long x = 0;
  if (!parse_long(raw(cfg, key, ValueType::integer), x)) {
    throw Error(Errc::config_invalid, "key '" + key + "' is not an integer");
  }
  return x;
}

double get_real(const ConfigMap& cfg, const std::string& key) {
  double x = 0;
  if (!parse_double(raw(cfg, key, ValueType::real), x)) {
    throw Error(Errc::config_invalid, "key '" + key + "' is not a real number");
  }
  return x;
}

bool get_bool(const ConfigMap& cfg, const std::string& key) {
  bool x = false;
  if (!parse_bool(raw(cfg, key, ValueType::boolean), x)) {
    throw Error(Errc::config_invalid, "key '" + key + "' is not a boolean");
  }
  return x;
}

std::string get_text(const ConfigMap& cfg, const std::string& key) { return raw(cfg, key, ValueType::text); }

std::vector<double> get_real_list(const ConfigMap& cfg, const std::string& key) {
  std::vector<double> x;
  if (!parse_list(raw(cfg, key, ValueType::real_list), x)) {
    throw Error(Errc::config_invalid, "key '" + key + "' is not a list of reals");
  }
  return x;
}

}  // namespace sdspec
