#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sdspec {

/// Flat `key = value` configuration with dotted section keys, e.g.
///
///     # Besse-Bidegaray focusing run
///     grid.points = 256
///     params.lambda = -1
///     initial.u.kind = gaussian
///
/// Blank lines and lines starting with '#' are ignored. Every key must be
/// known to the schema and every value must parse as the key's type.
enum class ValueType { integer, real, boolean, text, real_list };

struct KeySpec {
  std::string key;
  ValueType type;
  std::string default_value;
  std::string help;
};

const std::vector<KeySpec>& config_schema();
const KeySpec* find_key(std::string_view key);

using ConfigMap = std::map<std::string, std::string>;

/// Schema defaults for every key.
ConfigMap default_config();

/// Parses config text; throws config_invalid (with line number) on unknown
/// keys, duplicates, malformed lines or values of the wrong type.
ConfigMap parse_config_text(std::string_view text, std::string_view origin = "<config>");
ConfigMap load_config_file(const std::string& path);

/// Applies one `key=value` override after type-checking it.
void apply_override(ConfigMap& cfg, std::string_view assignment);

/// Later layers win: defaults < file < command-line overrides.
ConfigMap layer_config(const ConfigMap& file_values, const std::vector<std::string>& overrides);

/// Resolved config as text in the same format, keys sorted.
std::string render_config(const ConfigMap& cfg);

long get_int(const ConfigMap& cfg, const std::string& key);
double get_real(const ConfigMap& cfg, const std::string& key);
bool get_bool(const ConfigMap& cfg, const std::string& key);
std::string get_text(const ConfigMap& cfg, const std::string& key);
std::vector<double> get_real_list(const ConfigMap& cfg, const std::string& key);

}  // namespace sdspec
