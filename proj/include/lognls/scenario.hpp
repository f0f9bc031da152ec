#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lognls {

enum class ScenarioKind { tau, gaussian, evolve, rescaled, solitons, fluids, verify };

std::string_view kind_name(ScenarioKind kind);
const std::vector<ScenarioKind>& all_kinds();

using ParamValue = std::variant<double, long long, bool, std::string, std::vector<double>>;

enum class ParamType { real, integer, boolean, text, real_list };

struct ParamSpec {
  std::string key;
  ParamType type;
  bool required = false;
  ParamValue fallback{};  // used when absent and not required
  std::string doc;
};

// Accepted keys per kind, common keys (kind, name, seed) included.
const std::vector<ParamSpec>& param_specs(ScenarioKind kind);

// Parse failures carry the 1-based line they refer to; missing keys point
// one past the last line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Scenario {
  std::string name;
  ScenarioKind kind = ScenarioKind::tau;
  std::uint64_t seed = 0;
  std::map<std::string, ParamValue> params;  // every key of the kind, defaults filled
  std::filesystem::path output_dir;

  double real(const std::string& key) const;
  long long integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  const std::vector<double>& list(const std::string& key) const;
};

// "key = value" lines, '#' starts a comment, blank lines ignored. Unknown,
// duplicate, missing or mistyped keys throw ConfigError. The output
// directory is `out_base / name`.
Scenario parse_config(std::string_view text, const std::filesystem::path& out_base = ".");

// Canonical text of a parameter value, as echoed in summaries.
std::string format_param(const ParamValue& v);

// A declared check: passes when value <= tolerance (or the flag holds).
struct CheckResult {
  std::string name;
  double value = 0;
  double tolerance = 0;
  bool pass = false;
};

struct RunReport {
  int exit_status = 0;  // 0: every check passed; 1: a check failed; 2: error
  std::vector<CheckResult> checks;
  std::map<std::string, std::string> results;  // extra summary entries
  std::string error;
  double wall_seconds = 0;
};

// Runs the experiment, writing `<kind>.csv`, optional snapshots and
// `summary.txt` into the output directory. Errors are caught, recorded in
// the summary and mapped to exit status 2. CSV bytes depend only on the
// parameters and the seed.
RunReport run_scenario(const Scenario& s);

// The property suites with default sizes.
Scenario verify_scenario(std::uint64_t seed, const std::filesystem::path& out_base);

}  // namespace lognls
