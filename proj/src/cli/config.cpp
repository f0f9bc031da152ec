#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "lognls/diagnostics.hpp"
#include "lognls/scenario.hpp"

namespace lognls {

namespace {

using enum ParamType;

std::vector<ParamSpec> with_common(std::vector<ParamSpec> specific) {
  std::vector<ParamSpec> v{
      {"kind", text, true, {}, "experiment kind"},
      {"name", text, false, std::string{}, "output subdirectory; defaults to the kind"},
      {"seed", integer, false, 0LL, "64-bit seed for every random draw"},
  };
  v.insert(v.end(), specific.begin(), specific.end());
  return v;
}

// Keys shared by the two Schrodinger runners.
std::vector<ParamSpec> run_keys() {
  return {
      {"lambda", real, true, {}, "nonlinearity coefficient"},
      {"regularization", real, false, 1e-10, "eps in ln(eps + |u|^2)"},
      {"dim", integer, false, 1LL, "space dimension, 1 to 3"},
      {"n", integer, true, {}, "grid points per axis"},
      {"L", real, true, {}, "box length"},
      {"dt", real, true, {}, "time step"},
      {"t_end", real, true, {}, "final time"},
      {"record_interval", real, false, 0.0, "diagnostics spacing; 0 means t_end / 100"},
      {"snapshot_interval", real, false, 0.0, "snapshot spacing; 0 disables snapshots"},
      {"amplitude", real, false, 1.0, "Gaussian datum amplitude b0"},
      {"alpha0", real, false, 1.0, "Gaussian datum inverse variance"},
      {"beta0", real, false, 0.0, "Gaussian datum chirp"},
      {"bump_amplitude", real, false, 0.0, "amplitude of an added bump exp(-(x - c)^2 / w^2)"},
      {"bump_center", real, false, 2.0, "bump center c along every axis"},
      {"bump_width", real, false, 0.5, "bump width w"},
      {"noise", real, false, 0.0, "amplitude of a seeded smooth random perturbation"},
      {"breach_threshold", real, false, 1e-8, "boundary mass fraction that aborts the run"},
      {"mass_tol", real, false, 1e-10, "allowed relative mass drift"},
  };
}

const std::map<ScenarioKind, std::vector<ParamSpec>>& spec_table() {
  static const std::map<ScenarioKind, std::vector<ParamSpec>> table = [] {
    std::map<ScenarioKind, std::vector<ParamSpec>> t;
    t[ScenarioKind::tau] = with_common({
        {"mode", text, false, std::string("logarithmic"), "logarithmic or polytropic"},
        {"lambda", real, false, 1.0, "logarithmic coefficient"},
        {"alpha", real, false, 1.0, "polytropic exponent"},
        {"t_end", real, true, {}, "final time"},
        {"samples", integer, false, 200LL, "number of output times after t = 0"},
        {"spacing", text, false, std::string("log"), "log or linear output times"},
        {"residual_tol", real, false, 1e-9, "bound on the first-integral residual"},
    });
    t[ScenarioKind::gaussian] = with_common({
        {"lambda", real, true, {}, "nonlinearity coefficient"},
        {"alpha0", real, false, 1.0, "initial inverse variance"},
        {"beta0", real, false, 0.0, "initial chirp, r'(0) = -beta0"},
        {"amplitude", real, false, 1.0, "initial amplitude b0"},
        {"t_end", real, true, {}, "final time"},
        {"record_interval", real, false, 0.0, "output spacing; 0 means t_end / 200"},
        {"residual_tol", real, false, 1e-8, "bound on the width energy residual"},
        {"period_tol", real, false, 1e-6, "relative bound on quadrature vs measured period"},
    });
    auto evolve = run_keys();
    evolve.insert(evolve.begin(),
                  {{"nonlinearity", text, false, std::string("log"), "log or power"},
                   {"sigma", real, false, 1.0, "power exponent"}});
    evolve.push_back({"datum", text, false, std::string("gaussian"), "gaussian or gausson"});
    evolve.push_back({"omega", real, false, 0.0, "Gausson frequency"});
    evolve.push_back({"velocity", real, false, 0.0, "boost along every axis, a multiple of 2 pi / L"});
    evolve.push_back({"center", real, false, 0.0, "datum center along every axis"});
    evolve.push_back({"oracle_tol", real, false, 0.0, "bound on the L2 error against the exact Gaussian; 0 disables"});
    t[ScenarioKind::evolve] = with_common(evolve);
    auto rescaled = run_keys();
    for (auto& k : rescaled)
      if (k.key == "regularization") k.doc = "eps in ln(eps + |v / gamma|^2)";
    rescaled.push_back({"adaptive", boolean, false, true, "grow the step as dt tau^{2/3}, below the resonance cap"});
    rescaled.push_back({"max_points", integer, false, 0LL, "double n, once resonance-free, up to this many points per axis; 0 keeps n"});
    rescaled.push_back({"dt_max", real, false, 0.05, "largest adaptive step"});
    rescaled.push_back({"com_tol", real, false, 1e-6, "bound on |tau I2 - I2(0) - I1(0) t| / (1 + t)"});
    t[ScenarioKind::rescaled] = with_common(rescaled);
    t[ScenarioKind::solitons] = with_common({
        {"experiment", text, false, std::string("stationarity"), "stationarity or superposition"},
        {"lambda", real, false, -1.0, "negative nonlinearity coefficient"},
        {"omega", real, false, 0.0, "Gausson frequency"},
        {"dim", integer, false, 1LL, "space dimension"},
        {"n", integer, true, {}, "grid points per axis"},
        {"L", real, true, {}, "box length"},
        {"dt", real, false, 1e-3, "time step"},
        {"t_end", real, true, {}, "final time"},
        {"record_interval", real, false, 0.0, "distance spacing; 0 means t_end / 50"},
        {"regularization", real, false, 1e-12, "eps in ln(eps + |u|^2)"},
        {"velocity", real, false, 0.0, "Gausson velocity along every axis"},
        {"half_separation", real, false, 8.0, "superposition: centers at -R and +R"},
        {"perturbation", real, false, 0.0, "stationarity: relative size of an added bump"},
        {"tol", real, false, 0.0, "bound on the sup distance; 0 disables"},
    });
    t[ScenarioKind::fluids] = with_common({
        {"beta0", real_list, false, std::vector<double>{1.0}, "initial variance per axis"},
        {"omega0", real_list, false, std::vector<double>{0.0}, "initial velocity slope per axis"},
        {"mass", real, false, 1.0, "total mass"},
        {"capillarity", real, false, 0.0, "Korteweg coefficient eps"},
        {"viscosity", real, false, 0.0, "quantum Navier-Stokes coefficient nu"},
        {"t_end", real, true, {}, "final time"},
        {"record_interval", real, false, 0.0, "output spacing; 0 means t_end / 100"},
        {"n", integer, false, 256LL, "rescaled grid points per axis"},
        {"L", real, false, 16.0, "rescaled box length"},
        {"residual_tol", real, false, 1e-8, "bound on the ansatz PDE residual at t_end"},
    });
    t[ScenarioKind::verify] = with_common({
        {"pairs", integer, false, 100000LL, "random pairs per pointwise estimate"},
        {"gn_fields", integer, false, 1000LL, "random band-limited fields for the dual bound"},
    });
    return t;
  }();
  return table;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_double(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end && std::isfinite(out);
}

ParamValue convert(const std::string& raw, ParamType type, std::size_t line, const std::string& key) {
  auto fail = [&](const char* what) {
    return ConfigError(line, "key '" + key + "' expects " + what + ", got '" + raw + "'");
  };
  switch (type) {
    case real: {
      double v;
      if (!parse_double(raw, v)) throw fail("a real number");
      return v;
    }
    case integer: {
      long long v;
      auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
      if (ec != std::errc() || p != raw.data() + raw.size()) throw fail("an integer");
      return v;
    }
    case boolean:
      if (raw == "true") return true;
      if (raw == "false") return false;
      throw fail("true or false");
    case text:
      if (raw.empty()) throw fail("a nonempty string");
      return raw;
    case real_list: {
      std::vector<double> v;
      std::stringstream ss(raw);
      std::string item;
      while (std::getline(ss, item, ',')) {
        double x;
        if (!parse_double(trim(item), x)) throw fail("a comma-separated list of reals");
        v.push_back(x);
      }
      if (v.empty()) throw fail("a comma-separated list of reals");
      return v;
    }
  }
  throw fail("a known type");
}

template <class T>
const T& get_as(const std::map<std::string, ParamValue>& params, const std::string& key) {
  const auto it = params.find(key);
  if (it == params.end()) throw std::out_of_range("no parameter '" + key + "'");
  const T* v = std::get_if<T>(&it->second);
  if (!v) throw std::invalid_argument("parameter '" + key + "' has another type");
  return *v;
}

}  // namespace

std::string_view kind_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::tau: return "tau";
    case ScenarioKind::gaussian: return "gaussian";
    case ScenarioKind::evolve: return "evolve";
    case ScenarioKind::rescaled: return "rescaled";
    case ScenarioKind::solitons: return "solitons";
    case ScenarioKind::fluids: return "fluids";
    case ScenarioKind::verify: return "verify";
  }
  return "?";
}

const std::vector<ScenarioKind>& all_kinds() {
  static const std::vector<ScenarioKind> kinds{ScenarioKind::tau,      ScenarioKind::gaussian,
                                               ScenarioKind::evolve,   ScenarioKind::rescaled,
                                               ScenarioKind::solitons, ScenarioKind::fluids,
                                               ScenarioKind::verify};
  return kinds;
}

const std::vector<ParamSpec>& param_specs(ScenarioKind kind) { return spec_table().at(kind); }

ConfigError::ConfigError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

double Scenario::real(const std::string& key) const { return get_as<double>(params, key); }
long long Scenario::integer(const std::string& key) const { return get_as<long long>(params, key); }
bool Scenario::flag(const std::string& key) const { return get_as<bool>(params, key); }
const std::string& Scenario::text(const std::string& key) const { return get_as<std::string>(params, key); }
const std::vector<double>& Scenario::list(const std::string& key) const {
  return get_as<std::vector<double>>(params, key);
}

Scenario parse_config(std::string_view text, const std::filesystem::path& out_base) {
  struct Entry {
    std::string value;
    std::size_t line;
  };
  std::map<std::string, Entry> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value'");
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "empty key");
    if (const auto it = entries.find(key); it != entries.end())
      throw ConfigError(line_no, "duplicate key '" + key + "' (first set on line " + std::to_string(it->second.line) + ")");
    entries[key] = {value, line_no};
  }
  const std::size_t end_line = line_no + 1;

  const auto kind_it = entries.find("kind");
  if (kind_it == entries.end()) throw ConfigError(end_line, "missing required key 'kind'");
  const auto& kinds = all_kinds();
  const auto k = std::find_if(kinds.begin(), kinds.end(), [&](ScenarioKind c) { return kind_name(c) == kind_it->second.value; });
  if (k == kinds.end()) throw ConfigError(kind_it->second.line, "unknown kind '" + kind_it->second.value + "'");

  Scenario s;
  s.kind = *k;
  const auto& specs = param_specs(s.kind);
  for (const auto& [key, entry] : entries) {
    if (std::none_of(specs.begin(), specs.end(), [&](const ParamSpec& p) { return p.key == key; }))
      throw ConfigError(entry.line, "unknown key '" + key + "' for kind " + std::string(kind_name(s.kind)));
  }
  for (const auto& p : specs) {
    const auto it = entries.find(p.key);
    if (it == entries.end()) {
      if (p.required)
        throw ConfigError(end_line, "missing required key '" + p.key + "' for kind " + std::string(kind_name(s.kind)));
      s.params[p.key] = p.fallback;
    } else {
      s.params[p.key] = convert(it->second.value, p.type, it->second.line, p.key);
    }
  }
  const long long seed = s.integer("seed");
  if (seed < 0) throw ConfigError(entries.at("seed").line, "seed must be nonnegative");
  s.seed = static_cast<std::uint64_t>(seed);
  s.name = s.text("name").empty() ? std::string(kind_name(s.kind)) : s.text("name");
  if (s.name.find('/') != std::string::npos || s.name == "." || s.name == "..")
    throw ConfigError(entries.at("name").line, "name must be a plain directory name");
  s.params["name"] = s.name;
  s.output_dir = out_base / s.name;
  return s;
}

std::string format_param(const ParamValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) return format_real(x);
        else if constexpr (std::is_same_v<T, long long>) return std::to_string(x);
        else if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::string>) return x;
        else {
          std::string out;
          for (std::size_t i = 0; i < x.size(); ++i) out += (i ? "," : "") + format_real(x[i]);
          return out;
        }
      },
      v);
}

}  // namespace lognls
