#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "zk/error.hpp"
#include "zk/report.hpp"

namespace zk {

enum class ValueKind { integer, real, text, boolean };

struct ConfigKey {
  std::string section;  ///< empty for top-level keys
  std::string key;
  std::string default_value;
  ValueKind kind;
  std::vector<std::string> choices;  ///< text keys: allowed values (empty = any)
  bool hashed = true;                ///< part of the config hash
  std::string help;
};

/// Every key the harness understands. Unknown keys are rejected.
inline const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema = {
      {"", "seed", "1", ValueKind::integer, {}, true, "base seed for all random data"},
      {"", "threads", "1", ValueKind::integer, {}, false, "FFT threads (ZK_LAB_THREADS overrides)"},
      {"grid", "n", "32", ValueKind::integer, {}, true, "points per axis"},
      {"grid", "n_x", "0", ValueKind::integer, {}, true, "points in x (0: use n)"},
      {"grid", "n_y", "0", ValueKind::integer, {}, true, "points in y (0: use n)"},
      {"grid", "n_z", "0", ValueKind::integer, {}, true, "points in z (0: use n)"},
      {"grid", "L", "2pi", ValueKind::real, {}, true, "box length per axis"},
      {"grid", "L_x", "0", ValueKind::real, {}, true, "box length in x (0: use L)"},
      {"grid", "L_y", "0", ValueKind::real, {}, true, "box length in y (0: use L)"},
      {"grid", "L_z", "0", ValueKind::real, {}, true, "box length in z (0: use L)"},
      {"time", "T", "0.5", ValueKind::real, {}, true, "horizon"},
      {"time", "dt", "0", ValueKind::real, {}, true, "solver step (0: suggested_dt)"},
      {"time", "n_t", "0", ValueKind::integer, {}, true, "time samples for mixed norms (0: automatic, else 65; kernel scans 33)"},
      {"time", "snapshot_every", "1", ValueKind::integer, {}, true, "steps between stored frames"},
      {"time", "window", "0.25", ValueKind::real, {}, true, "first smoothing window"},
      {"time", "doublings", "4", ValueKind::integer, {}, true, "window doublings"},
      {"solver", "dealias", "two_thirds", ValueKind::text, {"two_thirds", "none"}, true, "dealiasing rule"},
      {"solver", "integrator", "ifrk4", ValueKind::text, {"ifrk4"}, true, "time integrator"},
      {"solver", "nonlinearity", "1", ValueKind::real, {}, true, "coefficient of u u_x"},
      {"solver", "alpha", "0.375", ValueKind::real, {}, true, "time weight exponent"},
      {"solver", "flavor", "besov", ValueKind::text, {"besov", "sobolev"}, true, "X_T flavour"},
      {"solver", "s", "1.5", ValueKind::real, {}, true, "Sobolev index of the sobolev flavour"},
      {"solver", "epsilon", "0.25", ValueKind::real, {}, true, "epsilon of the sobolev flavour"},
      {"solver", "iterations", "5", ValueKind::integer, {}, true, "Picard iterations"},
      {"experiment", "data", "gaussian", ValueKind::text,
       {"plane_soliton", "gaussian", "random_shell", "sharpness_phi_k", "random_bandlimited", "focusing", "snapshot"},
       true, "initial-data generator"},
      {"experiment", "c", "1", ValueKind::real, {}, true, "soliton speed"},
      {"experiment", "x0", "0", ValueKind::real, {}, true, "soliton centre"},
      {"experiment", "sigma", "0.5", ValueKind::real, {}, true, "gaussian width"},
      {"experiment", "amplitude", "0.1", ValueKind::real, {}, true, "gaussian amplitude"},
      {"experiment", "radius", "8", ValueKind::real, {}, true, "band limit of random_bandlimited"},
      {"experiment", "normalize", "none", ValueKind::text, {"none", "l2", "h2", "besov"}, true,
       "rescale the data to norm_value in this norm"},
      {"experiment", "norm_value", "0.1", ValueKind::real, {}, true, "target norm"},
      {"experiment", "snapshot", "", ValueKind::text, {}, true, "ZK3D file for data = snapshot"},
      {"experiment", "k", "2", ValueKind::integer, {}, true, "shell index"},
      {"experiment", "k_min", "0", ValueKind::integer, {}, true, "first shell of a scan"},
      {"experiment", "k_max", "4", ValueKind::integer, {}, true, "last shell of a scan"},
      {"experiment", "sharpness_k_min", "1", ValueKind::integer, {}, true, "first shell of the sharpness scan"},
      {"experiment", "sharpness_k_max", "3", ValueKind::integer, {}, true, "last shell of the sharpness scan"},
      {"experiment", "ik_k_min", "1", ValueKind::integer, {}, true, "first shell of the I_k scans"},
      {"experiment", "ik_k_max", "4", ValueKind::integer, {}, true, "last shell of the I_k scans"},
      {"experiment", "T_ik", "1e-4", ValueKind::real, {}, true, "I_k horizon"},
      {"experiment", "trials", "10", ValueKind::integer, {}, true, "random trials per shell"},
      {"experiment", "shell_data", "gaussian", ValueKind::text, {"gaussian", "focusing"}, true,
       "shell data family for verify-maximal"},
      {"experiment", "exploratory", "false", ValueKind::boolean, {}, true, "allow alpha below 3/8"},
      {"experiment", "s", "1.2", ValueKind::real, {}, true, "Sobolev index for verify-hs and norms"},
      {"experiment", "eps", "0.05", ValueKind::real, {}, true, "sharpness phase-check scale"},
      {"experiment", "x_extent", "24", ValueKind::real, {}, true, "half-width of the x range in kernel units"},
      {"experiment", "x_extent_i0", "16", ValueKind::real, {}, true, "I_0 half-width (doubled once)"},
      {"experiment", "T_i0", "0.5", ValueKind::real, {}, true, "I_0 horizon"},
      {"experiment", "box_units", "48", ValueKind::real, {}, true, "I_k box length in kernel units"},
      {"experiment", "spots", "10", ValueKind::integer, {}, true, "FFT-vs-quadrature spot checks per kernel"},
      {"experiment", "spread_tolerance", "4", ValueKind::real, {}, true, "verify-maximal spread bound"},
      {"experiment", "slope_tolerance", "0.3", ValueKind::real, {}, true, "verify-maximal |slope| bound"},
      {"output", "dir", ".", ValueKind::text, {}, false, "output directory"},
      {"output", "snapshots", "true", ValueKind::boolean, {}, true, "write ZK3D snapshots in simulate"},
  };
  return schema;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool parse_integer(const std::string& v, long long& out) {
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  return ec == std::errc() && p == end;
}

/// Reals accept an optional "pi" suffix: "2pi", "pi", "0.5pi".
inline bool parse_real(const std::string& v, double& out) {
  std::string body = v;
  double scale = 1.0;
  if (body.size() >= 2 && body.compare(body.size() - 2, 2, "pi") == 0) {
    scale = std::numbers::pi;
    body = body.substr(0, body.size() - 2);
    if (body.empty()) body = "1";
    if (!body.empty() && body.back() == '*') body.pop_back();
  }
  char* end = nullptr;
  out = std::strtod(body.c_str(), &end);
  if (end != body.c_str() + body.size() || body.empty()) return false;
  out *= scale;
  return std::isfinite(out);
}

inline bool parse_bool(const std::string& v, bool& out) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return out = true, true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return out = false, true;
  return false;
}

}  // namespace detail

/// Flat sectioned key = value configuration with schema defaults.
class RunConfig {
 public:
  RunConfig() {
    // Defaults go through set() so that an explicit default hashes like an omitted one.
    for (const auto& k : config_schema()) set(k.section, k.key, k.default_value);
  }

  /// Parses text; line numbers start at 1. Comments start with '#' or ';'.
  static RunConfig parse(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line, section;
    int number = 0;
    while (std::getline(in, line)) {
      ++number;
      const auto hash = line.find_first_of("#;");
      if (hash != std::string::npos) line.erase(hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw ConfigError("unterminated section header", number);
        section = detail::trim(line.substr(1, line.size() - 2));
        static const std::vector<std::string> sections{"grid", "time", "solver", "experiment", "output"};
        if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
          throw ConfigError("unknown section [" + section + "]", number);
        }
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError("expected key = value", number);
      const std::string key = detail::trim(line.substr(0, eq));
      const std::string value = detail::trim(line.substr(eq + 1));
      c.set(section, key, value, number);
    }
    return c;
  }

  static RunConfig load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidArgument("cannot open config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
  }

  /// Sets one key after validating it against the schema (line 0 for command-line overrides).
  void set(const std::string& section, const std::string& key, const std::string& value, int line = 0) {
    const ConfigKey* spec = find(section, key);
    const std::string name = section.empty() ? key : "[" + section + "] " + key;
    if (spec == nullptr) throw ConfigError("unknown key " + name, line);
    std::string normal = value;
    switch (spec->kind) {
      case ValueKind::integer: {
        long long v;
        if (!detail::parse_integer(value, v)) throw ConfigError(name + ": expected an integer, got '" + value + "'", line);
        normal = std::to_string(v);
        break;
      }
      case ValueKind::real: {
        double v;
        if (!detail::parse_real(value, v)) throw ConfigError(name + ": expected a real number, got '" + value + "'", line);
        normal = format_double(v);
        break;
      }
      case ValueKind::boolean: {
        bool v;
        if (!detail::parse_bool(value, v)) throw ConfigError(name + ": expected true or false, got '" + value + "'", line);
        normal = v ? "true" : "false";
        break;
      }
      case ValueKind::text:
        if (!spec->choices.empty() && std::find(spec->choices.begin(), spec->choices.end(), value) == spec->choices.end()) {
          std::string allowed;
          for (const auto& c : spec->choices) allowed += (allowed.empty() ? "" : ", ") + c;
          throw ConfigError(name + ": '" + value + "' is not one of " + allowed, line);
        }
        break;
    }
    values_[full(section, key)] = normal;
  }

  const std::string& text(const std::string& section, const std::string& key) const {
    const auto it = values_.find(full(section, key));
    if (it == values_.end()) throw InvalidArgument("config: no key " + full(section, key));
    return it->second;
  }
  long long integer(const std::string& section, const std::string& key) const {
    long long v = 0;
    detail::parse_integer(text(section, key), v);
    return v;
  }
  double real(const std::string& section, const std::string& key) const {
    double v = 0.0;
    detail::parse_real(text(section, key), v);
    return v;
  }
  bool boolean(const std::string& section, const std::string& key) const { return text(section, key) == "true"; }

  /// Thread count: ZK_LAB_THREADS wins over the config key.
  int threads() const {
    if (const char* env = std::getenv("ZK_LAB_THREADS")) {
      long long v;
      if (detail::parse_integer(env, v) && v >= 1) return static_cast<int>(v);
    }
    return static_cast<int>(std::max(1LL, integer("", "threads")));
  }

  /// Stable serialisation of the hashed keys, sorted by name.
  std::string canonical() const {
    std::string out;
    for (const auto& [name, value] : values_) {
      const auto dot = name.find('.');
      const ConfigKey* spec = find(dot == std::string::npos ? "" : name.substr(0, dot),
                                   dot == std::string::npos ? name : name.substr(dot + 1));
      if (spec != nullptr && spec->hashed) out += name + "=" + value + "\n";
    }
    return out;
  }

  /// FNV-1a 64 of canonical().
  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical()) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  /// Every key with its resolved value, in schema order.
  std::string dump() const {
    std::ostringstream os;
    std::string section = "\x01";
    for (const auto& k : config_schema()) {
      if (k.section != section) {
        section = k.section;
        if (!section.empty()) os << "\n[" << section << "]\n";
      }
      os << k.key << " = " << text(k.section, k.key) << "    # " << k.help << "\n";
    }
    return os.str();
  }

 private:
  static std::string full(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
  }
  static const ConfigKey* find(const std::string& section, const std::string& key) {
    for (const auto& k : config_schema())
      if (k.section == section && k.key == key) return &k;
    return nullptr;
  }
  std::map<std::string, std::string> values_;
};

}  // namespace zk
