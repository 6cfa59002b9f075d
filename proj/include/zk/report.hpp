#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "zk/error.hpp"

namespace zk {

enum class Verdict { pass, fail, skip, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::skip: return "skip";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

/// Shortest round-trip decimal form of a double (CSV and JSON output).
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int p = 15; p <= 17; ++p) {
    std::snprintf(buf, sizeof buf, "%.*g", p, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::string hex64(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Ordinary least-squares slope of y against x; needs at least three points.
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw InvalidArgument("ols_slope: need at least three points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw InvalidArgument("ols_slope: abscissae coincide");
  return sxy / sxx;
}

struct Sample {
  int k = 0;
  int trial = 0;
  double ratio = 0.0;
};

/// Result of one estimate experiment.
struct EstimateReport {
  std::string name;
  std::map<std::string, std::string> parameters;
  std::vector<Sample> samples;
  std::vector<std::pair<int, double>> aggregate;  ///< per-k value the slope is fitted to
  std::optional<double> fitted_slope;
  Verdict verdict = Verdict::skip;
  std::string reason;
  std::uint64_t config_hash = 0;
  std::map<std::string, double> metrics;
  std::vector<std::string> flags;

  void set(const std::string& key, double v) { parameters[key] = format_double(v); }
  void set(const std::string& key, const std::string& v) { parameters[key] = v; }

  /// Fits log2(aggregate value) against k when there are at least three positive values.
  void fit_slope() {
    std::vector<double> x, y;
    for (const auto& [k, v] : aggregate) {
      if (v > 0.0 && std::isfinite(v)) {
        x.push_back(k);
        y.push_back(std::log2(v));
      }
    }
    fitted_slope = x.size() >= 3 ? std::optional<double>(ols_slope(x, y)) : std::nullopt;
  }

  /// Largest over smallest aggregate value.
  double aggregate_spread() const {
    double lo = INFINITY, hi = 0.0;
    for (const auto& [k, v] : aggregate) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return lo > 0.0 ? hi / lo : INFINITY;
  }

  void fail(const std::string& why) {
    verdict = Verdict::fail;
    reason = reason.empty() ? why : reason + "; " + why;
  }
  bool passed() const { return verdict == Verdict::pass; }
};

/// Columns k, trial, ratio, slope, verdict, config_hash. Per-k aggregate rows carry trial "max".
inline void write_report_csv(std::ostream& os, const EstimateReport& r) {
  const std::string slope = r.fitted_slope ? format_double(*r.fitted_slope) : "";
  const std::string tail = "," + slope + "," + to_string(r.verdict) + "," + hex64(r.config_hash) + "\n";
  os << "k,trial,ratio,slope,verdict,config_hash\n";
  for (const auto& s : r.samples) os << s.k << "," << s.trial << "," << format_double(s.ratio) << tail;
  for (const auto& [k, v] : r.aggregate) os << k << ",max," << format_double(v) << tail;
}

inline nlohmann::ordered_json report_metadata(const EstimateReport& r) {
  nlohmann::ordered_json j;
  j["experiment"] = r.name;
  j["config_hash"] = hex64(r.config_hash);
  j["verdict"] = to_string(r.verdict);
  if (!r.reason.empty()) j["reason"] = r.reason;
  j["fitted_slope"] = r.fitted_slope ? nlohmann::ordered_json(*r.fitted_slope) : nlohmann::ordered_json(nullptr);
  auto& p = j["parameters"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.parameters) p[k] = v;
  auto& m = j["metrics"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.metrics) m[k] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(format_double(v));
  j["flags"] = r.flags;
  return j;
}

/// Writes report_<name>.csv and report_<name>.jsonl into `dir`.
inline void write_report_files(const std::string& dir, const EstimateReport& r) {
  const std::string base = dir + "/report_" + r.name;
  std::ofstream csv(base + ".csv");
  if (!csv) throw InvalidArgument("cannot write " + base + ".csv");
  write_report_csv(csv, r);
  std::ofstream meta(base + ".jsonl");
  if (!meta) throw InvalidArgument("cannot write " + base + ".jsonl");
  meta << report_metadata(r).dump() << "\n";
}

}  // namespace zk
