#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zk/config.hpp"
#include "zk/estimates.hpp"
#include "zk/initial_data.hpp"
#include "zk/norms.hpp"
#include "zk/picard.hpp"
#include "zk/report.hpp"
#include "zk/snapshot.hpp"
#include "zk/solver.hpp"
#include "zk/xt_norm.hpp"

namespace zk::cli {

inline FourierGrid build_grid(const RunConfig& c) {
  const int n = static_cast<int>(c.integer("grid", "n"));
  const double L = c.real("grid", "L");
  auto pick_n = [&](const char* k) {
    const auto v = c.integer("grid", k);
    return v > 0 ? static_cast<int>(v) : n;
  };
  auto pick_l = [&](const char* k) {
    const double v = c.real("grid", k);
    return v > 0.0 ? v : L;
  };
  return make_grid({pick_n("n_x"), pick_n("n_y"), pick_n("n_z")}, {pick_l("L_x"), pick_l("L_y"), pick_l("L_z")});
}

inline int samples(const RunConfig& c, int fallback) {
  const auto v = c.integer("time", "n_t");
  if (v == 0) return fallback;
  if (v < 2) throw InvalidArgument("[time] n_t must be 0 or >= 2");
  return static_cast<int>(v);
}

inline std::uint64_t seed(const RunConfig& c) { return static_cast<std::uint64_t>(c.integer("", "seed")); }

/// Builds the configured initial datum (real, physical), normalised as requested.
inline Field build_initial_data(const RunConfig& c, const FourierGrid& g) {
  const std::string kind = c.text("experiment", "data");
  Field u;
  if (kind == "plane_soliton") {
    u = plane_soliton(g, c.real("experiment", "c"), c.real("experiment", "x0"));
  } else if (kind == "gaussian") {
    u = gaussian(g, c.real("experiment", "sigma"), c.real("experiment", "amplitude"));
  } else if (kind == "random_shell") {
    u = random_shell(g, static_cast<int>(c.integer("experiment", "k")), seed(c));
  } else if (kind == "sharpness_phi_k") {
    u = sharpness_phi_k(g, static_cast<int>(c.integer("experiment", "k")));
  } else if (kind == "random_bandlimited") {
    const double radius = c.real("experiment", "radius");
    const double width = 0.5 * radius;
    u = inverse(random_bandlimited_spectral(g, radius, seed(c), [=](double r) { return std::exp(-(r * r) / (width * width)); }));
    u.make_real();
  } else if (kind == "focusing") {
    u = focusing_packet(g, static_cast<int>(c.integer("experiment", "k")), {0.0, 0.0, 0.0}, 0.5 * c.real("time", "T"));
  } else {
    const std::string path = c.text("experiment", "snapshot");
    if (path.empty()) throw InvalidArgument("[experiment] data = snapshot needs [experiment] snapshot = <file>");
    u = to_physical(load_snapshot(path));
    if (!(u.grid() == g)) throw InvalidArgument("snapshot grid " + u.grid().id() + " differs from the configured grid " + g.id());
  }
  const std::string norm = c.text("experiment", "normalize");
  if (norm != "none") {
    const double target = c.real("experiment", "norm_value");
    const double have = norm == "l2" ? l2_norm(u) : norm == "h2" ? sobolev_norm(u, 2.0) : besov_norm(u, 1.0);
    if (have == 0.0) throw InvalidArgument("cannot normalise a zero field");
    u *= Complex(target / have);
  }
  return u;
}

inline SolverConfig build_solver_config(const RunConfig& c, const Field& u0) {
  SolverConfig s;
  s.T = c.real("time", "T");
  s.dt = c.real("time", "dt");
  if (s.dt == 0.0) s.dt = suggested_dt(u0.grid(), u0.max_abs());
  s.snapshot_every = static_cast<int>(c.integer("time", "snapshot_every"));
  s.dealias = c.text("solver", "dealias") == "none" ? Dealias::none : Dealias::two_thirds;
  s.nonlinearity = c.real("solver", "nonlinearity");
  s.alpha = c.real("solver", "alpha");
  s.flavor = c.text("solver", "flavor") == "besov"
                 ? XtFlavor::besov()
                 : XtFlavor::sobolev(c.real("solver", "s"), c.real("solver", "epsilon"));
  return s;
}

inline std::string output_dir(const RunConfig& c) {
  const std::string d = c.text("output", "dir");
  std::filesystem::create_directories(d);
  return d;
}

inline int exit_code(const std::vector<const EstimateReport*>& reports) {
  for (const auto* r : reports)
    if (r->verdict == Verdict::fail || r->verdict == Verdict::inconclusive) return 2;
  return 0;
}

inline void summarize(std::ostream& out, const EstimateReport& r) {
  out << r.name << ": " << to_string(r.verdict);
  if (r.fitted_slope) out << "  slope = " << format_double(*r.fitted_slope);
  if (!r.reason.empty()) out << "  (" << r.reason << ")";
  out << "\n";
  for (const auto& f : r.flags) out << "  flag: " << f << "\n";
}

inline int finish(std::ostream& out, const RunConfig& c, std::vector<EstimateReport>& reports) {
  const std::string dir = output_dir(c);
  std::vector<const EstimateReport*> ptrs;
  for (auto& r : reports) {
    r.config_hash = c.hash();
    write_report_files(dir, r);
    summarize(out, r);
    ptrs.push_back(&r);
  }
  out << "config_hash = " << hex64(c.hash()) << "\n";
  return exit_code(ptrs);
}

/// diagnostics.csv: t, N, H, N_drift, H_drift, H_quadratic, config_hash.
inline void write_diagnostics_csv(const std::string& path, const ConservedDiagnostics& d, const std::string& hash) {
  std::ofstream csv(path);
  if (!csv) throw InvalidArgument("cannot write " + path);
  csv << "t,N,H,N_drift,H_drift,H_quadratic,config_hash\n";
  for (std::size_t i = 0; i < d.times.size(); ++i) {
    csv << format_double(d.times[i]) << "," << format_double(d.N_values[i]) << "," << format_double(d.H_values[i])
        << "," << format_double(d.N_drift(i)) << "," << format_double(d.H_drift(i)) << ","
        << format_double(d.H_quadratic_values[i]) << "," << hash << "\n";
  }
}

/// picard.csv: one row per difference u^(n+1) - u^(n); ratio empty where undefined.
inline void write_picard_csv(const std::string& path, const PicardResult& p, const std::string& hash) {
  std::ofstream csv(path);
  if (!csv) throw InvalidArgument("cannot write " + path);
  csv << "iter,N_comp,T_comp,M_comp,total,ratio,config_hash\n";
  for (std::size_t n = 0; n < p.difference_norms.size(); ++n) {
    const auto& d = p.difference_norms[n];
    std::string ratio;
    if (n >= 1 && p.ratios[n - 1]) ratio = format_double(*p.ratios[n - 1]);
    csv << n << "," << format_double(d.N) << "," << format_double(d.T) << "," << format_double(d.M) << ","
        << format_double(d.total) << "," << ratio << "," << hash << "\n";
  }
}

inline int cmd_simulate(const RunConfig& c, std::ostream& out) {
  const FourierGrid g = build_grid(c);
  const Field u0 = build_initial_data(c, g);
  const SolverConfig s = build_solver_config(c, u0);
  const SolveResult r = solve(u0, s);
  const std::string dir = output_dir(c);
  const std::string hash = hex64(c.hash());
  write_diagnostics_csv(dir + "/diagnostics.csv", r.diagnostics, hash);
  nlohmann::ordered_json meta;
  meta["command"] = "simulate";
  meta["config_hash"] = hash;
  meta["grid"] = g.id();
  meta["dt"] = r.dt;
  meta["steps"] = r.steps;
  meta["max_N_drift"] = r.diagnostics.max_N_drift();
  meta["max_H_drift"] = r.diagnostics.max_H_drift();
  if (c.text("experiment", "data") == "plane_soliton" && c.text("experiment", "normalize") == "none") {
    const Field exact = plane_soliton_at(g, c.real("experiment", "c"), s.T, c.real("experiment", "x0"));
    const double err = l2_norm(r.trajectory[r.trajectory.size() - 1] - exact) / l2_norm(exact);
    if (std::abs(r.trajectory.t_end() - s.T) < 1e-12 * s.T) meta["soliton_shape_error"] = err;
  }
  if (c.boolean("output", "snapshots")) {
    std::ofstream manifest(dir + "/snapshots.jsonl");
    for (std::size_t m = 0; m < r.trajectory.size(); ++m) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_%05zu.zk3d", m);
      save_snapshot(dir + "/" + name, r.trajectory[m]);
      nlohmann::ordered_json j;
      j["file"] = name;
      j["t"] = r.trajectory.time(m);
      j["config_hash"] = hash;
      manifest << j.dump() << "\n";
    }
  }
  std::ofstream(dir + "/simulate.jsonl") << meta.dump() << "\n";
  out << "simulate: " << r.steps << " steps of " << format_double(r.dt) << ", max N drift "
      << format_double(r.diagnostics.max_N_drift()) << ", max H drift " << format_double(r.diagnostics.max_H_drift())
      << "\n";
  if (meta.contains("soliton_shape_error")) out << "soliton shape error " << format_double(meta["soliton_shape_error"].get<double>()) << "\n";
  out << "config_hash = " << hash << "\n";
  return 0;
}

inline int cmd_picard(const RunConfig& c, std::ostream& out) {
  const FourierGrid g = build_grid(c);
  const Field u0 = build_initial_data(c, g);
  SolverConfig s = build_solver_config(c, u0);
  if (c.real("time", "dt") == 0.0) s.dt = s.T / 64.0;
  const PicardResult p = picard_iterate(u0, s, static_cast<int>(c.integer("solver", "iterations")));
  const std::string dir = output_dir(c);
  const std::string hash = hex64(c.hash());
  write_picard_csv(dir + "/picard.csv", p, hash);
  bool contracting = !p.contraction_failure;
  for (const auto& r : p.ratios)
    if (r && !(*r < 1.0)) contracting = false;
  nlohmann::ordered_json meta;
  meta["command"] = "picard";
  meta["config_hash"] = hash;
  meta["frames"] = p.frames;
  meta["contraction_failure"] = p.contraction_failure;
  meta["contracting"] = contracting;
  std::vector<double> totals;
  for (const auto& x : p.norms) totals.push_back(x.total);
  meta["iterate_norms"] = totals;
  meta["truncation_index"] = p.norms.front().truncation_index;
  std::ofstream(dir + "/picard.jsonl") << meta.dump() << "\n";
  out << "picard: " << p.ratios.size() << " ratios, " << (contracting ? "contracting" : "not contracting");
  if (p.contraction_failure) out << " (contraction failure)";
  out << "\nconfig_hash = " << hash << "\n";
  return contracting ? 0 : 2;
}

inline int cmd_verify_smoothing(const RunConfig& c, std::ostream& out) {
  const FourierGrid g = build_grid(c);
  Field phi = c.text("experiment", "data") == "random_shell" || c.text("experiment", "data") == "gaussian"
                  ? random_shell(g, static_cast<int>(c.integer("experiment", "k")), seed(c))
                  : build_initial_data(c, g);
  std::vector<EstimateReport> reports{kato_smoothing_check(phi, c.real("time", "window"),
                                                           static_cast<int>(c.integer("time", "doublings")),
                                                           static_cast<int>(c.integer("time", "n_t")))};
  return finish(out, c, reports);
}

inline int cmd_verify_maximal(const RunConfig& c, std::ostream& out) {
  MaximalOptions o;
  o.n = static_cast<int>(c.integer("grid", "n"));
  o.n_t = samples(c, 65);
  o.seed = seed(c);
  o.data = c.text("experiment", "shell_data") == "focusing" ? ShellData::focusing : ShellData::gaussian;
  o.exploratory = c.boolean("experiment", "exploratory");
  o.spread_tolerance = c.real("experiment", "spread_tolerance");
  o.slope_tolerance = c.real("experiment", "slope_tolerance");
  std::vector<EstimateReport> reports{maximal_ratio(static_cast<int>(c.integer("experiment", "k_min")),
                                                    static_cast<int>(c.integer("experiment", "k_max")),
                                                    c.real("solver", "alpha"), c.real("time", "T"),
                                                    static_cast<int>(c.integer("experiment", "trials")), o)};
  return finish(out, c, reports);
}

inline int cmd_verify_hs(const RunConfig& c, std::ostream& out) {
  HsOptions o;
  o.n = static_cast<int>(c.integer("grid", "n"));
  o.L = c.real("grid", "L");
  o.n_t = samples(c, 65);
  o.seed = seed(c);
  std::vector<EstimateReport> reports{hs_maximal_check(c.real("experiment", "s"), c.real("time", "T"),
                                                       static_cast<int>(c.integer("experiment", "trials")), o)};
  return finish(out, c, reports);
}

inline int cmd_sharpness(const RunConfig& c, std::ostream& out) {
  SharpnessOptionsFull o;
  const auto nx = c.integer("grid", "n_x"), ny = c.integer("grid", "n_y");
  o.grid.n_x = nx > 0 ? static_cast<int>(nx) : 48;
  o.grid.n_yz = ny > 0 ? static_cast<int>(ny) : 32;
  o.grid.n_t = samples(c, 65);
  o.eps = c.real("experiment", "eps");
  std::vector<EstimateReport> reports{sharpness_witness(static_cast<int>(c.integer("experiment", "sharpness_k_min")),
                                                        static_cast<int>(c.integer("experiment", "sharpness_k_max")),
                                                        c.real("time", "T"), c.real("solver", "alpha"), o)};
  return finish(out, c, reports);
}

inline int cmd_ik_scan(const RunConfig& c, std::ostream& out) {
  IkScanOptions o;
  o.scan.n = static_cast<int>(c.integer("grid", "n"));
  o.scan.box_units = c.real("experiment", "box_units");
  o.scan.n_t = samples(c, 33);
  o.k_values.clear();
  for (auto k = c.integer("experiment", "ik_k_min"); k <= c.integer("experiment", "ik_k_max"); ++k) o.k_values.push_back(static_cast<int>(k));
  const double alpha = c.real("solver", "alpha");
  const double T = c.real("experiment", "T_ik");
  const double X = c.real("experiment", "x_extent");
  std::vector<EstimateReport> reports;
  reports.push_back(ik_norm_scan(alpha, T, X, o));
  o.weighted = false;
  o.slope_max = 2.5;
  reports.push_back(ik_norm_scan(alpha, T, X, o));
  I0ScanOptions o0;
  o0.n_t = o.scan.n_t;
  reports.push_back(i0_norm_scan(c.real("experiment", "T_i0"), c.real("experiment", "x_extent_i0"), o0));
  std::vector<OscillatoryKernel> kernels{OscillatoryKernel::i0()};
  for (int k : o.k_values)
    for (int a = 0; a < 3; ++a) kernels.push_back(OscillatoryKernel::ik(a, k));
  SpotCheckOptions so;
  so.spots = static_cast<int>(c.integer("experiment", "spots"));
  so.seed = seed(c);
  so.t_max = 0.25 * T;
  reports.push_back(oscillatory_spot_checks(kernels, so));
  return finish(out, c, reports);
}

inline int cmd_norms(const std::string& path, const RunConfig& c, double s, std::ostream& out) {
  const Field f = load_snapshot(path);
  const auto& g = f.grid();
  const ShellDecomposition d = shell_decomposition(f);
  const std::string id = g.id();
  const std::string ti = std::to_string(d.truncation_index);
  out << "norm_name,k_or_total,value,truncation_index,grid_id\n";
  auto row = [&](const std::string& name, const std::string& k, double v) {
    out << name << "," << k << "," << format_double(v) << "," << ti << "," << id << "\n";
  };
  row("L2", "total", l2_norm(f));
  row("H^" + format_double(s), "total", sobolev_norm(f, s));
  row("H^" + format_double(s) + "_dyadic", "total", sobolev_norm_dyadic(f, s));
  row("B^{" + format_double(s) + ",1}_2", "total", besov_norm(f, s));
  row("P0", "0", d.p0);
  for (std::size_t k = 0; k < d.shells.size(); ++k) row("Delta", std::to_string(k), d.shells[k]);
  // X_T components of the free evolution of the snapshot over [0, T].
  const double T = c.real("time", "T");
  const int frames = samples(c, 65);
  Trajectory traj = free_trajectory(f, T, static_cast<std::size_t>(frames));
  const double alpha = c.real("solver", "alpha");
  const XtFlavor flavor = c.text("solver", "flavor") == "besov"
                              ? XtFlavor::besov()
                              : XtFlavor::sobolev(c.real("solver", "s"), c.real("solver", "epsilon"));
  const XtNorm x = xt_norm(traj, flavor, alpha);
  row("X_T_N", "total", x.N);
  row("X_T_T", "total", x.T);
  row("X_T_M", "total", x.M);
  row("X_T", "total", x.total);
  return 0;
}

inline int cmd_info(const RunConfig& c, std::ostream& out) {
  const FourierGrid g = build_grid(c);
  out << "# resolved configuration\n" << c.dump() << "\n";
  out << "config_hash = " << hex64(c.hash()) << "\n";
  out << "grid = " << g.id() << "\n";
  for (int a = 0; a < 3; ++a) {
    out << "axis " << "xyz"[a] << ": n = " << g.n(a) << ", L = " << format_double(g.length(a))
        << ", dx = " << format_double(g.spacing(a)) << ", dual spacing = " << format_double(g.dual_spacing(a))
        << ", nyquist = " << format_double(g.nyquist(a)) << "\n";
  }
  out << "max |xi| = " << format_double(g.max_radius()) << ", last shell = " << max_shell(g)
      << ", P_lesssim margin = " << kLesssimMargin << "\n";
  out << "threads = " << c.threads() << "\n";
  return 0;
}

/// Runs the zk-lab command line; returns the process exit code.
inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"zk-lab: Zakharov-Kuznetsov propagator, norms, estimates and solver"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  auto common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "config file (key = value with sections)");
    sub->add_option("--set", overrides, "override, e.g. --set grid.n=48 or --set seed=3");
    sub->add_option("-o,--out", out_dir, "output directory (overrides [output] dir)");
  };
  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "run the nonlinear solver; writes diagnostics.csv and snapshots"},
      {"picard", "Picard iteration with X_T difference norms; writes picard.csv"},
      {"verify-smoothing", "x-independence of the smoothing profile under window doubling"},
      {"verify-maximal", "weighted maximal estimate across shells"},
      {"verify-hs", "H^s maximal estimate, grid refinement"},
      {"sharpness", "the s >= 1 counterexample phi_k"},
      {"ik-scan", "L^1_x L^inf_{yzT} scans of I_0 and I_k plus FFT-vs-quadrature checks"},
      {"info", "print the resolved configuration and grid diagnostics"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    subs[name] = app.add_subcommand(name, help);
    common(subs[name]);
  }
  auto* norms = app.add_subcommand("norms", "H^s, Besov and X_T values of a ZK3D snapshot");
  common(norms);
  std::string snapshot;
  double s = 1.0;
  norms->add_option("snapshot", snapshot, "ZK3D file")->required();
  norms->add_option("--s", s, "Sobolev / Besov index");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  try {
    RunConfig c = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + o + "'", 0);
      const std::string name = o.substr(0, eq);
      const auto dot = name.find('.');
      c.set(dot == std::string::npos ? "" : name.substr(0, dot), dot == std::string::npos ? name : name.substr(dot + 1),
            o.substr(eq + 1));
    }
    if (!out_dir.empty()) c.set("output", "dir", out_dir);
    set_fft_threads(c.threads());
    if (*norms) return cmd_norms(snapshot, c, s, out);
    if (*subs["simulate"]) return cmd_simulate(c, out);
    if (*subs["picard"]) return cmd_picard(c, out);
    if (*subs["verify-smoothing"]) return cmd_verify_smoothing(c, out);
    if (*subs["verify-maximal"]) return cmd_verify_maximal(c, out);
    if (*subs["verify-hs"]) return cmd_verify_hs(c, out);
    if (*subs["sharpness"]) return cmd_sharpness(c, out);
    if (*subs["ik-scan"]) return cmd_ik_scan(c, out);
    if (*subs["info"]) return cmd_info(c, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace zk::cli
