// Plane soliton through the library API: integrate, compare with the travelling
// profile, print the conserved quantities. Usage: soliton_demo [T] [dt]

#include <cstdio>
#include <cstdlib>

#include "zk/zk.hpp"

int main(int argc, char** argv) {
  const double T = argc > 1 ? std::atof(argv[1]) : 2.0;
  const double dt = argc > 2 ? std::atof(argv[2]) : 0.01;
  const double c = 1.0, x0 = -5.0;

  const auto g = zk::make_grid({128, 8, 8}, {50.0, 50.0, 50.0});
  zk::SolverConfig cfg;
  cfg.T = T;
  cfg.dt = dt;
  cfg.snapshot_every = zk::step_count(T, dt) / 4;
  if (cfg.snapshot_every < 1) cfg.snapshot_every = 1;

  const auto res = zk::solve(zk::plane_soliton(g, c, x0), cfg);
  const auto& d = res.diagnostics;
  std::printf("%8s %14s %14s %12s\n", "t", "N", "H", "shape err");
  for (std::size_t m = 0; m < res.trajectory.size(); ++m) {
    const double t = res.trajectory.time(m);
    const auto exact = zk::plane_soliton_at(g, c, t, x0);
    const double err = zk::l2_norm(res.trajectory[m] - exact) / zk::l2_norm(exact);
    std::printf("%8.3f %14.10f %14.10f %12.3e\n", t, d.N_values[m], d.H_values[m], err);
  }
  std::printf("steps %d, dt %g, max N drift %.2e, max H drift %.2e\n", res.steps, res.dt, d.max_N_drift(),
              d.max_H_drift());
  return 0;
}
