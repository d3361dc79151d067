#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "wellpose/admissibility.hpp"

namespace wellpose {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat key=value configuration with section prefixes (grid.nx=64).
/// Lines starting with '#' and blank lines are ignored; unknown and
/// duplicate keys are rejected with line numbers. The system is
/// deterministic by construction, so there is no seed.
struct RunConfig {
  // grid
  int nx = 64, ny = 64;
  double lx = 1.0, ly = 1.0;
  // fluid
  FluidParams fluid{.mu = 1.0, .lambda = 0.0, .rho0 = 1.0, .cs = 2.5,
                    .fx = 0.0, .fy = 0.0};
  // benchmark
  double bench_px = -2.0;
  double bench_h = 1.0;  // must equal grid ly
  // run
  double t_end = 5.0;
  double cfl = 0.9;
  int sample_every = 10;
  int snapshot_every = 0;
  double tol_residual = 1e-8;
  double tol_steady = 1e-4;
  double blowup_ratio = 1e6;
  double energy_ratio_max = 10.0;
  double little_o_factor = 0.1;
  double little_o_floor = 1e-8;
  double big_o_bound = 10.0;
  bool freeze_dt = false;
  // init (forward / single-point classification)
  double alpha = 1.0;
  double eps = 0.0;
  int k = 2;
  // reverse
  double rev_j0 = 0.9;
  double rev_t0 = 1.0;
  double rev_t_end = 1e4;
  int rev_n_steps = 40000;
  int rev_wall_margin = 2;
  double rev_tol = 1e-6;
  // sweep (axes as explicit value lists; lo:hi:n is accepted on input)
  std::vector<double> sweep_alpha{1.0};
  std::vector<double> sweep_eps{0.0};
  std::vector<int> sweep_k{1};
  bool sweep_emit_timing = false;

  GridPtr make_grid_ptr() const { return make_grid(nx, ny, lx, ly); }
  SteadyBenchmark make_bench() const;
  ClassifyConfig make_classify_config() const;
  SweepAxes make_sweep_axes() const;
};

/// Strict parse; throws ConfigError with a line number for syntax problems
/// and with the key name and violated bound for constraint problems.
RunConfig parse_config(const std::string& text);

/// Canonical emission: every key, fixed order, 17 significant digits.
/// parse_config(emit_config(c)) reproduces c, and emitting again yields
/// identical text.
std::string emit_config(const RunConfig& c);

/// Key-by-key default and constraint listing for --help.
std::string config_help();

}  // namespace wellpose
