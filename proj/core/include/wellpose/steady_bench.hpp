#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "wellpose/solver.hpp"

namespace wellpose {

/// Analytic plane Poiseuille profile (1 / 2 mu) px (y^2 - y h).
/// Throws std::domain_error unless mu > 0 and 0 <= y <= h.
double poiseuille_profile(double y, double mu, double px, double h);

struct SteadyBenchmark {
  std::string name;
  double h = 1.0;    // channel height; must match grid.ly when attached
  double px = 0.0;   // driving pressure gradient dp/dx
  double mu = 1.0;
  std::function<double(double)> profile;  // y -> streamwise velocity
};

SteadyBenchmark make_poiseuille(double mu, double px, double h);

/// Immutable after construction; lookups are reentrant.
class BenchmarkRegistry {
 public:
  void add(SteadyBenchmark bench);  // throws on duplicate name or no-slip violation
  const SteadyBenchmark& get(const std::string& name) const;  // throws std::out_of_range
  std::vector<std::string> names() const;

  static BenchmarkRegistry with_builtin(double mu, double px, double h);

 private:
  std::vector<SteadyBenchmark> entries_;
};

struct SteadyResidualReport {
  double max_norm = 0.0;
  double l2_norm = 0.0;
  double max_div = 0.0;
  double tol = 1e-8;
  bool pass = false;
};

/// Steady momentum residual  div(u u) + rho^-1 [grad p + mu curl(curl u)] - f
/// over interior rows (wall rows are constraint rows, not residual rows).
/// The pressure is split as p = mean_dpdx * x + p_periodic so that a constant
/// streamwise gradient is representable on the periodic grid.
SteadyResidualReport steady_residual(const VectorField2D& vel,
                                     const ScalarField2D& rho,
                                     const ScalarField2D& p_periodic,
                                     const FluidParams& params,
                                     double fx, double fy,
                                     double mean_dpdx = 0.0,
                                     double tol = 1e-8);

/// Body force equivalent of the benchmark pressure gradient at amplitude
/// alpha: (-alpha px / rho0, 0).
std::array<double, 2> bench_body_force(const SteadyBenchmark& bench,
                                       const FluidParams& params,
                                       double alpha = 1.0);

/// SimState with vel_x = profile(y), vel_y = 0, rho = rho0.
/// Throws std::invalid_argument when grid.ly does not match bench.h.
SimState as_initial_state(const SteadyBenchmark& bench, GridPtr grid,
                          const FluidParams& params);

/// Reference velocity field alpha * profile(y) on the grid (uy = 0).
VectorField2D sampled_profile(const SteadyBenchmark& bench, GridPtr grid,
                              double alpha = 1.0);

}  // namespace wellpose
