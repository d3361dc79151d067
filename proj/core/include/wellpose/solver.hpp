#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "wellpose/field.hpp"

namespace wellpose {

struct FluidParams {
  double mu = 1.0;      // dynamic viscosity
  double lambda = 0.0;  // bulk viscosity coefficient
  double rho0 = 1.0;    // reference density
  double cs = 10.0;     // artificial sound speed of the barotropic closure
  double fx = 0.0;      // constant body force
  double fy = 0.0;

  /// Throws std::invalid_argument naming the offending field.
  /// Requires mu > 0, rho0 > 0, cs > 0, lambda >= -(2/3) mu.
  void validate() const;
};

struct SimState {
  VectorField2D vel;
  ScalarField2D rho;
  double t = 0.0;
  bool diverged = false;

  SimState(GridPtr grid, double rho0);
  const Grid2D& grid() const { return vel.grid(); }
  const GridPtr& grid_ptr() const { return vel.grid_ptr(); }
};

/// Linear barotropic closure p = cs^2 (rho - rho0).
ScalarField2D pressure_of(const ScalarField2D& rho, const FluidParams& params);

/// Monitored density fluctuation (rho - rho0) / rho0.
ScalarField2D eps_rho_of(const ScalarField2D& rho, const FluidParams& params);

struct Rates {
  VectorField2D dvel;
  ScalarField2D drho;
  explicit Rates(GridPtr grid) : dvel(grid), drho(grid) {}
};

/// Momentum and continuity right-hand side with constant mu, lambda:
///   dvel = [-grad p + mu (lap u + grad div u) + lambda grad div u + rho f] / rho
///          - (u . grad) u
///   drho = -div(rho u)
/// divu_scratch must live on the same grid; it holds div(u) between passes.
void rhs_into(const SimState& state, const FluidParams& params, Rates& out,
              ScalarField2D& divu_scratch);
Rates rhs(const SimState& state, const FluidParams& params);

/// dt = cfl * min(dx/(max|u|+cs), dy/(max|v|+cs),
///                rho0 * min(dx,dy)^2 / (4 (2 mu + lambda))).
/// Throws std::invalid_argument on a non-finite state.
double stable_dt(const SimState& state, const FluidParams& params, double cfl);

struct StepControls {
  /// Absolute kinetic-energy level beyond which the state is flagged
  /// diverged. Runners set this to blowup_ratio x initial energy; at the
  /// default (infinity) only non-finite values and rho <= 0 trigger the flag.
  double energy_blowup_threshold = std::numeric_limits<double>::infinity();
};

/// Classical 4-stage Runge-Kutta with preallocated stage storage.
/// No-slip is re-imposed after every stage and after the final combination.
class Rk4Stepper {
 public:
  explicit Rk4Stepper(GridPtr grid);

  /// Returns the advanced state; a diverged input is returned unchanged.
  SimState step(const SimState& state, const FluidParams& params, double dt,
                const StepControls& controls = {});

 private:
  SimState stage_;
  Rates k1_, k2_, k3_, k4_;
  ScalarField2D scratch_;
};

/// One-shot convenience wrapper around Rk4Stepper.
SimState step(const SimState& state, const FluidParams& params, double dt,
              const StepControls& controls = {});

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Diagnostics {
  double kinetic_energy = kNaN;          // 1/2 integral rho |u|^2
  double rms_velocity = kNaN;
  double max_abs_divergence = kNaN;
  double max_abs_eps_rho = kNaN;
  double l2_distance_to_reference = kNaN;  // NaN when no reference attached
  double max_dudt_norm = kNaN;             // NaN on the first sample
  bool diverged = false;
};

Diagnostics compute_diagnostics(const SimState& state, const FluidParams& params,
                                const VectorField2D* reference);

struct TrajectorySample {
  double t;
  Diagnostics d;
};

struct TrajectorySnapshot {
  long step;
  double t;
  VectorField2D vel;
  ScalarField2D rho;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<TrajectorySnapshot> snapshots;  // populated when snapshot_every > 0
  bool truncated_by_divergence = false;

  // Time integrals of the continuity identity residual
  // || div u + d ln(1+eps)/dt + u . grad ln(1+eps) ||_2 and of || div u ||_2,
  // accumulated between consecutive samples.
  double continuity_residual_integral = 0.0;
  double divergence_norm_integral = 0.0;
};

/// L-infinity norm of (vel_k - vel_{k-1}) / (t_k - t_{k-1}) over stored
/// snapshots. Throws std::invalid_argument when snapshots are missing or
/// k is out of range (k >= 1 required).
double dudt_norm(const Trajectory& traj, std::size_t k);

struct RunOptions {
  double t_end = 1.0;
  double cfl = 0.9;
  int sample_every = 10;
  double blowup_ratio = 1e6;
  bool freeze_dt = false;   // compute stable_dt once at t=0 and keep it
  int snapshot_every = 0;   // 0 disables snapshot storage
  std::optional<VectorField2D> reference;  // target of l2_distance_to_reference
};

/// Repeated RK4 steps with per-step stable_dt (unless frozen), recording
/// Diagnostics every sample_every steps plus the initial and final states.
/// Stops early when the state diverges. When final_state is non-null it
/// receives the last computed state.
Trajectory run_forward(const SimState& initial, const FluidParams& params,
                       const RunOptions& opts, SimState* final_state = nullptr);

/// Trajectory CSV with columns
/// t,kinetic_energy,rms_velocity,max_div,max_eps_rho,l2_dist,dudt_norm,diverged
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace wellpose
