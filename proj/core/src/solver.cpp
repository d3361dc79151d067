#include "wellpose/solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "wellpose/field_io.hpp"
#include "wellpose/stencil.hpp"

namespace wellpose {

void FluidParams::validate() const {
  if (!(mu > 0.0)) throw std::invalid_argument("fluid.mu: must be > 0");
  if (!(rho0 > 0.0)) throw std::invalid_argument("fluid.rho0: must be > 0");
  if (!(cs > 0.0)) throw std::invalid_argument("fluid.cs: must be > 0");
  if (!(lambda >= -(2.0 / 3.0) * mu))
    throw std::invalid_argument("fluid.lambda: must be >= -(2/3) mu");
  if (!std::isfinite(fx) || !std::isfinite(fy))
    throw std::invalid_argument("fluid.f: must be finite");
}

SimState::SimState(GridPtr grid, double rho0)
    : vel(grid), rho(std::move(grid), rho0) {}

ScalarField2D pressure_of(const ScalarField2D& rho, const FluidParams& params) {
  ScalarField2D p(rho.grid_ptr());
  const double cs2 = params.cs * params.cs;
  auto r = rho.values();
  auto out = p.values();
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] = cs2 * (r[n] - params.rho0);
  return p;
}

ScalarField2D eps_rho_of(const ScalarField2D& rho, const FluidParams& params) {
  ScalarField2D eps(rho.grid_ptr());
  const double inv_rho0 = 1.0 / params.rho0;
  auto r = rho.values();
  auto out = eps.values();
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] = (r[n] - params.rho0) * inv_rho0;
  return eps;
}

namespace {

// y-stencil rows and premultiplied coefficients for one grid row. The first
// derivative uses rows j1[0..2]; the second derivative reuses the same rows
// plus one extra (j4), so each field needs only four row pointers. Wall rows
// carry the one-sided second-order closures, interior rows the central forms
// (padded with zero coefficients so the inner loop is uniform).
struct RowStencil {
  int j1[3];
  int j4;
  double c1[3];
  double c2[4];  // applies to rows (j1[0], j1[1], j1[2], j4)
};

RowStencil row_stencil(int j, int ny, double dy) {
  const double inv2dy = 1.0 / (2.0 * dy);
  const double invdy2 = 1.0 / (dy * dy);
  RowStencil s;
  if (j == 0) {
    s.j1[0] = 0; s.j1[1] = 1; s.j1[2] = 2; s.j4 = 3;
    s.c1[0] = -3.0 * inv2dy; s.c1[1] = 4.0 * inv2dy; s.c1[2] = -inv2dy;
    s.c2[0] = 2.0 * invdy2; s.c2[1] = -5.0 * invdy2;
    s.c2[2] = 4.0 * invdy2; s.c2[3] = -invdy2;
  } else if (j == ny - 1) {
    s.j1[0] = j; s.j1[1] = j - 1; s.j1[2] = j - 2; s.j4 = j - 3;
    s.c1[0] = 3.0 * inv2dy; s.c1[1] = -4.0 * inv2dy; s.c1[2] = inv2dy;
    s.c2[0] = 2.0 * invdy2; s.c2[1] = -5.0 * invdy2;
    s.c2[2] = 4.0 * invdy2; s.c2[3] = -invdy2;
  } else {
    s.j1[0] = j - 1; s.j1[1] = j; s.j1[2] = j + 1; s.j4 = j;
    s.c1[0] = -inv2dy; s.c1[1] = 0.0; s.c1[2] = inv2dy;
    s.c2[0] = invdy2; s.c2[1] = -2.0 * invdy2; s.c2[2] = invdy2; s.c2[3] = 0.0;
  }
  return s;
}

void zero_wall_rows(VectorField2D& vel) {
  const int ny = vel.grid().ny();
  for (double& v : vel.ux.row(0)) v = 0.0;
  for (double& v : vel.uy.row(0)) v = 0.0;
  for (double& v : vel.ux.row(ny - 1)) v = 0.0;
  for (double& v : vel.uy.row(ny - 1)) v = 0.0;
}

// One grid row of the momentum right-hand side. Kept out of line so the
// interior loop stays simple enough for the auto-vectorizer.
__attribute__((noinline)) void momentum_row(
    int nx, const double* u, const double* v, const double* r,
    const double* dv, const double* u1a, const double* u1b, const double* u1c,
    const double* u4, const double* v1a, const double* v1b, const double* v1c,
    const double* v4, const double* r1a, const double* r1b, const double* r1c,
    const double* d1a, const double* d1b, const double* d1c,
    double* __restrict out_du, double* __restrict out_dv, double c1a,
    double c1b, double c1c, double c2a, double c2b, double c2c, double c2d,
    double cs2, double inv2dx, double invdx2, double mu, double mu_plus_lambda,
    double fx, double fy) {
#define WELLPOSE_RHS_MOMENTUM(i, iw, ie)                                     \
  do {                                                                       \
    const double inv_rho = 1.0 / r[i];                                       \
    const double u_c = u[i];                                                 \
    const double v_c = v[i];                                                 \
    const double dpdx = cs2 * (r[ie] - r[iw]) * inv2dx;                      \
    const double dpdy = cs2 * (c1a * r1a[i] + c1b * r1b[i] + c1c * r1c[i]);  \
    const double lap_u = (u[ie] - 2.0 * u_c + u[iw]) * invdx2 +              \
                         c2a * u1a[i] + c2b * u1b[i] + c2c * u1c[i] +        \
                         c2d * u4[i];                                        \
    const double lap_v = (v[ie] - 2.0 * v_c + v[iw]) * invdx2 +              \
                         c2a * v1a[i] + c2b * v1b[i] + c2c * v1c[i] +        \
                         c2d * v4[i];                                        \
    const double ddivdx = (dv[ie] - dv[iw]) * inv2dx;                        \
    const double ddivdy = c1a * d1a[i] + c1b * d1b[i] + c1c * d1c[i];        \
    const double dudx = (u[ie] - u[iw]) * inv2dx;                            \
    const double dudy = c1a * u1a[i] + c1b * u1b[i] + c1c * u1c[i];          \
    const double dvdx = (v[ie] - v[iw]) * inv2dx;                            \
    const double dvdy = c1a * v1a[i] + c1b * v1b[i] + c1c * v1c[i];          \
    out_du[i] = (-dpdx + mu * lap_u + mu_plus_lambda * ddivdx) * inv_rho +   \
                fx - (u_c * dudx + v_c * dudy);                              \
    out_dv[i] = (-dpdy + mu * lap_v + mu_plus_lambda * ddivdy) * inv_rho +   \
                fy - (u_c * dvdx + v_c * dvdy);                              \
  } while (0)

  WELLPOSE_RHS_MOMENTUM(0, nx - 1, 1);
  for (int i = 1; i < nx - 1; ++i) WELLPOSE_RHS_MOMENTUM(i, i - 1, i + 1);
  WELLPOSE_RHS_MOMENTUM(nx - 1, nx - 2, 0);
#undef WELLPOSE_RHS_MOMENTUM
}

}  // namespace

// Assembled row by row; out and scratch must not alias the state.
void rhs_into(const SimState& state, const FluidParams& params, Rates& out,
              ScalarField2D& divu_scratch) {
  require_same_grid(state.vel, out.dvel);
  require_same_grid(state.vel, divu_scratch);
  const Grid2D& g = state.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  const double inv2dx = 1.0 / (2.0 * g.dx());
  const double invdx2 = 1.0 / (g.dx() * g.dx());
  const double cs2 = params.cs * params.cs;
  const double mu = params.mu;
  const double mu_plus_lambda = params.mu + params.lambda;
  const double fx = params.fx;
  const double fy = params.fy;

  divergence_into(state.vel, divu_scratch);

  for (int j = 0; j < ny; ++j) {
    const RowStencil s = row_stencil(j, ny, g.dy());
    const double c1a = s.c1[0], c1b = s.c1[1], c1c = s.c1[2];
    const double c2a = s.c2[0], c2b = s.c2[1], c2c = s.c2[2], c2d = s.c2[3];

    const double* u = state.vel.ux.row(j).data();
    const double* v = state.vel.uy.row(j).data();
    const double* r = state.rho.row(j).data();
    const double* dv = divu_scratch.row(j).data();

    const double* u1a = state.vel.ux.row(s.j1[0]).data();
    const double* u1b = state.vel.ux.row(s.j1[1]).data();
    const double* u1c = state.vel.ux.row(s.j1[2]).data();
    const double* u4 = state.vel.ux.row(s.j4).data();
    const double* v1a = state.vel.uy.row(s.j1[0]).data();
    const double* v1b = state.vel.uy.row(s.j1[1]).data();
    const double* v1c = state.vel.uy.row(s.j1[2]).data();
    const double* v4 = state.vel.uy.row(s.j4).data();
    const double* r1a = state.rho.row(s.j1[0]).data();
    const double* r1b = state.rho.row(s.j1[1]).data();
    const double* r1c = state.rho.row(s.j1[2]).data();
    const double* d1a = divu_scratch.row(s.j1[0]).data();
    const double* d1b = divu_scratch.row(s.j1[1]).data();
    const double* d1c = divu_scratch.row(s.j1[2]).data();

    double* __restrict out_du = out.dvel.ux.row(j).data();
    double* __restrict out_dv = out.dvel.uy.row(j).data();
    double* __restrict out_dr = out.drho.row(j).data();

    momentum_row(nx, u, v, r, dv, u1a, u1b, u1c, u4, v1a, v1b, v1c, v4, r1a,
                 r1b, r1c, d1a, d1b, d1c, out_du, out_dv, c1a, c1b, c1c, c2a,
                 c2b, c2c, c2d, cs2, inv2dx, invdx2, mu, mu_plus_lambda, fx,
                 fy);

#define WELLPOSE_RHS_MASS(i, iw, ie)                                         \
  do {                                                                       \
    const double drux = (r[ie] * u[ie] - r[iw] * u[iw]) * inv2dx;            \
    const double drvy = c1a * r1a[i] * v1a[i] + c1b * r1b[i] * v1b[i] +      \
                        c1c * r1c[i] * v1c[i];                               \
    out_dr[i] = -(drux + drvy);                                              \
  } while (0)

    WELLPOSE_RHS_MASS(0, nx - 1, 1);
    for (int i = 1; i < nx - 1; ++i) WELLPOSE_RHS_MASS(i, i - 1, i + 1);
    WELLPOSE_RHS_MASS(nx - 1, nx - 2, 0);

#undef WELLPOSE_RHS_MASS
  }
}

Rates rhs(const SimState& state, const FluidParams& params) {
  Rates out(state.grid_ptr());
  ScalarField2D scratch(state.grid_ptr());
  rhs_into(state, params, out, scratch);
  return out;
}

double stable_dt(const SimState& state, const FluidParams& params, double cfl) {
  if (!(cfl > 0.0 && cfl <= 1.0))
    throw std::invalid_argument("stable_dt: cfl must be in (0, 1]");
  const double max_u = state.vel.ux.max_abs();
  const double max_v = state.vel.uy.max_abs();
  if (!std::isfinite(max_u) || !std::isfinite(max_v))
    throw std::invalid_argument("stable_dt: non-finite state");
  const Grid2D& g = state.grid();
  const double acoustic_x = g.dx() / (max_u + params.cs);
  const double acoustic_y = g.dy() / (max_v + params.cs);
  const double h = std::min(g.dx(), g.dy());
  const double viscous =
      params.rho0 * h * h / (4.0 * (2.0 * params.mu + params.lambda));
  return cfl * std::min({acoustic_x, acoustic_y, viscous});
}

Rk4Stepper::Rk4Stepper(GridPtr grid)
    : stage_(grid, 0.0),
      k1_(grid),
      k2_(grid),
      k3_(grid),
      k4_(grid),
      scratch_(std::move(grid)) {}

namespace {

void build_stage(SimState& stage, const SimState& base, const Rates& k,
                 double a) {
  auto axpy = [a](std::span<double> out, std::span<const double> x,
                  std::span<const double> d) {
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = x[n] + a * d[n];
  };
  axpy(stage.vel.ux.values(), base.vel.ux.values(), k.dvel.ux.values());
  axpy(stage.vel.uy.values(), base.vel.uy.values(), k.dvel.uy.values());
  axpy(stage.rho.values(), base.rho.values(), k.drho.values());
  zero_wall_rows(stage.vel);
  stage.t = base.t + a;
  stage.diverged = false;
}

void combine_rk4(std::span<double> out, std::span<const double> x, double w,
                 std::span<const double> k1, std::span<const double> k2,
                 std::span<const double> k3, std::span<const double> k4) {
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] = x[n] + w * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
}

}  // namespace

SimState Rk4Stepper::step(const SimState& state, const FluidParams& params,
                          double dt, const StepControls& controls) {
  if (state.diverged) return state;
  WP_CONTRACT(dt > 0.0);

  rhs_into(state, params, k1_, scratch_);
  build_stage(stage_, state, k1_, 0.5 * dt);
  rhs_into(stage_, params, k2_, scratch_);
  build_stage(stage_, state, k2_, 0.5 * dt);
  rhs_into(stage_, params, k3_, scratch_);
  build_stage(stage_, state, k3_, dt);
  rhs_into(stage_, params, k4_, scratch_);

  SimState out = state;
  const double w = dt / 6.0;
  combine_rk4(out.vel.ux.values(), state.vel.ux.values(), w,
              k1_.dvel.ux.values(), k2_.dvel.ux.values(), k3_.dvel.ux.values(),
              k4_.dvel.ux.values());
  combine_rk4(out.vel.uy.values(), state.vel.uy.values(), w,
              k1_.dvel.uy.values(), k2_.dvel.uy.values(), k3_.dvel.uy.values(),
              k4_.dvel.uy.values());
  combine_rk4(out.rho.values(), state.rho.values(), w, k1_.drho.values(),
              k2_.drho.values(), k3_.drho.values(), k4_.drho.values());
  zero_wall_rows(out.vel);
  out.t = state.t + dt;

  // Blow-up detection: energy threshold, positivity of rho, finiteness.
  const Grid2D& g = out.grid();
  double ke = 0.0;
  double rho_min = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.ny(); ++j) {
    const double* u = out.vel.ux.row(j).data();
    const double* v = out.vel.uy.row(j).data();
    const double* r = out.rho.row(j).data();
    double row_ke = 0.0;
    double row_min = rho_min;
    for (int i = 0; i < g.nx(); ++i) {
      row_ke += r[i] * (u[i] * u[i] + v[i] * v[i]);
      row_min = r[i] < row_min ? r[i] : row_min;
    }
    ke += row_ke * quadrature_weight_y(g, j);
    rho_min = row_min;
  }
  ke *= 0.5 * g.dx();
  out.diverged =
      !std::isfinite(ke) || ke > controls.energy_blowup_threshold ||
      !(rho_min > 0.0);
  return out;
}

SimState step(const SimState& state, const FluidParams& params, double dt,
              const StepControls& controls) {
  Rk4Stepper stepper(state.grid_ptr());
  return stepper.step(state, params, dt, controls);
}

Diagnostics compute_diagnostics(const SimState& state,
                                const FluidParams& params,
                                const VectorField2D* reference) {
  const Grid2D& g = state.grid();
  const double area = g.lx() * g.ly();
  Diagnostics d;
  d.diverged = state.diverged;

  double ke = 0.0, vel_sq = 0.0, dist_sq = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    const double wj = quadrature_weight_y(g, j);
    const double* u = state.vel.ux.row(j).data();
    const double* v = state.vel.uy.row(j).data();
    const double* r = state.rho.row(j).data();
    double row_ke = 0.0, row_v2 = 0.0, row_d2 = 0.0;
    for (int i = 0; i < g.nx(); ++i) {
      const double sq = u[i] * u[i] + v[i] * v[i];
      row_ke += r[i] * sq;
      row_v2 += sq;
      if (reference) {
        const double du = u[i] - reference->ux(i, j);
        const double dv = v[i] - reference->uy(i, j);
        row_d2 += du * du + dv * dv;
      }
    }
    ke += row_ke * wj;
    vel_sq += row_v2 * wj;
    dist_sq += row_d2 * wj;
  }
  d.kinetic_energy = 0.5 * ke * g.dx();
  d.rms_velocity = std::sqrt(vel_sq * g.dx() / area);
  if (reference) d.l2_distance_to_reference = std::sqrt(dist_sq * g.dx() / area);

  const ScalarField2D div = divergence(state.vel);
  d.max_abs_divergence = div.max_abs();
  d.max_abs_eps_rho = eps_rho_of(state.rho, params).max_abs();
  return d;
}

double dudt_norm(const Trajectory& traj, std::size_t k) {
  if (traj.snapshots.size() < 2)
    throw std::invalid_argument("dudt_norm: trajectory has no stored snapshots");
  if (k < 1 || k >= traj.snapshots.size())
    throw std::invalid_argument("dudt_norm: snapshot index out of range");
  const TrajectorySnapshot& a = traj.snapshots[k - 1];
  const TrajectorySnapshot& b = traj.snapshots[k];
  const double inv_dt = 1.0 / (b.t - a.t);
  double m = 0.0;
  auto au = a.vel.ux.values(), av = a.vel.uy.values();
  auto bu = b.vel.ux.values(), bv = b.vel.uy.values();
  for (std::size_t n = 0; n < au.size(); ++n) {
    m = std::max(m, std::abs((bu[n] - au[n]) * inv_dt));
    m = std::max(m, std::abs((bv[n] - av[n]) * inv_dt));
  }
  return m;
}

namespace {

double weighted_l2(const ScalarField2D& f) {
  const Grid2D& g = f.grid();
  double acc = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    const double wj = quadrature_weight_y(g, j);
    const double* p = f.row(j).data();
    double row = 0.0;
    for (int i = 0; i < g.nx(); ++i) row += p[i] * p[i];
    acc += row * wj;
  }
  return std::sqrt(acc * g.dx() / (g.lx() * g.ly()));
}

// ln(1 + eps_rho) and its streamwise/vertical advection u . grad(.).
void log_density_fields(const SimState& state, const FluidParams& params,
                        ScalarField2D& ln_eps, ScalarField2D& advected,
                        VectorField2D& grad_scratch) {
  auto r = state.rho.values();
  auto out = ln_eps.values();
  const double inv_rho0 = 1.0 / params.rho0;
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] = std::log(r[n] * inv_rho0);
  gradient_into(ln_eps, grad_scratch);
  auto u = state.vel.ux.values();
  auto v = state.vel.uy.values();
  auto gx = grad_scratch.ux.values();
  auto gy = grad_scratch.uy.values();
  auto adv = advected.values();
  for (std::size_t n = 0; n < adv.size(); ++n)
    adv[n] = u[n] * gx[n] + v[n] * gy[n];
}

}  // namespace

Trajectory run_forward(const SimState& initial, const FluidParams& params,
                       const RunOptions& opts, SimState* final_state) {
  if (!(opts.t_end > initial.t))
    throw std::invalid_argument("run_forward: t_end must exceed initial time");
  if (opts.sample_every < 1)
    throw std::invalid_argument("run_forward: sample_every must be >= 1");
  if (opts.reference) require_same_grid(initial.vel, *opts.reference);

  const GridPtr grid = initial.grid_ptr();
  SimState state = initial;
  Rk4Stepper stepper(grid);
  Trajectory traj;

  StepControls controls;
  {
    Diagnostics d0 = compute_diagnostics(
        state, params, opts.reference ? &*opts.reference : nullptr);
    if (d0.kinetic_energy > 0.0 && std::isfinite(d0.kinetic_energy))
      controls.energy_blowup_threshold = opts.blowup_ratio * d0.kinetic_energy;
    traj.samples.push_back({state.t, d0});
  }
  if (opts.snapshot_every > 0)
    traj.snapshots.push_back({0, state.t, state.vel, state.rho});

  const double dt_frozen =
      opts.freeze_dt ? stable_dt(state, params, opts.cfl) : 0.0;
  const double t_slack = 1e-12 * std::max(1.0, std::abs(opts.t_end));

  // Per-sample history for dudt and the continuity identity residual.
  VectorField2D prev_vel = state.vel;
  double prev_t = state.t;
  ScalarField2D ln_eps(grid), prev_ln_eps(grid), adv_ln(grid), prev_adv_ln(grid);
  ScalarField2D div_now(grid), prev_div(grid), residual(grid);
  VectorField2D grad_scratch(grid);
  log_density_fields(state, params, prev_ln_eps, prev_adv_ln, grad_scratch);
  divergence_into(state.vel, prev_div);

  long step_count = 0;
  while (!state.diverged && opts.t_end - state.t > t_slack) {
    double dt = opts.freeze_dt ? dt_frozen : stable_dt(state, params, opts.cfl);
    dt = std::min(dt, opts.t_end - state.t);
    state = stepper.step(state, params, dt, controls);
    ++step_count;

    const bool done = opts.t_end - state.t <= t_slack;
    const bool sample_now =
        (step_count % opts.sample_every == 0) || done || state.diverged;
    if (opts.snapshot_every > 0 && (step_count % opts.snapshot_every == 0 ||
                                    done || state.diverged))
      traj.snapshots.push_back({step_count, state.t, state.vel, state.rho});
    if (!sample_now) continue;

    Diagnostics d = compute_diagnostics(
        state, params, opts.reference ? &*opts.reference : nullptr);
    d.diverged = state.diverged;
    const double dt_sample = state.t - prev_t;
    if (dt_sample > 0.0) {
      double m = 0.0;
      auto pu = prev_vel.ux.values(), pv = prev_vel.uy.values();
      auto cu = state.vel.ux.values(), cv = state.vel.uy.values();
      const double inv = 1.0 / dt_sample;
      for (std::size_t n = 0; n < cu.size(); ++n) {
        m = std::max(m, std::abs((cu[n] - pu[n]) * inv));
        m = std::max(m, std::abs((cv[n] - pv[n]) * inv));
      }
      d.max_dudt_norm = m;
    }
    traj.samples.push_back({state.t, d});

    if (!state.diverged && dt_sample > 0.0) {
      log_density_fields(state, params, ln_eps, adv_ln, grad_scratch);
      divergence_into(state.vel, div_now);
      auto res = residual.values();
      auto dn = div_now.values(), dp = prev_div.values();
      auto ln = ln_eps.values(), lp = prev_ln_eps.values();
      auto an = adv_ln.values(), ap = prev_adv_ln.values();
      const double inv = 1.0 / dt_sample;
      for (std::size_t n = 0; n < res.size(); ++n)
        res[n] = 0.5 * (dn[n] + dp[n]) + (ln[n] - lp[n]) * inv +
                 0.5 * (an[n] + ap[n]);
      traj.continuity_residual_integral += weighted_l2(residual) * dt_sample;
      traj.divergence_norm_integral +=
          0.5 * (weighted_l2(div_now) + weighted_l2(prev_div)) * dt_sample;
      std::swap(prev_ln_eps, ln_eps);
      std::swap(prev_adv_ln, adv_ln);
      std::swap(prev_div, div_now);
    }
    prev_vel = state.vel;
    prev_t = state.t;
  }

  traj.truncated_by_divergence = state.diverged;
  if (final_state) *final_state = state;
  return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,kinetic_energy,rms_velocity,max_div,max_eps_rho,l2_dist,dudt_norm,"
        "diverged\n";
  for (const TrajectorySample& s : traj.samples) {
    os << fmt17(s.t) << ',' << fmt17(s.d.kinetic_energy) << ','
       << fmt17(s.d.rms_velocity) << ',' << fmt17(s.d.max_abs_divergence) << ','
       << fmt17(s.d.max_abs_eps_rho) << ','
       << fmt17(s.d.l2_distance_to_reference) << ','
       << fmt17(s.d.max_dudt_norm) << ',' << (s.d.diverged ? 1 : 0) << '\n';
  }
}

}  // namespace wellpose
