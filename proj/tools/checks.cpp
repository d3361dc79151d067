#include "checks.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "wellpose/admissibility.hpp"
#include "wellpose/config.hpp"
#include "wellpose/field_io.hpp"
#include "wellpose/stencil.hpp"

namespace wellpose::cli {

namespace {

constexpr double pi = std::numbers::pi;

struct Harness {
  std::vector<CheckOutcome> results;

  void run(const std::string& name, const std::function<void()>& body) {
    try {
      body();
      results.push_back({name, true, ""});
    } catch (const std::exception& e) {
      results.push_back({name, false, e.what()});
    }
  }
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error(what);
}

void expect_near(double got, double want, double tol, const std::string& what) {
  if (!(std::abs(got - want) <= tol)) {
    std::ostringstream os;
    os << what << ": got " << got << ", want " << want << " (tol " << tol << ")";
    throw std::runtime_error(os.str());
  }
}

FluidParams base_params() {
  FluidParams p;
  p.mu = 1.0;
  p.lambda = 0.0;
  p.rho0 = 1.0;
  p.cs = 2.5;
  return p;
}

ScalarField2D fill(GridPtr g, const std::function<double(double, double)>& f) {
  ScalarField2D out(g);
  for (int j = 0; j < g->ny(); ++j)
    for (int i = 0; i < g->nx(); ++i) out(i, j) = f(g->x(i), g->y(j));
  return out;
}

double max_err(const ScalarField2D& got,
               const std::function<double(double, double)>& want,
               int x_margin = 0, int y_margin = 0) {
  const Grid2D& g = got.grid();
  double m = 0.0;
  for (int j = y_margin; j < g.ny() - y_margin; ++j)
    for (int i = x_margin; i < g.nx() - x_margin; ++i)
      m = std::max(m, std::abs(got(i, j) - want(g.x(i), g.y(j))));
  return m;
}

}  // namespace

std::vector<CheckOutcome> run_self_checks() {
  Harness h;
  const FluidParams params = base_params();
  const SteadyBenchmark bench = make_poiseuille(1.0, -2.0, 1.0);
  auto grid24 = make_grid(24, 24, 1.0, 1.0);
  auto grid32 = make_grid(32, 32, 1.0, 1.0);

  h.run("fields.gradient", [&] {
    auto gy = gradient(fill(grid32, [](double, double y) { return y * y; }));
    expect(max_err(gy.uy, [](double, double y) { return 2.0 * y; }, 0, 1) <=
               1e-12,
           "gradient of y^2 not 2y at interior nodes");
    expect(gradient(ScalarField2D(grid32, 3.0)).ux.max_abs() == 0.0,
           "gradient of a constant not zero");
  });

  h.run("fields.divergence", [&] {
    VectorField2D shear(grid32);
    for (int j = 0; j < 32; ++j)
      for (int i = 0; i < 32; ++i)
        shear.ux(i, j) = grid32->y(j) * (1.0 - grid32->y(j));
    expect(divergence(shear).max_abs() <= 1e-13,
           "divergence of parallel shear not zero");
  });

  h.run("fields.curl_z", [&] {
    VectorField2D rot(grid32);
    for (int j = 0; j < 32; ++j)
      for (int i = 0; i < 32; ++i) {
        rot.ux(i, j) = -grid32->y(j);
        rot.uy(i, j) = grid32->x(i);
      }
    expect(max_err(curl_z(rot), [](double, double) { return 2.0; }, 1, 0) <=
               1e-12,
           "vorticity of rigid rotation not 2");
  });

  h.run("fields.curl_of_curl", [&] {
    VectorField2D shear(grid32);
    for (int j = 0; j < 32; ++j)
      for (int i = 0; i < 32; ++i)
        shear.ux(i, j) = grid32->y(j) * (1.0 - grid32->y(j));
    auto cc = curl_of_curl(shear);
    expect(max_err(cc.ux, [](double, double) { return 2.0; }) <= 1e-12,
           "curl(curl) of shear profile not (2, 0)");
    expect(cc.uy.max_abs() <= 1e-12, "curl(curl) y-component not zero");
  });

  h.run("fields.advection_div", [&] {
    VectorField2D stream(grid32);
    for (int j = 0; j < 32; ++j)
      for (int i = 0; i < 32; ++i) stream.ux(i, j) = grid32->x(i);
    auto adv = advection_div(stream);
    expect(max_err(adv.ux, [](double x, double) { return 2.0 * x; }, 1, 0) <=
               1e-12,
           "advection of (x, 0) not 2x away from the seam");
  });

  h.run("fields.laplacian", [&] {
    auto lap = laplacian(fill(grid32, [](double, double y) { return y * y; }));
    expect(max_err(lap, [](double, double) { return 2.0; }) <= 1e-11,
           "laplacian of y^2 not 2");
  });

  h.run("fields.csv_roundtrip", [&] {
    ScalarField2D f = fill(grid24, [](double x, double y) {
      return std::sin(5.0 * x + 1.0) * (0.5 + y);
    });
    std::ostringstream os;
    write_field_csv(os, f, "probe", 0.5);
    std::istringstream is(os.str());
    FieldRecord rec = read_field_csv(is);
    expect(rec.name == "probe" && rec.t == 0.5, "csv header mangled");
    for (int j = 0; j < grid24->ny(); ++j)
      for (int i = 0; i < grid24->nx(); ++i)
        expect(rec.field(i, j) == f(i, j), "csv values not bit-identical");
  });

  h.run("solver.pressure_of", [&] {
    FluidParams p = params;
    p.cs = 10.0;
    ScalarField2D rho(grid24, 1.01);
    expect_near(pressure_of(rho, p)(0, 0), 1.0, 1e-12, "p = cs^2 (rho - rho0)");
  });

  h.run("solver.eps_rho_of", [&] {
    ScalarField2D rho(grid24, 1.02);
    expect_near(eps_rho_of(rho, params)(0, 0), 0.02, 1e-12, "eps_rho");
  });

  h.run("solver.rhs_fixed_point", [&] {
    FluidParams p = params;
    p.fx = bench_body_force(bench, params)[0];
    SimState state = as_initial_state(bench, grid24, p);
    Rates r = rhs(state, p);
    double m = 0.0;
    for (int j = 1; j < grid24->ny() - 1; ++j)
      for (int i = 0; i < grid24->nx(); ++i)
        m = std::max({m, std::abs(r.dvel.ux(i, j)), std::abs(r.dvel.uy(i, j))});
    expect(m <= 1e-10, "Poiseuille state is not a discrete fixed point");
    expect(r.drho.max_abs() == 0.0, "drho not zero on the fixed point");
  });

  h.run("solver.stable_dt", [&] {
    FluidParams p = params;
    p.cs = 10.0;
    auto g = make_grid(64, 65, 1.0, 1.0);
    SimState rest(g, p.rho0);
    expect_near(stable_dt(rest, p, 0.5), 0.5 / 32768.0, 1e-18,
                "viscous dt limit");
  });

  h.run("solver.step_rest", [&] {
    SimState rest(grid24, params.rho0);
    SimState next = step(rest, params, 1e-4);
    expect(!next.diverged && next.vel.ux.max_abs() == 0.0 &&
               next.vel.uy.max_abs() == 0.0,
           "rest state did not stay at rest");
  });

  h.run("solver.run_forward", [&] {
    FluidParams p = params;
    p.fx = bench_body_force(bench, params)[0];
    SimState state = as_initial_state(bench, grid24, p);
    RunOptions opts;
    opts.t_end = 0.05;
    opts.sample_every = 10;
    opts.reference = sampled_profile(bench, grid24);
    Trajectory traj = run_forward(state, p, opts);
    expect(!traj.truncated_by_divergence, "steady run diverged");
    for (const TrajectorySample& s : traj.samples)
      expect(s.d.l2_distance_to_reference <= 1e-6,
             "steady run drifted off the profile");
  });

  h.run("solver.dudt_norm", [&] {
    Trajectory traj;
    traj.snapshots.push_back(
        {0, 0.0, VectorField2D(grid24), ScalarField2D(grid24, 1.0)});
    traj.snapshots.push_back(
        {1, 0.5, VectorField2D(grid24), ScalarField2D(grid24, 1.0)});
    expect(dudt_norm(traj, 1) == 0.0, "steady snapshot pair has nonzero dudt");
  });

  h.run("bench.poiseuille_profile", [&] {
    expect_near(poiseuille_profile(0.5, 1.0, -2.0, 1.0), 0.25, 1e-15, "peak");
    expect_near(poiseuille_profile(0.25, 1.0, -2.0, 1.0), 0.1875, 1e-15,
                "quarter height");
    expect(poiseuille_profile(0.0, 1.0, -2.0, 1.0) == 0.0, "no-slip");
  });

  h.run("bench.steady_residual", [&] {
    auto g = make_grid(64, 64, 1.0, 1.0);
    SimState state = as_initial_state(bench, g, params);
    ScalarField2D p0(g);
    auto rep =
        steady_residual(state.vel, state.rho, p0, params, 0.0, 0.0, bench.px);
    expect(rep.pass && rep.max_norm <= 1e-10, "benchmark residual too large");
    auto doubled = steady_residual(state.vel, state.rho, p0, params, 0.0, 0.0,
                                   2.0 * bench.px);
    expect_near(doubled.max_norm, 2.0, 1e-9, "unbalanced gradient residual");
  });

  h.run("bench.as_initial_state", [&] {
    SimState state = as_initial_state(bench, grid24, params);
    for (int i = 0; i < grid24->nx(); ++i)
      expect(state.vel.ux(i, 0) == 0.0 &&
                 state.vel.ux(i, grid24->ny() - 1) == 0.0,
             "wall rows not zero");
    expect(state.vel.ux(3, 5) == bench.profile(grid24->y(5)),
           "profile sampling mismatch");
  });

  h.run("reversal.reciprocal_map", [&] {
    const TimeMap m = reciprocal_map();
    expect(m.map(2.0) == 0.5, "g(2) != 1/2");
    expect_near(m.map(m.inverse(7.0)), 7.0, 1e-12, "round trip");
    expect_near(m.d_inverse(10.0), -0.01, 1e-15, "dg_inv(10)");
  });

  h.run("reversal.validate_map", [&] {
    expect(validate_map(reciprocal_map(), 64).pass, "reciprocal map rejected");
    TimeMap increasing = reciprocal_map();
    increasing.name = "identity";
    increasing.g = [](double t) { return t; };
    increasing.g_inv = [](double tp) { return tp; };
    increasing.dg_inv = [](double) { return 1.0; };
    expect(!validate_map(increasing, 64).pass, "increasing map accepted");
  });

  h.run("reversal.chain_rule_factor", [&] {
    const TimeMap m = reciprocal_map();
    expect(chain_rule_factor(m, 1.0) == -1.0, "factor at 1");
    expect(chain_rule_factor(m, 2.0) == -0.25, "factor at 2");
    const double tp = 3.7, hstep = 1e-4 * tp;
    const auto u_rev = [&](double t_prime) {
      return std::exp(-m.inverse(t_prime));
    };
    const double fd = (u_rev(tp + hstep) - u_rev(tp - hstep)) / (2.0 * hstep);
    const double product =
        -std::exp(-m.inverse(tp)) * chain_rule_factor(m, tp);
    expect(std::abs(fd - product) <= 1e-6 * std::abs(product),
           "chain rule mismatch");
  });

  h.run("reversal.decomposition_ode_rhs", [&] {
    expect(decomposition_ode_rhs(1.0, 2.0, -8.0) == 0.0, "fixed point");
    expect_near(decomposition_ode_rhs(0.0, 1.0, -8.0), -8.0, 1e-15, "j=0");
    expect_near(decomposition_ode_rhs(0.5, 2.0, -8.0), -1.0, 1e-15, "j=1/2");
  });

  h.run("reversal.solve_decomposition", [&] {
    ReversedPoiseuilleProblem prob = reversed_poiseuille(bench, 33, 2);
    auto fixed = solve_decomposition(prob, 1.0, 1.0, 100.0, 200);
    for (const auto& row : fixed.j_table)
      for (double j : row) expect(j == 1.0, "j0=1 not a fixed point");

    ReversedPoiseuilleProblem mid;
    mid.mu = 1.0;
    mid.h = 1.0;
    mid.px = -2.0;
    mid.y = {0.5};
    mid.u0 = {0.25};
    auto sol = solve_decomposition(mid, 0.9, 1.0, 1e4, 20000);
    const double expected = 1.0 - 0.1 * std::exp(8.0);
    expect(std::abs(sol.j_inf_numeric[0] - expected) <=
               1e-6 * std::abs(expected),
           "closed-form disagreement at y = 1/2");
  });

  h.run("reversal.steady_limit_from_sample", [&] {
    expect(steady_limit_from_sample(0.25, 0.25, -8.0, 1.0) == 0.25, "zero variation");
    expect_near(steady_limit_from_sample(0.25, 0.25 + std::exp(-8.0), -8.0, 1.0), 1.25,
                1e-13, "variation e^{-8}");
  });

  h.run("reversal.check_little_o", [&] {
    std::vector<std::pair<double, double>> decaying, flat;
    for (int k = 1; k <= 10; ++k) {
      decaying.emplace_back(k, 1.0 / (k * k * k));
      flat.emplace_back(k, double(k) * k);
    }
    const auto env = [](double tp) { return tp * tp; };
    expect(check_little_o(decaying, env).pass, "1/t'^3 vs t'^2 must pass");
    expect(!check_little_o(flat, env).pass, "t'^2 vs t'^2 must fail");
  });

  h.run("reversal.check_big_O", [&] {
    std::vector<std::pair<double, double>> matched, constant;
    for (int k = 1; k <= 10; ++k) {
      const double tbar = 1.0 / k;
      matched.emplace_back(tbar, std::exp(-8.0 / tbar));
      constant.emplace_back(tbar, 1.0);
    }
    const auto env = [](double tbar) { return std::exp(-8.0 / tbar); };
    expect(check_big_O(matched, env).pass, "matched variation must pass");
    expect(!check_big_O(constant, env).pass, "constant variation must fail");
  });

  h.run("admissibility.generate_initial", [&] {
    SimState a = generate_initial({1.0, 0.0, 2}, grid24, params, bench);
    SimState b = as_initial_state(bench, grid24, params);
    for (int j = 0; j < grid24->ny(); ++j)
      for (int i = 0; i < grid24->nx(); ++i)
        expect(a.vel.ux(i, j) == b.vel.ux(i, j),
               "alpha=1, eps=0 differs from the benchmark state");
  });

  h.run("admissibility.classify", [&] {
    ClassifyConfig cfg;
    cfg.run.t_end = 0.3;
    auto r = classify({1.0, 0.0, 1}, grid24, params, bench, cfg);
    expect(r.verdict == Verdict::admissible, "steady start must be admissible");
  });

  h.run("admissibility.sweep", [&] {
    ClassifyConfig cfg;
    cfg.run.t_end = 0.3;
    SweepAxes axes;  // 1x1x1 reduces to classify
    auto set = sweep(axes, grid24, params, bench, cfg);
    expect(set.complete && set.points.size() == 1, "1x1x1 sweep shape");
    expect(set.points[0].verdict == Verdict::admissible, "sweep verdict");
  });

  h.run("admissibility.continuity_probe", [&] {
    ClassifyConfig cfg;
    cfg.run.t_end = 0.02;
    const double r = continuity_probe({1.0, 0.0, 2}, 1e-3, grid24, params,
                                      bench, cfg);
    expect(std::isfinite(r) && r > 0.0, "continuity ratio not finite");
  });

  h.run("config.parse_emit", [&] {
    const RunConfig defaults;
    expect(emit_config(parse_config("")) == emit_config(defaults),
           "empty config is not the defaults");
    const std::string canonical = emit_config(defaults);
    expect(emit_config(parse_config(canonical)) == canonical,
           "canonical config does not round-trip");
    try {
      parse_config("fluid.mu=-1\n");
      expect(false, "negative viscosity accepted");
    } catch (const ConfigError& e) {
      expect(std::string(e.what()).find("fluid.mu") != std::string::npos,
             "error does not name the key");
    }
  });

  return h.results;
}

}  // namespace wellpose::cli
