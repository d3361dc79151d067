#include "wellpose/admissibility.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "wellpose/field_io.hpp"
#include "wellpose/stencil.hpp"

namespace wellpose {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::admissible: return "admissible";
    case Verdict::inadmissible: return "inadmissible";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

SimState generate_initial(const InitialDataSpec& spec, GridPtr grid,
                          const FluidParams& params,
                          const SteadyBenchmark& bench) {
  if (spec.k < 0)
    throw std::invalid_argument("generate_initial: k must be >= 0");
  if (std::abs(grid->ly() - bench.h) > 1e-12 * std::max(1.0, bench.h))
    throw std::invalid_argument(
        "generate_initial: grid.ly does not match benchmark height h");

  SimState state(grid, params.rho0);
  const double h = bench.h;
  const double envelope_norm = 4.0 / (h * h);
  const double kx = 2.0 * std::numbers::pi * spec.k / grid->lx();
  for (int j = 1; j < grid->ny() - 1; ++j) {
    const double y = grid->y(j);
    const double base = spec.alpha * bench.profile(y);
    const double env = y * (h - y) * envelope_norm;
    for (int i = 0; i < grid->nx(); ++i)
      state.vel.ux(i, j) = base + spec.eps * std::sin(kx * grid->x(i)) * env;
  }
  // Wall rows stay exactly zero: no-slip holds on stored values.
  return state;
}

namespace {

double rms_velocity_difference(const VectorField2D& a, const VectorField2D& b) {
  require_same_grid(a, b);
  const Grid2D& g = a.grid();
  double acc = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    const double wj = quadrature_weight_y(g, j);
    double row = 0.0;
    for (int i = 0; i < g.nx(); ++i) {
      const double du = a.ux(i, j) - b.ux(i, j);
      const double dv = a.uy(i, j) - b.uy(i, j);
      row += du * du + dv * dv;
    }
    acc += row * wj;
  }
  return std::sqrt(acc * g.dx() / (g.lx() * g.ly()));
}

}  // namespace

ClassifyRun classify_run(const InitialDataSpec& spec, GridPtr grid,
                         const FluidParams& params, const SteadyBenchmark& bench,
                         const ClassifyConfig& cfg) {
  const auto clock_start = std::chrono::steady_clock::now();

  SimState initial = generate_initial(spec, grid, params, bench);

  FluidParams run_params = params;
  const std::array<double, 2> f = bench_body_force(bench, params, spec.alpha);
  run_params.fx += f[0];
  run_params.fy += f[1];

  RunOptions run = cfg.run;
  run.reference = sampled_profile(bench, grid, spec.alpha);
  const double peak_unit = sampled_profile(bench, grid, 1.0).ux.max_abs();
  const double u_ref = std::max({std::abs(spec.alpha) * peak_unit, peak_unit,
                                 std::abs(spec.eps)});

  ClassifyRun out{ParamPointResult{}, SimState(grid, params.rho0)};
  Trajectory traj = run_forward(initial, run_params, run, &out.final_state);

  ParamPointResult& res = out.result;
  res.spec = spec;
  res.diverged = traj.truncated_by_divergence;
  res.final_l2 = traj.samples.back().d.l2_distance_to_reference;

  const double ke0 = traj.samples.front().d.kinetic_energy;
  double ke_max = 0.0;
  for (const TrajectorySample& s : traj.samples)
    if (std::isfinite(s.d.kinetic_energy))
      ke_max = std::max(ke_max, s.d.kinetic_energy);
  res.energy_ratio = ke0 > 0.0 ? ke_max / ke0 : (ke_max > 0.0 ? kNaN : 1.0);
  const bool energy_ok =
      !res.diverged && (ke0 > 0.0 ? res.energy_ratio <= cfg.energy_ratio_max
                                  : true);

  // Little-o certificate (reversed-time decay condition): dudt samples over
  // the first decade [t_s, 10 t_s], mapped to t' = 1/t and compared against
  // the t'^2 envelope. A trajectory whose dudt never rises above the steady
  // floor satisfies the condition trivially.
  res.little_o_pass = false;
  if (!res.diverged && traj.samples.size() >= 2) {
    const double t_s = traj.samples[1].t;
    std::vector<std::pair<double, double>> window;  // (t', dudt), t' ascending
    for (std::size_t k = traj.samples.size(); k-- > 1;) {
      const double t = traj.samples[k].t;
      if (t > 10.0 * t_s * (1.0 + 1e-12)) continue;
      if (t < t_s) break;
      window.emplace_back(1.0 / t, traj.samples[k].d.max_dudt_norm);
    }
    const double viscous_rate =
        params.mu / (params.rho0 * bench.h * bench.h);
    const double floor = cfg.little_o_floor * u_ref * viscous_rate;
    double peak_dudt = 0.0;
    for (const auto& [tp, v] : window) peak_dudt = std::max(peak_dudt, v);
    if (!window.empty() && peak_dudt <= floor) {
      res.little_o_pass = true;
    } else if (window.size() >= 8) {
      const RatioCheck rc =
          check_little_o(window, [](double tp) { return tp * tp; },
                         cfg.little_o_factor);
      res.little_o_pass = rc.pass;
    }
  }

  if (res.diverged || !energy_ok) {
    res.verdict = Verdict::inadmissible;
  } else {
    const double tol_abs = cfg.tol_steady * u_ref;
    const bool distance_ok = res.final_l2 <= tol_abs;
    res.verdict = (distance_ok && res.little_o_pass) ? Verdict::admissible
                                                     : Verdict::inconclusive;
  }

  res.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    clock_start)
          .count();
  return out;
}

ParamPointResult classify(const InitialDataSpec& spec, GridPtr grid,
                          const FluidParams& params, const SteadyBenchmark& bench,
                          const ClassifyConfig& cfg) {
  return classify_run(spec, grid, params, bench, cfg).result;
}

InitialDataSpec SweepAxes::at(std::size_t idx) const {
  const std::size_t nk = k.size();
  const std::size_t ne = eps.size();
  InitialDataSpec spec;
  spec.k = k[idx % nk];
  spec.eps = eps[(idx / nk) % ne];
  spec.alpha = alpha[idx / (nk * ne)];
  return spec;
}

AdmissibleSet sweep(const SweepAxes& axes, GridPtr grid,
                    const FluidParams& params, const SteadyBenchmark& bench,
                    const ClassifyConfig& cfg, unsigned workers,
                    const SweepHooks& hooks) {
  if (axes.alpha.empty() || axes.eps.empty() || axes.k.empty())
    throw std::invalid_argument("sweep: every axis needs at least one value");

  const std::size_t n = axes.size();
  AdmissibleSet set;
  set.axes = axes;
  set.points.assign(n, ParamPointResult{});

  std::vector<std::atomic<char>> done(n);
  if (hooks.precomputed) {
    for (const auto& [idx, res] : *hooks.precomputed) {
      if (idx >= n) continue;
      set.points[idx] = res;
      done[idx] = 1;
    }
  }

  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> stop{false};
  std::mutex hook_mutex;

  auto work = [&]() {
    while (!stop.load(std::memory_order_relaxed)) {
      if (hooks.should_stop && hooks.should_stop()) {
        stop.store(true, std::memory_order_relaxed);
        return;
      }
      const std::size_t idx = cursor.fetch_add(1);
      if (idx >= n) return;
      if (done[idx]) continue;
      const ParamPointResult res =
          classify(axes.at(idx), grid, params, bench, cfg);
      set.points[idx] = res;
      done[idx] = 1;
      if (hooks.on_point) {
        std::lock_guard<std::mutex> lock(hook_mutex);
        hooks.on_point(idx, res);
      }
    }
  };

  const unsigned n_workers =
      std::max(1u, std::min<unsigned>(workers, unsigned(n)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& th : pool) th.join();

  for (std::size_t idx = 0; idx < n; ++idx)
    if (!done[idx]) set.missing.push_back(idx);
  set.complete = set.missing.empty();
  return set;
}

double continuity_probe(const InitialDataSpec& spec, double delta, GridPtr grid,
                        const FluidParams& params, const SteadyBenchmark& bench,
                        const ClassifyConfig& cfg) {
  if (!(delta > 0.0))
    throw std::invalid_argument("continuity_probe: delta must be > 0");

  const ClassifyRun base = classify_run(spec, grid, params, bench, cfg);
  if (base.result.diverged)
    return std::numeric_limits<double>::infinity();
  if (base.result.verdict != Verdict::admissible)
    throw std::invalid_argument("continuity_probe: base point not admissible");

  InitialDataSpec shifted = spec;
  shifted.eps += delta;
  const ClassifyRun other = classify_run(shifted, grid, params, bench, cfg);
  if (other.result.diverged)
    return std::numeric_limits<double>::infinity();

  return rms_velocity_difference(base.final_state.vel, other.final_state.vel) /
         delta;
}

void write_sweep_csv(std::ostream& os, const AdmissibleSet& set,
                     bool emit_timing) {
  os << "alpha,eps,k,verdict,final_l2,energy_ratio,diverged,little_o_pass,"
        "seconds\n";
  for (const ParamPointResult& r : set.points) {
    os << fmt17(r.spec.alpha) << ',' << fmt17(r.spec.eps) << ',' << r.spec.k
       << ',' << to_string(r.verdict) << ',' << fmt17(r.final_l2) << ','
       << fmt17(r.energy_ratio) << ',' << (r.diverged ? 1 : 0) << ','
       << (r.little_o_pass ? 1 : 0) << ','
       << (emit_timing ? fmt17(r.seconds) : std::string("0")) << '\n';
  }
}

std::string sweep_summary_json(const AdmissibleSet& set,
                               const std::string& config_echo) {
  using json = nlohmann::ordered_json;
  json j;
  j["config"] = config_echo;
  j["axes"]["alpha"] = set.axes.alpha;
  j["axes"]["eps"] = set.axes.eps;
  j["axes"]["k"] = set.axes.k;
  j["complete"] = set.complete;

  std::size_t n_adm = 0, n_inadm = 0, n_inc = 0;
  for (const ParamPointResult& r : set.points) {
    if (r.verdict == Verdict::admissible) ++n_adm;
    else if (r.verdict == Verdict::inadmissible) ++n_inadm;
    else ++n_inc;
  }
  j["counts"]["admissible"] = n_adm;
  j["counts"]["inadmissible"] = n_inadm;
  j["counts"]["inconclusive"] = n_inc;

  // Per-axis verdict tallies; the admissible boundary per axis is read off
  // the tallies directly.
  auto tally_axis = [&](const std::string& name, auto values,
                        auto value_of_spec) {
    json arr = json::array();
    for (const auto& v : values) {
      std::size_t adm = 0, inadm = 0, inc = 0;
      for (const ParamPointResult& r : set.points) {
        if (value_of_spec(r.spec) != v) continue;
        if (r.verdict == Verdict::admissible) ++adm;
        else if (r.verdict == Verdict::inadmissible) ++inadm;
        else ++inc;
      }
      json row;
      row["value"] = v;
      row["admissible"] = adm;
      row["inadmissible"] = inadm;
      row["inconclusive"] = inc;
      arr.push_back(row);
    }
    j["axis_summary"][name] = arr;
  };
  tally_axis("alpha", set.axes.alpha,
             [](const InitialDataSpec& s) { return s.alpha; });
  tally_axis("eps", set.axes.eps,
             [](const InitialDataSpec& s) { return s.eps; });
  tally_axis("k", set.axes.k, [](const InitialDataSpec& s) { return double(s.k); });

  return j.dump(2) + "\n";
}

}  // namespace wellpose
