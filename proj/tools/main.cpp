#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "checks.hpp"
#include "wellpose/config.hpp"
#include "wellpose/field_io.hpp"

namespace fs = std::filesystem;
using namespace wellpose;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCheckFailed = 2;
constexpr int kExitIo = 3;
constexpr int kExitInterrupted = 130;

std::atomic<bool> g_interrupted{false};

void handle_sigint(int) { g_interrupted.store(true); }

struct CliOptions {
  std::string config_path;
  std::string out_dir = "out";
  bool quiet = false;
};

RunConfig load_config(const CliOptions& opts) {
  if (opts.config_path.empty()) return RunConfig{};
  std::ifstream in(opts.config_path);
  if (!in) throw std::ios_base::failure("cannot open " + opts.config_path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

fs::path ensure_out_dir(const CliOptions& opts) {
  fs::path dir(opts.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  out << content;
  if (!out) throw std::ios_base::failure("short write to " + path.string());
}

// FNV-1a over the canonical config text; guards resume files against a
// config change between runs.
std::uint64_t config_hash(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

unsigned sweep_workers(std::size_t n_points) {
  unsigned workers = 0;
  if (const char* env = std::getenv("WELLPOSE_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end && *end == '\0' && parsed >= 0)
      workers = static_cast<unsigned>(parsed);
    else
      std::cerr << "wellpose: ignoring malformed WELLPOSE_THREADS='" << env
                << "'\n";
  }
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  return std::min<unsigned>(workers, std::max<std::size_t>(n_points, 1));
}

int cmd_bench(const RunConfig& cfg, const CliOptions& opts) {
  cfg.fluid.validate();
  const GridPtr grid = cfg.make_grid_ptr();
  const SteadyBenchmark bench = cfg.make_bench();
  const SimState state = as_initial_state(bench, grid, cfg.fluid);
  const ScalarField2D p_periodic(grid);

  const SteadyResidualReport rep =
      steady_residual(state.vel, state.rho, p_periodic, cfg.fluid, 0.0, 0.0,
                      bench.px, cfg.tol_residual);

  if (!opts.quiet) {
    std::cout << "steady benchmark '" << bench.name << "' on " << cfg.nx << "x"
              << cfg.ny << "\n"
              << "  residual max-norm : " << fmt17(rep.max_norm) << "\n"
              << "  residual l2-norm  : " << fmt17(rep.l2_norm) << "\n"
              << "  max |div u|       : " << fmt17(rep.max_div) << "\n"
              << "  tolerance         : " << fmt17(rep.tol) << "\n"
              << "  verdict           : " << (rep.pass ? "PASS" : "FAIL")
              << "\n";
  }
  std::cout << "bench name=" << bench.name << " max_norm=" << fmt17(rep.max_norm)
            << " l2_norm=" << fmt17(rep.l2_norm)
            << " max_div=" << fmt17(rep.max_div) << " tol=" << fmt17(rep.tol)
            << " pass=" << (rep.pass ? 1 : 0) << "\n";
  return rep.pass ? kExitOk : kExitCheckFailed;
}

int cmd_forward(const RunConfig& cfg, const CliOptions& opts) {
  cfg.fluid.validate();
  const GridPtr grid = cfg.make_grid_ptr();
  const SteadyBenchmark bench = cfg.make_bench();

  FluidParams params = cfg.fluid;
  const auto f = bench_body_force(bench, cfg.fluid, cfg.alpha);
  params.fx += f[0];
  params.fy += f[1];

  const InitialDataSpec spec{cfg.alpha, cfg.eps, cfg.k};
  const SimState initial = generate_initial(spec, grid, cfg.fluid, bench);

  RunOptions run;
  run.t_end = cfg.t_end;
  run.cfl = cfg.cfl;
  run.sample_every = cfg.sample_every;
  run.snapshot_every = cfg.snapshot_every;
  run.blowup_ratio = cfg.blowup_ratio;
  run.freeze_dt = cfg.freeze_dt;
  run.reference = sampled_profile(bench, grid, cfg.alpha);

  const Trajectory traj = run_forward(initial, params, run);

  const fs::path dir = ensure_out_dir(opts);
  {
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    write_text_file(dir / "trajectory.csv", csv.str());
  }
  for (const TrajectorySnapshot& snap : traj.snapshots) {
    char suffix[32];
    std::snprintf(suffix, sizeof(suffix), "_%07ld.csv", snap.step);
    for (const auto& [name, field] :
         std::initializer_list<std::pair<const char*, const ScalarField2D&>>{
             {"ux", snap.vel.ux}, {"uy", snap.vel.uy}, {"rho", snap.rho}}) {
      std::ostringstream os;
      write_field_csv(os, field, name, snap.t);
      write_text_file(dir / (std::string("snapshot_") + name + suffix),
                      os.str());
    }
  }

  const TrajectorySample& last = traj.samples.back();
  if (!opts.quiet) {
    std::cout << "forward run: " << traj.samples.size() << " samples to t="
              << fmt17(last.t) << "\n"
              << "  final l2 distance : "
              << fmt17(last.d.l2_distance_to_reference) << "\n"
              << "  max |eps_rho|     : " << fmt17(last.d.max_abs_eps_rho)
              << "\n"
              << "  identity residual : "
              << fmt17(traj.continuity_residual_integral)
              << " (divergence integral "
              << fmt17(traj.divergence_norm_integral) << ")\n"
              << "  diverged          : "
              << (traj.truncated_by_divergence ? "yes" : "no") << "\n"
              << "  wrote " << (dir / "trajectory.csv").string() << " and "
              << 3 * traj.snapshots.size() << " snapshot files\n";
  }
  if (traj.truncated_by_divergence)
    std::cerr << "wellpose: forward run diverged at t=" << fmt17(last.t)
              << " (trajectory truncated)\n";
  return kExitOk;
}

int cmd_reverse(const RunConfig& cfg, const CliOptions& opts) {
  const SteadyBenchmark bench = cfg.make_bench();
  const ReversedPoiseuilleProblem prob =
      reversed_poiseuille(bench, cfg.ny, cfg.rev_wall_margin);
  const DecompositionSolution sol = solve_decomposition(
      prob, cfg.rev_j0, cfg.rev_t0, cfg.rev_t_end, cfg.rev_n_steps);

  std::ostringstream csv;
  csv << "y,c_y,j_t0,j_inf_numeric,j_inf_closed_form,rel_diff\n";
  bool all_ok = true;
  double worst = 0.0;
  for (std::size_t s = 0; s < sol.y.size(); ++s) {
    const double rel =
        std::abs(sol.j_inf_numeric[s] - sol.j_inf_closed_form[s]) /
        std::abs(sol.j_inf_closed_form[s]);
    if (!sol.finite_ok[s] || !(rel <= cfg.rev_tol)) all_ok = false;
    worst = std::max(worst, rel);
    csv << fmt17(sol.y[s]) << ',' << fmt17(sol.c[s]) << ',' << fmt17(sol.j0)
        << ',' << fmt17(sol.j_inf_numeric[s]) << ','
        << fmt17(sol.j_inf_closed_form[s]) << ',' << fmt17(rel) << '\n';
  }

  const fs::path dir = ensure_out_dir(opts);
  write_text_file(dir / "reverse.csv", csv.str());

  if (!opts.quiet) {
    std::cout << "reversed decomposition: " << sol.y.size()
              << " wall-offset samples, t' in [" << fmt17(cfg.rev_t0) << ", "
              << fmt17(cfg.rev_t_end) << "]\n"
              << "  worst closed-form deviation: " << fmt17(worst)
              << " (tolerance " << fmt17(cfg.rev_tol) << ")\n"
              << "  verdict: " << (all_ok ? "PASS" : "FAIL") << "\n"
              << "  wrote " << (dir / "reverse.csv").string() << "\n";
  }
  return all_ok ? kExitOk : kExitCheckFailed;
}

int cmd_sweep(const RunConfig& cfg, const CliOptions& opts) {
  cfg.fluid.validate();
  const GridPtr grid = cfg.make_grid_ptr();
  const SteadyBenchmark bench = cfg.make_bench();
  const SweepAxes axes = cfg.make_sweep_axes();
  const ClassifyConfig classify_cfg = cfg.make_classify_config();
  const std::string config_echo = emit_config(cfg);
  const std::uint64_t hash = config_hash(config_echo);

  const fs::path dir = ensure_out_dir(opts);
  const fs::path marker_path = dir / "sweep_resume.txt";

  // Completed points from a previous interrupted run with the same config.
  std::map<std::size_t, ParamPointResult> bank;
  if (fs::exists(marker_path)) {
    std::ifstream marker(marker_path);
    std::string line;
    bool hash_ok = false;
    while (std::getline(marker, line)) {
      if (line.rfind("# config_hash=", 0) == 0) {
        hash_ok = line == "# config_hash=" + std::to_string(hash);
        continue;
      }
      if (line.empty() || line[0] == '#' || !hash_ok) continue;
      std::istringstream row(line);
      std::string cell;
      auto next = [&]() {
        if (!std::getline(row, cell, ',')) throw std::runtime_error("");
        return cell;
      };
      try {
        ParamPointResult r;
        const std::size_t idx = std::stoul(next());
        r.spec.alpha = std::stod(next());
        r.spec.eps = std::stod(next());
        r.spec.k = std::stoi(next());
        const std::string verdict = next();
        r.verdict = verdict == "admissible"    ? Verdict::admissible
                    : verdict == "inadmissible" ? Verdict::inadmissible
                                                : Verdict::inconclusive;
        r.final_l2 = std::stod(next());
        r.energy_ratio = std::stod(next());
        r.diverged = next() == "1";
        r.little_o_pass = next() == "1";
        r.seconds = std::stod(next());
        bank[idx] = r;
      } catch (const std::exception&) {
        // ignore damaged rows; they are recomputed
      }
    }
    if (!bank.empty() && !opts.quiet)
      std::cout << "resuming sweep: " << bank.size() << " of " << axes.size()
                << " points already classified\n";
  }

  std::ofstream marker(marker_path, std::ios::app);
  if (!marker) throw std::ios_base::failure("cannot write " +
                                            marker_path.string());
  if (bank.empty()) {
    marker << "# wellpose sweep resume\n";
    marker << "# config_hash=" << hash << "\n";
    marker.flush();
  }

  std::mutex marker_mutex;
  SweepHooks hooks;
  hooks.precomputed = &bank;
  hooks.should_stop = []() { return g_interrupted.load(); };
  std::atomic<std::size_t> done_count{bank.size()};
  hooks.on_point = [&](std::size_t idx, const ParamPointResult& r) {
    std::lock_guard<std::mutex> lock(marker_mutex);
    marker << idx << ',' << fmt17(r.spec.alpha) << ',' << fmt17(r.spec.eps)
           << ',' << r.spec.k << ',' << to_string(r.verdict) << ','
           << fmt17(r.final_l2) << ',' << fmt17(r.energy_ratio) << ','
           << (r.diverged ? 1 : 0) << ',' << (r.little_o_pass ? 1 : 0) << ','
           << fmt17(r.seconds) << '\n';
    marker.flush();
    const std::size_t n = ++done_count;
    if (!opts.quiet)
      std::cout << "  [" << n << "/" << axes.size() << "] alpha="
                << r.spec.alpha << " eps=" << r.spec.eps << " k=" << r.spec.k
                << " -> " << to_string(r.verdict) << "\n";
  };

  const unsigned workers = sweep_workers(axes.size());
  if (!opts.quiet)
    std::cout << "sweep over " << axes.size() << " points with " << workers
              << " worker(s)\n";

  const AdmissibleSet set =
      sweep(axes, grid, cfg.fluid, bench, classify_cfg, workers, hooks);

  if (!set.complete) {
    std::cerr << "wellpose: sweep interrupted with " << set.missing.size()
              << " points left; rerun to resume from " << marker_path.string()
              << "\n";
    return kExitInterrupted;
  }

  {
    std::ostringstream csv;
    write_sweep_csv(csv, set, cfg.sweep_emit_timing);
    write_text_file(dir / "sweep.csv", csv.str());
  }
  write_text_file(dir / "sweep_summary.json",
                  sweep_summary_json(set, config_echo));
  marker.close();
  fs::remove(marker_path);

  if (!opts.quiet) {
    std::size_t adm = 0;
    for (const ParamPointResult& r : set.points)
      adm += r.verdict == Verdict::admissible;
    std::cout << "sweep complete: " << adm << "/" << set.points.size()
              << " admissible\n"
              << "  wrote " << (dir / "sweep.csv").string() << " and "
              << (dir / "sweep_summary.json").string() << "\n";
  }
  return kExitOk;
}

int cmd_check(const CliOptions& opts) {
  const auto outcomes = cli::run_self_checks();
  std::size_t failed = 0;
  for (const cli::CheckOutcome& c : outcomes) {
    if (c.pass) {
      std::cout << "PASS " << c.name << "\n";
    } else {
      ++failed;
      std::cout << "FAIL " << c.name << "  (" << c.detail << ")\n";
    }
  }
  if (!opts.quiet)
    std::cout << (outcomes.size() - failed) << "/" << outcomes.size()
              << " checks passed\n";
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, handle_sigint);

  CLI::App app{
      "wellpose: weakly-compressible channel-flow toolkit for probing "
      "well-posedness of initial data by time reversal"};
  app.require_subcommand(0, 1);

  CliOptions opts;
  bool emit_config_only = false;
  app.add_option("--config", opts.config_path,
                 "configuration file (key=value lines)");
  app.add_option("--out", opts.out_dir, "output directory (default: out)");
  app.add_flag("--quiet", opts.quiet, "suppress human-readable progress");
  app.add_flag("--emit-config", emit_config_only,
               "print the canonical configuration and exit");
  app.footer(config_help());

  auto* bench_cmd =
      app.add_subcommand("bench", "evaluate the steady benchmark residual");
  auto* forward_cmd = app.add_subcommand(
      "forward", "run one forward simulation; writes trajectory and snapshots");
  auto* reverse_cmd = app.add_subcommand(
      "reverse", "solve the reversed-time decomposition and compare closed "
                 "forms");
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "classify the initial-data parameter grid (resumable)");
  auto* check_cmd = app.add_subcommand(
      "check", "run the built-in invariant suite on a small grid");
  for (CLI::App* sub : {bench_cmd, forward_cmd, reverse_cmd, sweep_cmd,
                        check_cmd})
    sub->fallthrough();  // --config/--out/--quiet may follow the subcommand

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    const RunConfig cfg = load_config(opts);
    if (emit_config_only) {
      std::cout << emit_config(cfg);
      return kExitOk;
    }
    if (bench_cmd->parsed()) return cmd_bench(cfg, opts);
    if (forward_cmd->parsed()) return cmd_forward(cfg, opts);
    if (reverse_cmd->parsed()) return cmd_reverse(cfg, opts);
    if (sweep_cmd->parsed()) return cmd_sweep(cfg, opts);
    if (check_cmd->parsed()) return cmd_check(opts);
    std::cerr << app.help();
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "wellpose: config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "wellpose: i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "wellpose: i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "wellpose: error: " << e.what() << "\n";
    return kExitUsage;
  }
}
