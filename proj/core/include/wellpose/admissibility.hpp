#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "wellpose/time_reversal.hpp"

namespace wellpose {

/// Parameter vector (a1, ..., an) = (alpha, eps, k): Poiseuille amplitude
/// multiplier, perturbation amplitude, and integer streamwise wavenumber.
struct InitialDataSpec {
  double alpha = 1.0;
  double eps = 0.0;
  int k = 1;
};

/// vel_x = alpha profile(y) + eps sin(2 pi k x / lx) y (h - y) 4/h^2,
/// vel_y = 0, rho = rho0. The envelope enforces no-slip exactly and peaks
/// at 1 on the centerline. Throws when grid and benchmark heights differ
/// or k < 0.
SimState generate_initial(const InitialDataSpec& spec, GridPtr grid,
                          const FluidParams& params,
                          const SteadyBenchmark& bench);

enum class Verdict { admissible, inadmissible, inconclusive };
const char* to_string(Verdict v);

struct ClassifyConfig {
  RunOptions run;
  double tol_steady = 1e-4;       // relative to the reference velocity scale
  double energy_ratio_max = 10.0;
  double little_o_factor = 0.1;
  /// dudt samples below little_o_floor x U_ref x mu/(rho0 h^2) are treated
  /// as an already-steady trajectory (which satisfies any little-o bound).
  double little_o_floor = 1e-8;
};

struct ParamPointResult {
  InitialDataSpec spec;
  Verdict verdict = Verdict::inconclusive;
  double final_l2 = kNaN;
  double energy_ratio = kNaN;
  bool diverged = false;
  bool little_o_pass = false;
  double seconds = 0.0;  // wall clock; excluded from deterministic output
};

struct ClassifyRun {
  ParamPointResult result;
  SimState final_state;
};

/// Forward-simulation classification: runs to t_end with the alpha-scaled
/// profile as reference and alpha-scaled benchmark forcing.
///   inadmissible: diverged or energy ratio bound exceeded
///   admissible:   final l2 distance within tolerance and the little-o
///                 check (dudt vs t'^2 through the reciprocal map, sampled
///                 on the first decade) passes
///   inconclusive: otherwise (distance unmet at t_end, or certification
///                 data insufficient)
ClassifyRun classify_run(const InitialDataSpec& spec, GridPtr grid,
                         const FluidParams& params, const SteadyBenchmark& bench,
                         const ClassifyConfig& cfg);
ParamPointResult classify(const InitialDataSpec& spec, GridPtr grid,
                          const FluidParams& params, const SteadyBenchmark& bench,
                          const ClassifyConfig& cfg);

struct SweepAxes {
  std::vector<double> alpha{1.0};
  std::vector<double> eps{0.0};
  std::vector<int> k{1};

  std::size_t size() const { return alpha.size() * eps.size() * k.size(); }
  /// Linear index order: alpha-major, then eps, then k.
  InitialDataSpec at(std::size_t idx) const;
};

struct SweepHooks {
  std::function<void(std::size_t, const ParamPointResult&)> on_point;
  std::function<bool()> should_stop;  // cooperative interruption
  /// Results keyed by linear index that are reused instead of recomputed
  /// (resumption from a marker file).
  const std::map<std::size_t, ParamPointResult>* precomputed = nullptr;
};

struct AdmissibleSet {
  SweepAxes axes;
  std::vector<ParamPointResult> points;  // grid order; covers axes exactly once
  bool complete = true;
  std::vector<std::size_t> missing;  // indices not classified (interrupted)
};

/// Classifies every point of the rectangular grid. Points are independent;
/// workers > 1 fans out across threads, and results are assembled in grid
/// order so the output is scheduler-independent.
AdmissibleSet sweep(const SweepAxes& axes, GridPtr grid, const FluidParams& params,
                    const SteadyBenchmark& bench, const ClassifyConfig& cfg,
                    unsigned workers = 1, const SweepHooks& hooks = {});

/// Numerical continuity witness: classifies spec and spec with eps + delta,
/// returning ||final velocity difference||_rms / delta. Requires delta > 0
/// and an admissible base point (throws std::invalid_argument otherwise);
/// a diverging pair yields +infinity.
double continuity_probe(const InitialDataSpec& spec, double delta, GridPtr grid,
                        const FluidParams& params, const SteadyBenchmark& bench,
                        const ClassifyConfig& cfg);

/// CSV columns:
/// alpha,eps,k,verdict,final_l2,energy_ratio,diverged,little_o_pass,seconds
/// With emit_timing false the seconds column is written as 0 so that sweep
/// outputs are byte-for-byte reproducible.
void write_sweep_csv(std::ostream& os, const AdmissibleSet& set, bool emit_timing);

/// Structured summary: config echoed verbatim, verdict counts, and per-axis
/// verdict tallies.
std::string sweep_summary_json(const AdmissibleSet& set,
                               const std::string& config_echo);

}  // namespace wellpose
