#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wellpose/steady_bench.hpp"

namespace wellpose {

/// Monotone-decreasing change of time variable t' = g(t), supplied as a
/// closed-form triple together with its open domain and image.
struct TimeMap {
  std::string name;
  std::function<double(double)> g;       // t  -> t'
  std::function<double(double)> g_inv;   // t' -> t
  std::function<double(double)> dg_inv;  // t' -> d g^-1 / dt'
  double t_lo = 0.0, t_hi = 0.0;         // open domain of g
  double img_lo = 0.0, img_hi = 0.0;     // open image of g (domain of g_inv)

  /// Domain-checked evaluation; throws std::domain_error outside the
  /// open interval.
  double map(double t) const;
  double inverse(double t_prime) const;
  double d_inverse(double t_prime) const;
};

/// g(t) = 1/t on (0, +inf); g^-1(t') = 1/t', d g^-1/dt' = -1/t'^2.
/// The map is not a bijection of all of R and is singular at 0, so the
/// domain is restricted to the positive half-line.
TimeMap reciprocal_map();

struct MapValidation {
  bool pass = false;
  std::string violation;  // empty on pass; names the first failed check
  double at = 0.0;        // sample point of the first violation
};

/// Checks dg/dt < 0 by finite differences, the round-trip identity
/// g_inv(g(t)) = t, and strict monotonicity of g on a log-spaced sample of
/// the domain. samples >= 2 required.
MapValidation validate_map(const TimeMap& m, int samples);

/// d g^-1 / dt' at t_prime; multiplying a forward-time derivative by this
/// factor yields the reversed-time derivative. Throws outside the image.
double chain_rule_factor(const TimeMap& m, double t_prime);

/// c(y) = 2 mu / (y^2 - y h); strictly negative inside the channel.
double decomposition_coefficient(double y, double mu, double h);

/// dj/dt' = c_y (1 - j) / t'^2. Throws std::domain_error for t' <= 0.
double decomposition_ode_rhs(double j, double t_prime, double c_y);

/// Reversed-time channel problem: initial profile equals the steady profile,
/// same driving pressure gradient, y sampled away from the walls.
struct ReversedPoiseuilleProblem {
  double mu = 1.0;
  double h = 1.0;
  double px = 0.0;          // reversed-problem pressure gradient
  std::vector<double> y;    // sample heights, wall margin excluded
  std::vector<double> u0;   // initial profile values at y
};

/// Samples the benchmark profile on ny equispaced nodes over [0, h],
/// excluding nodes within wall_margin_cells * dy of either wall (the
/// coefficient c(y) diverges there and the profile is zero anyway).
ReversedPoiseuilleProblem reversed_poiseuille(const SteadyBenchmark& bench,
                                              int ny, int wall_margin_cells = 2);

struct DecompositionSolution {
  double j0 = 1.0, t0 = 1.0, t_end = 1.0;
  std::vector<double> y, c, u0;
  std::vector<double> t_grid;                // tabulated t' points (log-spaced)
  std::vector<std::vector<double>> j_table;  // [y index][t index]
  std::vector<double> j_end;                 // j at t_end per y
  std::vector<double> j_inf_numeric;         // exponential-tail extrapolation
  std::vector<double> j_inf_closed_form;     // 1 - (1 - j0) exp(-c/t0)
  std::vector<double> u_inf;                 // u0 * j_inf_numeric
  std::vector<unsigned char> finite_ok;      // per-y health flag
};

/// RK4 integration of decomposition_ode_rhs per y sample on a geometric
/// t' grid from t0 to t_end with n_steps intervals. Requires t0 > 0 and
/// t_end > t0. Non-finite intermediates are reported through finite_ok.
DecompositionSolution solve_decomposition(const ReversedPoiseuilleProblem& prob,
                                          double j0, double t0, double t_end,
                                          int n_steps);

/// Steady limit u0 + (u_tbar - u0) exp(-c_y / t_bar); an overflowing
/// exponential is reported as a non-finite value, not an error.
double steady_limit_from_sample(double u0, double u_tbar, double c_y, double t_bar);

struct RatioCheck {
  bool pass = false;
  double first_ratio = 0.0;
  double last_ratio = 0.0;
  double worst_ratio = 0.0;
  std::string detail;
};

/// Operationalized little-o test on sampled data: with r_k = |value_k| /
/// envelope(t'_k) ordered by increasing t', requires the tail (last half)
/// to be non-increasing and the last ratio <= decrease_factor * the first.
/// Throws on fewer than 8 samples, non-increasing t', or a zero envelope.
RatioCheck check_little_o(std::span<const std::pair<double, double>> samples,
                          const std::function<double(double)>& envelope,
                          double decrease_factor = 0.1);

/// Operationalized big-O test as tbar' decreases to 0+: ratios are
/// normalized by the first sample's ratio so the check is invariant under
/// positive rescaling of the envelope; passes when the tail stays within
/// `bound` times the reference ratio. A sample where the envelope
/// underflows to exactly 0 requires the value to be 0 as well.
/// Throws on fewer than 8 samples or non-decreasing tbar'.
RatioCheck check_big_O(std::span<const std::pair<double, double>> samples,
                       const std::function<double(double)>& envelope,
                       double bound = 10.0);

}  // namespace wellpose
