#include "wellpose/time_reversal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wellpose {

namespace {

void check_open_interval(double v, double lo, double hi, const char* what) {
  if (!(v > lo && v < hi))
    throw std::domain_error(std::string(what) + ": argument outside domain");
}

}  // namespace

double TimeMap::map(double t) const {
  check_open_interval(t, t_lo, t_hi, "TimeMap::map");
  return g(t);
}

double TimeMap::inverse(double t_prime) const {
  check_open_interval(t_prime, img_lo, img_hi, "TimeMap::inverse");
  return g_inv(t_prime);
}

double TimeMap::d_inverse(double t_prime) const {
  check_open_interval(t_prime, img_lo, img_hi, "TimeMap::d_inverse");
  return dg_inv(t_prime);
}

TimeMap reciprocal_map() {
  TimeMap m;
  m.name = "reciprocal";
  m.g = [](double t) { return 1.0 / t; };
  m.g_inv = [](double tp) { return 1.0 / tp; };
  m.dg_inv = [](double tp) { return -1.0 / (tp * tp); };
  m.t_lo = 0.0;
  m.t_hi = std::numeric_limits<double>::infinity();
  m.img_lo = 0.0;
  m.img_hi = std::numeric_limits<double>::infinity();
  return m;
}

namespace {

// Log-spaced probe points covering the (possibly unbounded) open domain.
// Unbounded ends are clipped to magnitude 1e6, near-zero ends to 1e-6.
std::vector<double> probe_points(const TimeMap& m, int samples) {
  const double mag_lo = 1e-6, mag_hi = 1e6;
  std::vector<double> pts;
  auto add_range = [&](double lo, double hi, int n) {
    // positive log-spaced interval [lo, hi]
    if (!(hi > lo) || n < 1) return;
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int k = 0; k < n; ++k) {
      const double f = n == 1 ? 0.5 : double(k) / (n - 1);
      pts.push_back(std::exp(llo + f * (lhi - llo)));
    }
  };

  const bool has_pos = m.t_hi > 0.0;
  const bool has_neg = m.t_lo < 0.0;
  const int per_side = (has_pos && has_neg) ? (samples + 1) / 2 : samples;
  if (has_pos) {
    const double lo = std::max(m.t_lo, 0.0) > 0.0 ? m.t_lo * (1.0 + 1e-9)
                                                  : mag_lo;
    const double hi = std::min(m.t_hi, mag_hi) * (std::isfinite(m.t_hi) ? (1.0 - 1e-9) : 1.0);
    add_range(std::max(lo, mag_lo), std::max(hi, mag_lo * 2), per_side);
  }
  if (has_neg) {
    const double lo = std::max(-m.t_hi, 0.0) > 0.0 ? -m.t_hi * (1.0 + 1e-9)
                                                   : mag_lo;
    const double hi = std::min(-m.t_lo, mag_hi) * (std::isfinite(m.t_lo) ? (1.0 - 1e-9) : 1.0);
    const std::size_t before = pts.size();
    add_range(std::max(lo, mag_lo), std::max(hi, mag_lo * 2), per_side);
    for (std::size_t k = before; k < pts.size(); ++k) pts[k] = -pts[k];
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

}  // namespace

MapValidation validate_map(const TimeMap& m, int samples) {
  if (samples < 2)
    throw std::invalid_argument("validate_map: samples must be >= 2");
  MapValidation out;
  const std::vector<double> pts = probe_points(m, samples);
  if (pts.size() < 2) {
    out.violation = "domain produced fewer than two probe points";
    return out;
  }

  double prev_g = 0.0;
  bool have_prev = false;
  for (double t : pts) {
    const double h = 1e-6 * std::max(std::abs(t), 1e-6);
    if (t - h > m.t_lo && t + h < m.t_hi) {
      const double dgdt = (m.g(t + h) - m.g(t - h)) / (2.0 * h);
      if (!(dgdt < 0.0)) {
        out.violation = "derivative dg/dt not negative";
        out.at = t;
        return out;
      }
    }
    const double gt = m.g(t);
    const double back = m.g_inv(gt);
    if (std::abs(back - t) > 1e-12 * std::max(1.0, std::abs(t))) {
      out.violation = "round-trip g_inv(g(t)) != t";
      out.at = t;
      return out;
    }
    if (have_prev && !(gt < prev_g)) {
      out.violation = "g not strictly decreasing between samples";
      out.at = t;
      return out;
    }
    prev_g = gt;
    have_prev = true;
  }
  out.pass = true;
  return out;
}

double chain_rule_factor(const TimeMap& m, double t_prime) {
  return m.d_inverse(t_prime);
}

double decomposition_coefficient(double y, double mu, double h) {
  const double denom = y * y - y * h;
  if (denom == 0.0)
    throw std::domain_error(
        "decomposition_coefficient: y on a wall (coefficient singular)");
  return 2.0 * mu / denom;
}

double decomposition_ode_rhs(double j, double t_prime, double c_y) {
  if (!(t_prime > 0.0))
    throw std::domain_error("decomposition_ode_rhs: t_prime must be > 0");
  return c_y * (1.0 - j) / (t_prime * t_prime);
}

ReversedPoiseuilleProblem reversed_poiseuille(const SteadyBenchmark& bench,
                                              int ny, int wall_margin_cells) {
  if (ny < 4)
    throw std::invalid_argument("reversed_poiseuille: ny must be >= 4");
  if (wall_margin_cells < 1)
    throw std::invalid_argument("reversed_poiseuille: margin must be >= 1");
  ReversedPoiseuilleProblem prob;
  prob.mu = bench.mu;
  prob.h = bench.h;
  prob.px = bench.px;  // the reversed problem keeps the driving gradient
  const double dy = bench.h / (ny - 1);
  for (int j = wall_margin_cells; j <= ny - 1 - wall_margin_cells; ++j) {
    const double y = j * dy;
    prob.y.push_back(y);
    prob.u0.push_back(bench.profile(y));
  }
  if (prob.y.empty())
    throw std::invalid_argument(
        "reversed_poiseuille: margin excludes every sample");
  return prob;
}

DecompositionSolution solve_decomposition(const ReversedPoiseuilleProblem& prob,
                                          double j0, double t0, double t_end,
                                          int n_steps) {
  if (!(t0 > 0.0)) throw std::invalid_argument("solve_decomposition: t0 > 0");
  if (!(t_end > t0))
    throw std::invalid_argument("solve_decomposition: t_end must exceed t0");
  if (n_steps < 1)
    throw std::invalid_argument("solve_decomposition: n_steps must be >= 1");

  DecompositionSolution sol;
  sol.j0 = j0;
  sol.t0 = t0;
  sol.t_end = t_end;
  sol.y = prob.y;
  sol.u0 = prob.u0;
  sol.c.reserve(prob.y.size());
  for (double y : prob.y)
    sol.c.push_back(decomposition_coefficient(y, prob.mu, prob.h));

  // Geometric step grid: the rhs varies on the 1/t'^2 scale near t0.
  const double ratio = std::pow(t_end / t0, 1.0 / n_steps);
  const int table_stride = std::max(1, n_steps / 64);
  std::vector<int> table_idx;
  for (int k = 0; k < n_steps; k += table_stride) table_idx.push_back(k);
  table_idx.push_back(n_steps);
  auto t_at = [&](int k) {
    return k == n_steps ? t_end : t0 * std::pow(ratio, k);
  };
  for (int k : table_idx) sol.t_grid.push_back(t_at(k));

  const std::size_t ny = prob.y.size();
  sol.j_table.assign(ny, {});
  sol.j_end.assign(ny, 0.0);
  sol.j_inf_numeric.assign(ny, 0.0);
  sol.j_inf_closed_form.assign(ny, 0.0);
  sol.u_inf.assign(ny, 0.0);
  sol.finite_ok.assign(ny, 1);

  for (std::size_t s = 0; s < ny; ++s) {
    const double c = sol.c[s];
    double j = j0;
    double t = t0;
    sol.j_table[s].reserve(sol.t_grid.size());
    std::size_t next_record = 0;
    if (table_idx[next_record] == 0) {
      sol.j_table[s].push_back(j);
      ++next_record;
    }
    for (int k = 0; k < n_steps; ++k) {
      const double t_next = t_at(k + 1);
      const double hstep = t_next - t;
      const double k1 = decomposition_ode_rhs(j, t, c);
      const double k2 = decomposition_ode_rhs(j + 0.5 * hstep * k1, t + 0.5 * hstep, c);
      const double k3 = decomposition_ode_rhs(j + 0.5 * hstep * k2, t + 0.5 * hstep, c);
      const double k4 = decomposition_ode_rhs(j + hstep * k3, t_next, c);
      j += (hstep / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = t_next;
      if (!std::isfinite(j)) {
        sol.finite_ok[s] = 0;
        break;
      }
      if (next_record < table_idx.size() && table_idx[next_record] == k + 1) {
        sol.j_table[s].push_back(j);
        ++next_record;
      }
    }
    sol.j_end[s] = j;
    // Exponential-tail extrapolation from t_end to t' -> infinity; the same
    // algebra as steady_limit_from_sample applied to the decomposition factor.
    sol.j_inf_numeric[s] = 1.0 - (1.0 - j) * std::exp(-c / t_end);
    sol.j_inf_closed_form[s] = 1.0 - (1.0 - j0) * std::exp(-c / t0);
    sol.u_inf[s] = sol.u0[s] * sol.j_inf_numeric[s];
    if (!std::isfinite(sol.j_inf_numeric[s]) ||
        !std::isfinite(sol.j_inf_closed_form[s]))
      sol.finite_ok[s] = 0;
  }
  return sol;
}

double steady_limit_from_sample(double u0, double u_tbar, double c_y, double t_bar) {
  if (!(t_bar > 0.0))
    throw std::invalid_argument("steady_limit_from_sample: t_bar must be > 0");
  return u0 + (u_tbar - u0) * std::exp(-c_y / t_bar);
}

namespace {

void check_sample_preconditions(std::span<const std::pair<double, double>> s,
                                bool increasing, const char* who) {
  if (s.size() < 8)
    throw std::invalid_argument(std::string(who) + ": need at least 8 samples");
  for (std::size_t k = 1; k < s.size(); ++k) {
    const bool ok = increasing ? s[k].first > s[k - 1].first
                               : s[k].first < s[k - 1].first;
    if (!ok)
      throw std::invalid_argument(std::string(who) +
                                  ": abscissae not strictly ordered");
  }
}

}  // namespace

RatioCheck check_little_o(std::span<const std::pair<double, double>> samples,
                          const std::function<double(double)>& envelope,
                          double decrease_factor) {
  check_sample_preconditions(samples, /*increasing=*/true, "check_little_o");

  std::vector<double> ratio;
  ratio.reserve(samples.size());
  for (const auto& [tp, value] : samples) {
    const double env = envelope(tp);
    if (env == 0.0)
      throw std::domain_error("check_little_o: envelope zero at a sample");
    ratio.push_back(std::abs(value / env));
  }

  RatioCheck out;
  out.first_ratio = ratio.front();
  out.last_ratio = ratio.back();
  out.worst_ratio = *std::max_element(ratio.begin(), ratio.end());

  // "Eventually decreasing": non-increasing over the tail half (tiny
  // relative slack for roundoff).
  bool tail_down = true;
  for (std::size_t k = ratio.size() / 2; k + 1 < ratio.size(); ++k)
    if (ratio[k + 1] > ratio[k] * (1.0 + 1e-12)) {
      tail_down = false;
      out.detail = "tail ratio increased at sample " + std::to_string(k + 1);
      break;
    }
  const bool shrunk = out.last_ratio <= decrease_factor * out.first_ratio;
  if (tail_down && !shrunk) out.detail = "last ratio did not shrink enough";
  out.pass = tail_down && shrunk;
  return out;
}

RatioCheck check_big_O(std::span<const std::pair<double, double>> samples,
                       const std::function<double(double)>& envelope,
                       double bound) {
  check_sample_preconditions(samples, /*increasing=*/false, "check_big_O");

  RatioCheck out;
  std::vector<double> ratio;
  ratio.reserve(samples.size());
  for (const auto& [tbar, value] : samples) {
    const double env = envelope(tbar);
    if (env == 0.0) {
      // Underflowed envelope admits only an exactly zero variation.
      if (value != 0.0) {
        out.detail = "zero envelope with nonzero variation";
        out.pass = false;
        return out;
      }
      continue;
    }
    ratio.push_back(std::abs(value / env));
  }
  if (ratio.empty()) {  // all samples underflowed with zero variation
    out.pass = true;
    return out;
  }

  // Normalized by the first (largest tbar') ratio so the test is invariant
  // under positive rescaling of the envelope.
  out.first_ratio = ratio.front();
  out.last_ratio = ratio.back();
  double sup_tail = 0.0;
  for (std::size_t k = ratio.size() / 2; k < ratio.size(); ++k)
    sup_tail = std::max(sup_tail, ratio[k]);
  out.worst_ratio = sup_tail;
  out.pass = sup_tail <= bound * out.first_ratio;
  if (!out.pass) out.detail = "tail ratio exceeded bound x first ratio";
  return out;
}

}  // namespace wellpose
