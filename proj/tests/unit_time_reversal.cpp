#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "wellpose/time_reversal.hpp"

using namespace wellpose;

namespace {

using Samples = std::vector<std::pair<double, double>>;

TimeMap identity_map() {  // dg/dt = +1, must fail validation
  TimeMap m;
  m.name = "identity";
  m.g = [](double t) { return t; };
  m.g_inv = [](double tp) { return tp; };
  m.dg_inv = [](double) { return 1.0; };
  m.t_lo = m.img_lo = -std::numeric_limits<double>::infinity();
  m.t_hi = m.img_hi = std::numeric_limits<double>::infinity();
  return m;
}

TimeMap negation_map() {  // dg/dt = -1 everywhere, passes
  TimeMap m;
  m.name = "negation";
  m.g = [](double t) { return -t; };
  m.g_inv = [](double tp) { return -tp; };
  m.dg_inv = [](double) { return -1.0; };
  m.t_lo = m.img_lo = -std::numeric_limits<double>::infinity();
  m.t_hi = m.img_hi = std::numeric_limits<double>::infinity();
  return m;
}

}  // namespace

TEST_CASE("reciprocal map point values and domain guards") {
  const TimeMap m = reciprocal_map();
  CHECK(m.map(2.0) == 0.5);
  CHECK(m.map(m.inverse(7.0)) == doctest::Approx(7.0).epsilon(1e-14));
  CHECK(m.d_inverse(10.0) == doctest::Approx(-0.01).epsilon(1e-14));
  CHECK_THROWS_AS(m.map(0.0), std::domain_error);
  CHECK_THROWS_AS(m.map(-1.0), std::domain_error);
  CHECK_THROWS_AS(m.inverse(0.0), std::domain_error);
  CHECK_THROWS_AS(m.d_inverse(-2.0), std::domain_error);
}

TEST_CASE("validate_map: reciprocal passes, identity fails, negation passes") {
  const MapValidation ok = validate_map(reciprocal_map(), 64);
  CHECK(ok.pass);
  CHECK(ok.violation.empty());

  const MapValidation bad = validate_map(identity_map(), 64);
  CHECK_FALSE(bad.pass);
  CHECK(bad.violation.find("derivative") != std::string::npos);

  CHECK(validate_map(negation_map(), 64).pass);
  CHECK_THROWS_AS(validate_map(reciprocal_map(), 1), std::invalid_argument);
}

TEST_CASE("chain rule factor against a finite-difference oracle") {
  const TimeMap m = reciprocal_map();
  CHECK(chain_rule_factor(m, 1.0) == -1.0);
  CHECK(chain_rule_factor(m, 2.0) == -0.25);
  CHECK_THROWS_AS(chain_rule_factor(m, -1.0), std::domain_error);

  // u(t) = e^{-t}; the reversed signal is u_rev(t') = u(g_inv(t')).
  const auto u = [](double t) { return std::exp(-t); };
  const auto du = [](double t) { return -std::exp(-t); };
  for (int n = 0; n < 20; ++n) {
    const double tp = 0.1 * std::pow(1000.0, n / 19.0);  // log-spaced [0.1, 100]
    const double h = 1e-4 * tp;
    const double fd =
        (u(m.inverse(tp + h)) - u(m.inverse(tp - h))) / (2.0 * h);
    const double product = du(m.inverse(tp)) * chain_rule_factor(m, tp);
    CHECK(std::abs(fd - product) <= 1e-6 * std::abs(product));
  }
}

TEST_CASE("inverse-function derivative identity for the reciprocal map") {
  const TimeMap m = reciprocal_map();
  for (int n = 0; n < 40; ++n) {
    const double tp = 1e-3 * std::pow(1e6, n / 39.0);
    const double t = m.inverse(tp);
    const double dg_dt = -1.0 / (t * t);  // closed form of dg/dt
    CHECK(std::abs(m.d_inverse(tp) * dg_dt - 1.0) <= 1e-10);
  }
}

TEST_CASE("decomposition coefficient and ODE right-hand side") {
  CHECK(decomposition_coefficient(0.5, 1.0, 1.0) == doctest::Approx(-8.0));
  CHECK(decomposition_coefficient(0.25, 1.0, 1.0) ==
        doctest::Approx(-32.0 / 3.0).epsilon(1e-14));
  for (int n = 1; n < 20; ++n)
    CHECK(decomposition_coefficient(n / 20.0, 0.7, 1.0) < 0.0);
  CHECK_THROWS_AS(decomposition_coefficient(0.0, 1.0, 1.0), std::domain_error);

  CHECK(decomposition_ode_rhs(1.0, 5.0, -8.0) == 0.0);
  CHECK(decomposition_ode_rhs(0.0, 1.0, -8.0) == doctest::Approx(-8.0));
  CHECK(decomposition_ode_rhs(0.5, 2.0, -8.0) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(decomposition_ode_rhs(0.5, 0.0, -8.0), std::domain_error);
  CHECK_THROWS_AS(decomposition_ode_rhs(0.5, -1.0, -8.0), std::domain_error);
}

TEST_CASE("reversed problem sampling") {
  const SteadyBenchmark bench = make_poiseuille(1.0, -2.0, 1.0);
  const ReversedPoiseuilleProblem prob = reversed_poiseuille(bench, 65, 2);
  CHECK(prob.px == bench.px);
  CHECK(prob.mu == bench.mu);
  REQUIRE(prob.y.size() == 61);  // 65 nodes minus 2 per wall
  const double dy = 1.0 / 64.0;
  CHECK(prob.y.front() == doctest::Approx(2.0 * dy));
  CHECK(prob.y.back() == doctest::Approx(1.0 - 2.0 * dy));
  for (std::size_t s = 0; s < prob.y.size(); ++s)
    CHECK(prob.u0[s] ==
          doctest::Approx(poiseuille_profile(prob.y[s], 1.0, -2.0, 1.0)));

  CHECK_THROWS_AS(reversed_poiseuille(bench, 3, 2), std::invalid_argument);
  CHECK_THROWS_AS(reversed_poiseuille(bench, 65, 0), std::invalid_argument);
  CHECK_THROWS_AS(reversed_poiseuille(bench, 8, 4), std::invalid_argument);
}

TEST_CASE("solve_decomposition: j0 = 1 is a fixed point everywhere") {
  const SteadyBenchmark bench = make_poiseuille(1.0, -2.0, 1.0);
  const ReversedPoiseuilleProblem prob = reversed_poiseuille(bench, 33, 2);
  const DecompositionSolution sol = solve_decomposition(prob, 1.0, 1.0, 1e3, 500);
  for (std::size_t s = 0; s < sol.y.size(); ++s) {
    CHECK(sol.finite_ok[s] == 1);
    for (double j : sol.j_table[s]) CHECK(j == 1.0);
    CHECK(sol.j_end[s] == 1.0);
    CHECK(sol.j_inf_numeric[s] == 1.0);
    CHECK(sol.j_inf_closed_form[s] == 1.0);
  }
}

TEST_CASE("solve_decomposition matches the separable closed form") {
  const SteadyBenchmark bench = make_poiseuille(1.0, -2.0, 1.0);
  const ReversedPoiseuilleProblem prob = reversed_poiseuille(bench, 65, 2);
  const double j0 = 0.9, t0 = 1.0, t_end = 1e4;
  const DecompositionSolution sol =
      solve_decomposition(prob, j0, t0, t_end, 40000);

  REQUIRE(sol.t_grid.size() == sol.j_table.front().size());
  CHECK(sol.t_grid.front() == t0);
  CHECK(sol.t_grid.back() == t_end);

  int idx_half = -1, idx_quarter = -1;
  for (std::size_t s = 0; s < sol.y.size(); ++s) {
    if (std::abs(sol.y[s] - 0.5) < 1e-12) idx_half = int(s);
    if (std::abs(sol.y[s] - 0.25) < 1e-12) idx_quarter = int(s);
  }
  REQUIRE(idx_half >= 0);
  REQUIRE(idx_quarter >= 0);

  // y = 1/2: c = -8, closed form j(inf) = 1 - 0.1 e^8 ~ -297.0958
  CHECK(sol.c[idx_half] == doctest::Approx(-8.0));
  const double expected_half = 1.0 - 0.1 * std::exp(8.0);
  CHECK(expected_half == doctest::Approx(-297.09579870417285).epsilon(1e-12));
  CHECK(sol.j_inf_closed_form[idx_half] ==
        doctest::Approx(expected_half).epsilon(1e-12));
  CHECK(std::abs(sol.j_inf_numeric[idx_half] - expected_half) <=
        1e-6 * std::abs(expected_half));

  // y = 1/4: c = -32/3, closed form 1 - 0.1 e^{32/3}
  const double expected_quarter = 1.0 - 0.1 * std::exp(32.0 / 3.0);
  CHECK(std::abs(sol.j_inf_numeric[idx_quarter] - expected_quarter) <=
        1e-6 * std::abs(expected_quarter));

  // closed-form agreement across all samples (|c| up to ~66 at this margin)
  for (std::size_t s = 0; s < sol.y.size(); ++s) {
    CHECK(sol.finite_ok[s] == 1);
    const double rel =
        std::abs(sol.j_inf_numeric[s] - sol.j_inf_closed_form[s]) /
        std::abs(sol.j_inf_closed_form[s]);
    CHECK(rel <= 1e-6);
    CHECK(sol.u_inf[s] == sol.u0[s] * sol.j_inf_numeric[s]);
  }

  CHECK_THROWS_AS(solve_decomposition(prob, j0, 0.0, 10.0, 100),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_decomposition(prob, j0, 1.0, 1.0, 100),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_decomposition(prob, j0, 1.0, 10.0, 0),
                  std::invalid_argument);
}

TEST_CASE("solve_decomposition flags overflow near the wall") {
  ReversedPoiseuilleProblem prob;
  prob.mu = 1.0;
  prob.h = 1.0;
  prob.px = -2.0;
  prob.y = {1e-3};  // c ~ -2002, the tail amplification e^{|c|} overflows
  prob.u0 = {poiseuille_profile(1e-3, 1.0, -2.0, 1.0)};
  const DecompositionSolution sol = solve_decomposition(prob, 0.9, 1.0, 1e4, 2000);
  CHECK(sol.finite_ok[0] == 0);
}

TEST_CASE("steady_limit_from_sample values and overflow reporting") {
  CHECK(steady_limit_from_sample(0.25, 0.25, -8.0, 1.0) == 0.25);

  const double u_tbar = 0.25 + std::exp(-8.0);
  CHECK(steady_limit_from_sample(0.25, u_tbar, -8.0, 1.0) ==
        doctest::Approx(1.25).epsilon(1e-14));

  // overflowing exponential comes back non-finite instead of throwing
  CHECK(std::isinf(steady_limit_from_sample(0.0, 1.0, -800.0, 1.0)));
  CHECK_THROWS_AS(steady_limit_from_sample(0.0, 1.0, -8.0, 0.0), std::invalid_argument);

  // the two closed forms coincide: extrapolating from (u0, u0 j0) at t0
  // reproduces u0 j(inf) of the separable solution
  for (double c : {-2.0, -8.0, -20.0}) {
    for (double j0 : {0.3, 0.9, 1.0}) {
      const double u0 = 0.25, t0 = 1.0;
      const double from_sample_rule = steady_limit_from_sample(u0, u0 * j0, c, t0);
      const double from_ode = u0 * (1.0 - (1.0 - j0) * std::exp(-c / t0));
      CHECK(std::abs(from_sample_rule - from_ode) <=
            1e-9 * std::max(1.0, std::abs(from_ode)));
    }
  }
}

TEST_CASE("check_little_o: analytic ratio oracles") {
  const auto env_sq = [](double tp) { return tp * tp; };

  Samples decaying, constant, zero;
  for (int k = 1; k <= 12; ++k) {
    const double tp = double(k);
    decaying.emplace_back(tp, 1.0 / (tp * tp * tp));  // ratio 1/t'^5 -> 0
    constant.emplace_back(tp, tp * tp);               // ratio exactly 1
    zero.emplace_back(tp, 0.0);
  }

  CHECK(check_little_o(decaying, env_sq).pass);
  CHECK_FALSE(check_little_o(constant, env_sq).pass);
  CHECK(check_little_o(zero, env_sq).pass);

  // invariant under positive envelope rescaling
  const auto env_scaled = [](double tp) { return 137.0 * tp * tp; };
  CHECK(check_little_o(decaying, env_scaled).pass);
  CHECK_FALSE(check_little_o(constant, env_scaled).pass);

  Samples short_run(decaying.begin(), decaying.begin() + 5);
  CHECK_THROWS_AS(check_little_o(short_run, env_sq), std::invalid_argument);

  Samples unsorted = decaying;
  std::swap(unsorted[3], unsorted[4]);
  CHECK_THROWS_AS(check_little_o(unsorted, env_sq), std::invalid_argument);

  const auto env_with_zero = [](double tp) { return tp - 5.0; };
  CHECK_THROWS_AS(check_little_o(decaying, env_with_zero), std::domain_error);
}

TEST_CASE("check_big_O: analytic ratio oracles") {
  const auto envelope = [](double tbar) { return std::exp(-8.0 / tbar); };

  Samples matched, constant, zero;
  for (int k = 1; k <= 12; ++k) {
    const double tbar = 1.0 / k;  // decreasing to 0+
    matched.emplace_back(tbar, std::exp(-8.0 / tbar));
    constant.emplace_back(tbar, 1.0);
    zero.emplace_back(tbar, 0.0);
  }

  CHECK(check_big_O(matched, envelope).pass);
  CHECK_FALSE(check_big_O(constant, envelope).pass);
  CHECK(check_big_O(zero, envelope).pass);

  // scale-free: rescaling the envelope does not change outcomes
  const auto envelope_scaled = [](double tbar) {
    return 1e6 * std::exp(-8.0 / tbar);
  };
  CHECK(check_big_O(matched, envelope_scaled).pass);
  CHECK_FALSE(check_big_O(constant, envelope_scaled).pass);

  // envelope underflow to exact zero: only a zero variation survives
  Samples deep_matched, deep_constant;
  for (int k = 0; k < 10; ++k) {
    const double tbar = 0.1 / (1 << k);  // down to ~2e-4, e^{-8/tbar} -> 0
    deep_matched.emplace_back(tbar, std::exp(-8.0 / tbar));
    deep_constant.emplace_back(tbar, 1.0);
  }
  CHECK(check_big_O(deep_matched, envelope).pass);
  CHECK_FALSE(check_big_O(deep_constant, envelope).pass);

  // monotone in the bound: a ratio growing like 1/tbar (normalized sup 12)
  // fails below that and passes above
  Samples growing;
  for (int k = 1; k <= 12; ++k) {
    const double tbar = 1.0 / k;
    growing.emplace_back(tbar, std::exp(-8.0 / tbar) / tbar);
  }
  CHECK_FALSE(check_big_O(growing, envelope, 10.0).pass);
  CHECK(check_big_O(growing, envelope, 12.5).pass);
  CHECK(check_big_O(growing, envelope, 1e4).pass);

  Samples short_run(matched.begin(), matched.begin() + 4);
  CHECK_THROWS_AS(check_big_O(short_run, envelope), std::invalid_argument);
  Samples increasing = matched;
  std::reverse(increasing.begin(), increasing.end());
  CHECK_THROWS_AS(check_big_O(increasing, envelope), std::invalid_argument);
}
