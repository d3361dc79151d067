#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <sstream>

#include "test_util.hpp"
#include "wellpose/field_io.hpp"
#include "wellpose/stencil.hpp"

using namespace wellpose;
using namespace wellpose::test;

namespace {
constexpr double pi = std::numbers::pi;
GridPtr unit_grid(int n = 64) { return make_grid(n, n, 1.0, 1.0); }
}  // namespace

TEST_CASE("grid construction and invariants") {
  auto g = make_grid(64, 48, 2.0, 1.0);
  CHECK(g->dx() == doctest::Approx(2.0 / 64));
  CHECK(g->dy() == doctest::Approx(1.0 / 47));
  CHECK(g->y(0) == 0.0);
  CHECK(g->y(47) == doctest::Approx(1.0));
  CHECK_THROWS_AS(Grid2D(3, 8, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid2D(8, 3, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid2D(8, 8, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid2D(8, 8, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("gradient: constant, linear, quadratic") {
  auto g = unit_grid();
  const auto zero = [](double, double) { return 0.0; };

  VectorField2D gc = gradient(sample(g, [](double, double) { return 4.2; }));
  CHECK(max_abs_error(gc.ux, zero, all_nodes(*g)) == 0.0);
  CHECK(max_abs_error(gc.uy, zero, all_nodes(*g)) == 0.0);

  VectorField2D gy = gradient(sample(g, [](double, double y) { return y; }));
  CHECK(max_abs_error(gy.ux, zero, all_nodes(*g)) <= 1e-13);
  CHECK(max_abs_error(gy.uy, [](double, double) { return 1.0; },
                      all_nodes(*g)) <= 1e-13);

  VectorField2D g2 = gradient(sample(g, [](double, double y) { return y * y; }));
  CHECK(max_abs_error(g2.uy, [](double, double y) { return 2.0 * y; },
                      interior(*g)) <= 1e-12);
}

TEST_CASE("divergence: uniform, shear, linear strain") {
  auto g = unit_grid();
  const auto zero = [](double, double) { return 0.0; };

  ScalarField2D d1 = divergence(sample_vec(
      g, [](double, double) { return 1.0; }, [](double, double) { return 1.0; }));
  CHECK(max_abs_error(d1, zero, all_nodes(*g)) == 0.0);

  ScalarField2D d2 = divergence(sample_vec(
      g, [](double, double y) { return y * (1.0 - y); },
      [](double, double) { return 0.0; }));
  CHECK(max_abs_error(d2, zero, all_nodes(*g)) <= 1e-13);

  // (x, -y): symbolic divergence 1 - 1 = 0 away from the periodic seam.
  ScalarField2D d3 = divergence(sample_vec(
      g, [](double x, double) { return x; }, [](double, double y) { return -y; }));
  CHECK(max_abs_error(d3, zero, no_wrap(*g)) <= 1e-12);
}

TEST_CASE("curl_z: uniform, shear, rigid rotation") {
  auto g = unit_grid();

  ScalarField2D w1 = curl_z(sample_vec(
      g, [](double, double) { return 3.0; }, [](double, double) { return 7.0; }));
  CHECK(max_abs_error(w1, [](double, double) { return 0.0; }, all_nodes(*g)) ==
        0.0);

  ScalarField2D w2 = curl_z(sample_vec(
      g, [](double, double y) { return y * (1.0 - y); },
      [](double, double) { return 0.0; }));
  CHECK(max_abs_error(w2, [](double, double y) { return 2.0 * y - 1.0; },
                      all_nodes(*g)) <= 1e-12);

  ScalarField2D w3 = curl_z(sample_vec(
      g, [](double, double y) { return -y; }, [](double x, double) { return x; }));
  CHECK(max_abs_error(w3, [](double, double) { return 2.0; }, no_wrap(*g)) <=
        1e-12);
}

TEST_CASE("curl_of_curl: shear profile and divergence-free linear field") {
  auto g = unit_grid();

  VectorField2D cc = curl_of_curl(sample_vec(
      g, [](double, double y) { return y * (1.0 - y); },
      [](double, double) { return 0.0; }));
  CHECK(max_abs_error(cc.ux, [](double, double) { return 2.0; },
                      all_nodes(*g)) <= 1e-12);
  CHECK(max_abs_error(cc.uy, [](double, double) { return 0.0; },
                      all_nodes(*g)) <= 1e-12);

  VectorField2D lin = curl_of_curl(sample_vec(
      g, [](double, double y) { return 3.0 * y; },
      [](double, double) { return 0.0; }));
  CHECK(max_abs_error(lin.ux, [](double, double) { return 0.0; },
                      all_nodes(*g)) <= 1e-12);
  CHECK(max_abs_error(lin.uy, [](double, double) { return 0.0; },
                      all_nodes(*g)) <= 1e-12);
}

TEST_CASE("curl_of_curl of a gradient vanishes") {
  // The discrete d/dx and d/dy act on separate indices and commute exactly,
  // so the curl of a discrete gradient is zero up to roundoff amplified by
  // the stencil scale 1/(dx dy) -- far below the O(dx^2) the continuum
  // identity requires.
  const auto phi = [](double x, double y) {
    return std::sin(2.0 * pi * x) * (y * y * y - y);
  };
  for (int n : {32, 64}) {
    auto g = make_grid(n, n, 1.0, 1.0);
    VectorField2D cc = curl_of_curl(gradient(sample(g, phi)));
    const Region r = interior(*g);
    const double dx2 = g->dx() * g->dx();
    for (int j = r.j_lo; j <= r.j_hi; ++j)
      for (int i = r.i_lo; i <= r.i_hi; ++i) {
        CHECK(std::abs(cc.ux(i, j)) <= dx2);
        CHECK(std::abs(cc.uy(i, j)) <= dx2);
        CHECK(std::abs(cc.ux(i, j)) <= 1e-10);
        CHECK(std::abs(cc.uy(i, j)) <= 1e-10);
      }
  }
}

TEST_CASE("advection_div: zero field, parallel shear, linear stream") {
  auto g = unit_grid();
  const auto zero = [](double, double) { return 0.0; };

  VectorField2D a0 = advection_div(VectorField2D(g));
  CHECK(max_abs_error(a0.ux, zero, all_nodes(*g)) == 0.0);
  CHECK(max_abs_error(a0.uy, zero, all_nodes(*g)) == 0.0);

  VectorField2D a1 = advection_div(sample_vec(
      g, [](double, double y) { return y * (1.0 - y); }, zero));
  CHECK(max_abs_error(a1.ux, zero, all_nodes(*g)) <= 1e-13);
  CHECK(max_abs_error(a1.uy, zero, all_nodes(*g)) <= 1e-13);

  VectorField2D a2 = advection_div(sample_vec(
      g, [](double x, double) { return x; }, zero));
  CHECK(max_abs_error(a2.ux, [](double x, double) { return 2.0 * x; },
                      no_wrap(*g)) <= 1e-12);
}

TEST_CASE("laplacian: linear, quadratic, trigonometric") {
  auto g = unit_grid();

  ScalarField2D l1 = laplacian(sample(g, [](double, double y) { return y; }));
  CHECK(max_abs_error(l1, [](double, double) { return 0.0; }, all_nodes(*g)) <=
        1e-12);
  ScalarField2D l1b =
      laplacian(sample(g, [](double, double y) { return 3.0 * y + 5.0; }));
  CHECK(max_abs_error(l1b, [](double, double) { return 0.0; },
                      all_nodes(*g)) <= 1e-11);

  ScalarField2D l2 = laplacian(sample(g, [](double, double y) { return y * y; }));
  CHECK(max_abs_error(l2, [](double, double) { return 2.0; }, all_nodes(*g)) <=
        1e-11);

  // sin(2 pi x): discrete error bounded by the Taylor remainder
  // (2 pi)^4 dx^2 / 12 * |sin| (+ a margin for the shifted evaluation point).
  const double lx = 1.0;
  const double kx = 2.0 * pi / lx;
  ScalarField2D ls =
      laplacian(sample(g, [&](double x, double) { return std::sin(kx * x); }));
  const double dx = g->dx();
  for (int j = 0; j < g->ny(); ++j)
    for (int i = 0; i < g->nx(); ++i) {
      const double s = std::sin(kx * g->x(i));
      const double bound =
          std::pow(kx, 4) * dx * dx / 12.0 * (std::abs(s) + kx * dx) * 1.1 +
          1e-9;
      CHECK(std::abs(ls(i, j) + kx * kx * s) <= bound);
    }
}

TEST_CASE("stencils exact on polynomials of degree <= 2") {
  auto g = unit_grid(48);
  const double coeff[6] = {0.7, -1.3, 0.4, 0.9, -0.6, 1.1};
  const auto f = [&](double x, double y) {
    return coeff[0] + coeff[1] * x + coeff[2] * y + coeff[3] * x * x +
           coeff[4] * x * y + coeff[5] * y * y;
  };
  const auto fx = [&](double x, double y) {
    return coeff[1] + 2.0 * coeff[3] * x + coeff[4] * y;
  };
  const auto fy = [&](double x, double y) {
    return coeff[2] + coeff[4] * x + 2.0 * coeff[5] * y;
  };
  const auto lap = [&](double, double) {
    return 2.0 * coeff[3] + 2.0 * coeff[5];
  };

  ScalarField2D field = sample(g, f);
  VectorField2D grad = gradient(field);
  const Region r = no_wrap(*g);
  CHECK(max_abs_error(grad.ux, fx, r) <= 1e-12);
  CHECK(max_abs_error(grad.uy, fy, r) <= 1e-12);
  CHECK(max_abs_error(laplacian(field), lap, r) <= 1e-11);
}

TEST_CASE("divergence of gradient equals laplacian on quadratics") {
  auto g = unit_grid(48);
  ScalarField2D f = sample(g, [](double x, double y) {
    return 0.3 * x * x - 0.8 * x * y + 1.7 * y * y + 0.2 * x - y + 0.5;
  });
  ScalarField2D a = divergence(gradient(f));
  ScalarField2D b = laplacian(f);
  CHECK(max_abs_diff(a, b, no_wrap(*g, 2)) <= 1e-11);
}

TEST_CASE("curl_of_curl equals minus vector laplacian for div-free quadratics") {
  auto g = unit_grid(48);
  // (x^2, -2xy) and (y^2, 0) are divergence-free with quadratic components.
  for (auto fields :
       {sample_vec(g, [](double x, double) { return x * x; },
                   [](double x, double y) { return -2.0 * x * y; }),
        sample_vec(g, [](double, double y) { return y * y; },
                   [](double, double) { return 0.0; })}) {
    VectorField2D cc = curl_of_curl(fields);
    ScalarField2D lap_x = laplacian(fields.ux);
    ScalarField2D lap_y = laplacian(fields.uy);
    const Region r = no_wrap(*g, 2);
    for (int j = r.j_lo; j <= r.j_hi; ++j)
      for (int i = r.i_lo; i <= r.i_hi; ++i) {
        CHECK(std::abs(cc.ux(i, j) + lap_x(i, j)) <= 1e-11);
        CHECK(std::abs(cc.uy(i, j) + lap_y(i, j)) <= 1e-11);
      }
  }
}

TEST_CASE("periodic x: shifting the input shifts every operator output") {
  auto g = unit_grid(32);
  ScalarField2D f = sample(g, [](double x, double y) {
    return std::sin(2.0 * pi * x) + 0.3 * std::cos(4.0 * pi * x) * y +
           y * y * (1.0 - y);
  });
  VectorField2D v = sample_vec(
      g,
      [](double x, double y) { return std::cos(2.0 * pi * x) * y * (1.0 - y); },
      [](double x, double y) { return std::sin(4.0 * pi * x) * y; });

  const int nx = g->nx();
  auto shift_s = [&](const ScalarField2D& a) {
    ScalarField2D out(g);
    for (int j = 0; j < g->ny(); ++j)
      for (int i = 0; i < nx; ++i) out(i, j) = a((i + nx - 1) % nx, j);
    return out;
  };
  auto shift_v = [&](const VectorField2D& a) {
    VectorField2D out(g);
    out.ux = shift_s(a.ux);
    out.uy = shift_s(a.uy);
    return out;
  };
  auto identical = [&](const ScalarField2D& a, const ScalarField2D& b) {
    for (int j = 0; j < g->ny(); ++j)
      for (int i = 0; i < nx; ++i)
        if (a(i, j) != b(i, j)) return false;
    return true;
  };

  CHECK(identical(shift_s(laplacian(f)), laplacian(shift_s(f))));
  VectorField2D ga = gradient(f);
  VectorField2D gb = gradient(shift_s(f));
  CHECK(identical(shift_s(ga.ux), gb.ux));
  CHECK(identical(shift_s(ga.uy), gb.uy));
  CHECK(identical(shift_s(divergence(v)), divergence(shift_v(v))));
  CHECK(identical(shift_s(curl_z(v)), curl_z(shift_v(v))));
  VectorField2D ca = curl_of_curl(v);
  VectorField2D cb = curl_of_curl(shift_v(v));
  CHECK(identical(shift_s(ca.ux), cb.ux));
  CHECK(identical(shift_s(ca.uy), cb.uy));
  VectorField2D aa = advection_div(v);
  VectorField2D ab = advection_div(shift_v(v));
  CHECK(identical(shift_s(aa.ux), ab.ux));
  CHECK(identical(shift_s(aa.uy), ab.uy));
}

TEST_CASE("y quadrature annihilates ddy of wall-vanishing fields") {
  for (int ny : {4, 5, 6, 7, 64}) {
    auto g = make_grid(8, ny, 1.0, 1.0);
    ScalarField2D f = sample(g, [&](double x, double y) {
      return std::sin(3.0 * x + 2.0) * y * (g->ly() - y) * (1.3 + y);
    });
    for (int i = 0; i < g->nx(); ++i) {
      CHECK(f(i, 0) == 0.0);
      CHECK(std::abs(f(i, ny - 1)) <= 1e-15);
      f(i, ny - 1) = 0.0;
    }
    ScalarField2D df(g);
    ddy_into(f, df);
    double wsum = 0.0;
    for (int j = 0; j < ny; ++j) wsum += quadrature_weight_y(*g, j);
    CHECK(wsum == doctest::Approx(g->ly()).epsilon(1e-13));
    for (int i = 0; i < g->nx(); ++i) {
      double s = 0.0;
      for (int j = 0; j < ny; ++j) s += quadrature_weight_y(*g, j) * df(i, j);
      CHECK(std::abs(s) <= 1e-13 * f.max_abs() / g->dy());
    }
  }
}

TEST_CASE("field csv round-trips bitwise") {
  auto g = make_grid(8, 5, 2.0, 1.0);
  ScalarField2D f = sample(g, [](double x, double y) {
    return std::sin(x * 12.9898 + y * 78.233) * 43758.5453;
  });
  std::ostringstream os;
  write_field_csv(os, f, "rho", 0.125);
  std::istringstream is(os.str());
  FieldRecord rec = read_field_csv(is);
  CHECK(rec.name == "rho");
  CHECK(rec.t == 0.125);
  CHECK(rec.field.grid().same_as(*g));
  for (int j = 0; j < g->ny(); ++j)
    for (int i = 0; i < g->nx(); ++i) CHECK(rec.field(i, j) == f(i, j));
}
