#include "wellpose/stencil.hpp"

namespace wellpose {

namespace {

// One-sided second-order first derivative rows at the walls; exact on
// quadratics like the interior stencils.
inline void ddy_row(const ScalarField2D& f, ScalarField2D& out, int j, int ny,
                    double inv2dy) {
  const int nx = f.grid().nx();
  if (j == 0) {
    for (int i = 0; i < nx; ++i)
      out(i, 0) = (-3.0 * f(i, 0) + 4.0 * f(i, 1) - f(i, 2)) * inv2dy;
  } else if (j == ny - 1) {
    for (int i = 0; i < nx; ++i)
      out(i, j) = (3.0 * f(i, j) - 4.0 * f(i, j - 1) + f(i, j - 2)) * inv2dy;
  } else {
    for (int i = 0; i < nx; ++i)
      out(i, j) = (f(i, j + 1) - f(i, j - 1)) * inv2dy;
  }
}

inline void d2dy2_row(const ScalarField2D& f, ScalarField2D& out, int j, int ny,
                      double invdy2) {
  const int nx = f.grid().nx();
  if (j == 0) {
    for (int i = 0; i < nx; ++i)
      out(i, 0) =
          (2.0 * f(i, 0) - 5.0 * f(i, 1) + 4.0 * f(i, 2) - f(i, 3)) * invdy2;
  } else if (j == ny - 1) {
    for (int i = 0; i < nx; ++i)
      out(i, j) = (2.0 * f(i, j) - 5.0 * f(i, j - 1) + 4.0 * f(i, j - 2) -
                   f(i, j - 3)) *
                  invdy2;
  } else {
    for (int i = 0; i < nx; ++i)
      out(i, j) = (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) * invdy2;
  }
}

}  // namespace

void ddx_into(const ScalarField2D& f, ScalarField2D& out) {
  require_same_grid(f, out);
  const int nx = f.grid().nx();
  const int ny = f.grid().ny();
  const double inv2dx = 1.0 / (2.0 * f.grid().dx());
  for (int j = 0; j < ny; ++j) {
    out(0, j) = (f(1, j) - f(nx - 1, j)) * inv2dx;
    for (int i = 1; i < nx - 1; ++i)
      out(i, j) = (f(i + 1, j) - f(i - 1, j)) * inv2dx;
    out(nx - 1, j) = (f(0, j) - f(nx - 2, j)) * inv2dx;
  }
}

void ddy_into(const ScalarField2D& f, ScalarField2D& out) {
  require_same_grid(f, out);
  const int ny = f.grid().ny();
  const double inv2dy = 1.0 / (2.0 * f.grid().dy());
  for (int j = 0; j < ny; ++j) ddy_row(f, out, j, ny, inv2dy);
}

VectorField2D gradient(const ScalarField2D& f) {
  VectorField2D out(f.grid_ptr());
  gradient_into(f, out);
  return out;
}

void gradient_into(const ScalarField2D& f, VectorField2D& out) {
  ddx_into(f, out.ux);
  ddy_into(f, out.uy);
}

ScalarField2D divergence(const VectorField2D& v) {
  ScalarField2D out(v.grid_ptr());
  divergence_into(v, out);
  return out;
}

void divergence_into(const VectorField2D& v, ScalarField2D& out) {
  require_same_grid(v, out);
  ScalarField2D tmp(v.grid_ptr());
  ddx_into(v.ux, out);
  ddy_into(v.uy, tmp);
  auto o = out.values();
  auto t = tmp.values();
  for (std::size_t n = 0; n < o.size(); ++n) o[n] += t[n];
}

ScalarField2D curl_z(const VectorField2D& v) {
  ScalarField2D out(v.grid_ptr());
  ScalarField2D tmp(v.grid_ptr());
  ddx_into(v.uy, out);
  ddy_into(v.ux, tmp);
  auto o = out.values();
  auto t = tmp.values();
  for (std::size_t n = 0; n < o.size(); ++n) o[n] -= t[n];
  return out;
}

VectorField2D curl_of_curl(const VectorField2D& v) {
  const ScalarField2D w = curl_z(v);
  VectorField2D out(v.grid_ptr());
  ddy_into(w, out.ux);
  ddx_into(w, out.uy);
  for (double& x : out.uy.values()) x = -x;
  return out;
}

VectorField2D advection_div(const VectorField2D& v) {
  const GridPtr g = v.grid_ptr();
  ScalarField2D prod(g), dprod(g);
  VectorField2D out(g);

  auto accumulate = [&](const ScalarField2D& a, const ScalarField2D& b,
                        ScalarField2D& target, bool x_direction, bool first) {
    auto pa = a.values();
    auto pb = b.values();
    auto pp = prod.values();
    for (std::size_t n = 0; n < pp.size(); ++n) pp[n] = pa[n] * pb[n];
    if (x_direction)
      ddx_into(prod, dprod);
    else
      ddy_into(prod, dprod);
    auto po = target.values();
    auto pd = dprod.values();
    if (first)
      for (std::size_t n = 0; n < po.size(); ++n) po[n] = pd[n];
    else
      for (std::size_t n = 0; n < po.size(); ++n) po[n] += pd[n];
  };

  accumulate(v.ux, v.ux, out.ux, true, true);
  accumulate(v.ux, v.uy, out.ux, false, false);
  accumulate(v.uy, v.ux, out.uy, true, true);
  accumulate(v.uy, v.uy, out.uy, false, false);
  return out;
}

ScalarField2D laplacian(const ScalarField2D& f) {
  ScalarField2D out(f.grid_ptr());
  laplacian_into(f, out);
  return out;
}

void laplacian_into(const ScalarField2D& f, ScalarField2D& out) {
  require_same_grid(f, out);
  const int nx = f.grid().nx();
  const int ny = f.grid().ny();
  const double invdx2 = 1.0 / (f.grid().dx() * f.grid().dx());
  const double invdy2 = 1.0 / (f.grid().dy() * f.grid().dy());

  ScalarField2D tmp(f.grid_ptr());
  for (int j = 0; j < ny; ++j) d2dy2_row(f, tmp, j, ny, invdy2);

  for (int j = 0; j < ny; ++j) {
    out(0, j) = (f(1, j) - 2.0 * f(0, j) + f(nx - 1, j)) * invdx2 + tmp(0, j);
    for (int i = 1; i < nx - 1; ++i)
      out(i, j) =
          (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) * invdx2 + tmp(i, j);
    out(nx - 1, j) =
        (f(0, j) - 2.0 * f(nx - 1, j) + f(nx - 2, j)) * invdx2 + tmp(nx - 1, j);
  }
}

double quadrature_weight_y(const Grid2D& g, int j) {
  const int ny = g.ny();
  WP_CONTRACT(j >= 0 && j < ny);
  if (j == 0 || j == ny - 1) return 0.25 * g.dy();
  if (j == 1 || j == ny - 2) return 1.25 * g.dy();
  return g.dy();
}

double integrate(const ScalarField2D& f) {
  const Grid2D& g = f.grid();
  double total = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    double row_sum = 0.0;
    for (int i = 0; i < g.nx(); ++i) row_sum += f(i, j);
    total += row_sum * quadrature_weight_y(g, j);
  }
  return total * g.dx();
}

}  // namespace wellpose
