#include "wellpose/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wellpose {

ScalarField2D::ScalarField2D(GridPtr grid, double fill)
    : grid_(std::move(grid)), v_(grid_->size(), fill) {
  WP_CONTRACT(grid_ != nullptr);
}

std::span<const double> ScalarField2D::row(int j) const {
  return {v_.data() + idx(0, j), std::size_t(grid_->nx())};
}

std::span<double> ScalarField2D::row(int j) {
  return {v_.data() + idx(0, j), std::size_t(grid_->nx())};
}

void ScalarField2D::fill(double value) {
  std::fill(v_.begin(), v_.end(), value);
}

double ScalarField2D::max_abs() const {
  // NaN-propagating: std::max alone would silently drop NaN entries.
  // Branch-free reductions keep the loop vectorizable.
  double m = 0.0;
  int nan_count = 0;
  for (double x : v_) {
    const double a = std::abs(x);
    m = a > m ? a : m;
    nan_count += x != x;
  }
  return nan_count ? std::numeric_limits<double>::quiet_NaN() : m;
}

double ScalarField2D::min_value() const {
  double m = v_.empty() ? 0.0 : v_[0];
  for (double x : v_) m = std::min(m, x);
  return m;
}

bool ScalarField2D::all_finite() const {
  for (double x : v_)
    if (!std::isfinite(x)) return false;
  return true;
}

void require_same_grid(const ScalarField2D& a, const ScalarField2D& b) {
  WP_CONTRACT(a.grid().same_as(b.grid()));
}

void require_same_grid(const VectorField2D& a, const ScalarField2D& b) {
  WP_CONTRACT(a.grid().same_as(b.grid()));
}

void require_same_grid(const VectorField2D& a, const VectorField2D& b) {
  WP_CONTRACT(a.grid().same_as(b.grid()));
}

}  // namespace wellpose
