#pragma once

#include <span>
#include <vector>

#include "wellpose/contracts.hpp"
#include "wellpose/grid.hpp"

namespace wellpose {

/// Dense scalar samples on a Grid2D, row-major with one row per y node.
class ScalarField2D {
 public:
  explicit ScalarField2D(GridPtr grid, double fill = 0.0);

  const Grid2D& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }

  double operator()(int i, int j) const { return v_[idx(i, j)]; }
  double& operator()(int i, int j) { return v_[idx(i, j)]; }

  std::span<const double> values() const { return v_; }
  std::span<double> values() { return v_; }
  std::span<const double> row(int j) const;
  std::span<double> row(int j);

  void fill(double value);
  double max_abs() const;
  double min_value() const;
  bool all_finite() const;

 private:
  std::size_t idx(int i, int j) const {
    return std::size_t(j) * std::size_t(grid_->nx()) + std::size_t(i);
  }

  GridPtr grid_;
  std::vector<double> v_;
};

/// Two velocity components sharing one grid.
struct VectorField2D {
  ScalarField2D ux;
  ScalarField2D uy;

  explicit VectorField2D(GridPtr grid, double fill = 0.0)
      : ux(grid, fill), uy(grid, fill) {}

  const Grid2D& grid() const { return ux.grid(); }
  const GridPtr& grid_ptr() const { return ux.grid_ptr(); }
};

void require_same_grid(const ScalarField2D& a, const ScalarField2D& b);
void require_same_grid(const VectorField2D& a, const ScalarField2D& b);
void require_same_grid(const VectorField2D& a, const VectorField2D& b);

}  // namespace wellpose
