#pragma once

#include <memory>

namespace wellpose {

/// Uniform Cartesian channel grid.
///
/// x is cell-centered and periodic: x_i = (i + 1/2) dx, dx = lx / nx.
/// y is node-centered with both no-slip walls stored: y_j = j dy,
/// dy = ly / (ny - 1), so node 0 sits on y = 0 and node ny-1 on y = ly.
class Grid2D {
 public:
  /// Throws std::invalid_argument unless nx >= 4, ny >= 4, lx > 0, ly > 0.
  Grid2D(int nx, int ny, double lx, double ly);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }

  double x(int i) const { return (i + 0.5) * dx_; }
  double y(int j) const { return j * dy_; }

  std::size_t size() const { return std::size_t(nx_) * std::size_t(ny_); }

  /// Same resolution and physical extents.
  bool same_as(const Grid2D& other) const;

 private:
  int nx_, ny_;
  double lx_, ly_;
  double dx_, dy_;
};

using GridPtr = std::shared_ptr<const Grid2D>;

GridPtr make_grid(int nx, int ny, double lx, double ly);

}  // namespace wellpose
