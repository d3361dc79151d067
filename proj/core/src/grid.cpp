#include "wellpose/grid.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "wellpose/contracts.hpp"

namespace wellpose {

namespace detail {

void contract_failure(const char* expr, const char* file, int line) {
  std::fprintf(stderr, "wellpose: contract violation: %s (%s:%d)\n", expr, file,
               line);
  std::abort();
}

}  // namespace detail

Grid2D::Grid2D(int nx, int ny, double lx, double ly)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
  if (nx < 4) throw std::invalid_argument("Grid2D: nx must be >= 4");
  if (ny < 4) throw std::invalid_argument("Grid2D: ny must be >= 4");
  if (!(lx > 0.0)) throw std::invalid_argument("Grid2D: lx must be > 0");
  if (!(ly > 0.0)) throw std::invalid_argument("Grid2D: ly must be > 0");
  dx_ = lx_ / nx_;
  dy_ = ly_ / (ny_ - 1);
}

bool Grid2D::same_as(const Grid2D& other) const {
  return nx_ == other.nx_ && ny_ == other.ny_ && lx_ == other.lx_ &&
         ly_ == other.ly_;
}

GridPtr make_grid(int nx, int ny, double lx, double ly) {
  return std::make_shared<const Grid2D>(nx, ny, lx, ly);
}

}  // namespace wellpose
