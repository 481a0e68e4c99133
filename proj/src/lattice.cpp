#include "rvlbm/lattice.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rvlbm {

VelocitySet d2q9(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    std::ostringstream msg;
    msg << "d2q9: velocity scale must be positive, got " << lambda;
    throw std::invalid_argument(msg.str());
  }
  static constexpr std::array<std::array<int, 2>, kQ> dirs{{
      {0, 0}, {1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, 1}, {-1, 1}, {-1, -1}, {1, -1}}};
  VelocitySet set;
  set.lambda = lambda;
  set.c = dirs;
  for (int j = 0; j < kQ; ++j) {
    set.v[j] = Vec2(lambda * dirs[j][0], lambda * dirs[j][1]);
  }
  return set;
}

Grid Grid::unit_square(int nx, int ny, double lambda) {
  if (nx < 4 || ny < 4) {
    throw std::invalid_argument("Grid: at least 4 cells per direction are required");
  }
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("Grid: velocity scale must be positive");
  }
  Grid g;
  g.nx = nx;
  g.ny = ny;
  g.dx = 1.0 / nx;
  // dt * lambda must reproduce dx exactly; the rounded quotient can miss by an ulp.
  double dt = g.dx / lambda;
  for (int attempt = 0; attempt < 8 && dt * lambda != g.dx; ++attempt) {
    dt = std::nextafter(dt, dt * lambda < g.dx ? 2.0 * dt : 0.0);
  }
  g.dt = dt;
  // Some lambdas admit no such dt; then dx takes the product (within an ulp of 1/nx).
  if (dt * lambda != g.dx) g.dx = dt * lambda;
  return g;
}

Cell periodic_shift(const Grid& grid, const VelocitySet& vset, Cell cell, const Vec2& v) {
  const double sx = v.x() / vset.lambda;
  const double sy = v.y() / vset.lambda;
  const double rx = std::round(sx);
  const double ry = std::round(sy);
  constexpr double eps = 1e-12;
  if (std::abs(sx - rx) > eps || std::abs(sy - ry) > eps || std::abs(rx) > 1.0 || std::abs(ry) > 1.0) {
    std::ostringstream msg;
    msg << "periodic_shift: velocity (" << v.x() << ", " << v.y() << ") is not a lattice velocity";
    throw std::invalid_argument(msg.str());
  }
  return Cell{grid.wrap_x(cell.i - static_cast<int>(rx)), grid.wrap_y(cell.j - static_cast<int>(ry))};
}

}  // namespace rvlbm
