#ifndef RVLBM_LATTICE_HPP_
#define RVLBM_LATTICE_HPP_

#include <array>
#include <cstddef>

#include "rvlbm/types.hpp"

namespace rvlbm {

/// The nine D2Q9 velocities scaled by lambda.
///
/// Ordering is a frozen contract shared by the weights, the d_j product
/// coefficients and the moment matrix columns:
///   0 = (0,0); 1..4 = (l,0),(0,l),(-l,0),(0,-l);
///   5..8 = (l,l),(-l,l),(-l,-l),(l,-l).
struct VelocitySet {
  double lambda = 1.0;
  std::array<Vec2, kQ> v;
  /// Integer lattice directions, v[j] = lambda * c[j].
  std::array<std::array<int, 2>, kQ> c;

  /// Index of the velocity opposite to j.
  static constexpr std::array<int, kQ> kOpposite{0, 3, 4, 1, 2, 7, 8, 5, 6};
};

VelocitySet d2q9(double lambda);

struct Cell {
  int i = 0;
  int j = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Periodic grid on the unit square with acoustic scaling dt = dx / lambda.
struct Grid {
  int nx = 0;
  int ny = 0;
  double dx = 0.0;
  double dt = 0.0;

  /// nx cells across [0,1]; dy = dx so ny cells span [0, ny/nx].
  static Grid unit_square(int nx, int ny, double lambda);

  std::size_t cells() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i); }
  int wrap_x(int i) const { return ((i % nx) + nx) % nx; }
  int wrap_y(int j) const { return ((j % ny) + ny) % ny; }
};

/// Source cell of a particle arriving at `cell` with velocity v in one step.
Cell periodic_shift(const Grid& grid, const VelocitySet& vset, Cell cell, const Vec2& v);

}  // namespace rvlbm

#endif  // RVLBM_LATTICE_HPP_
