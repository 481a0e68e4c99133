#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "rvlbm/lattice.hpp"

using namespace rvlbm;

TEST_SUITE("lattice") {
  TEST_CASE("d2q9 ordering") {
    const VelocitySet vs = d2q9(1.0);
    CHECK(vs.v[1] == Vec2(1, 0));
    CHECK(vs.v[5] == Vec2(1, 1));
    CHECK(vs.v[7] == Vec2(-1, -1));
    CHECK(vs.v[0] == Vec2(0, 0));
    CHECK(vs.v[2] == Vec2(0, 1));
    CHECK(vs.v[3] == Vec2(-1, 0));
    CHECK(vs.v[4] == Vec2(0, -1));
    CHECK(vs.v[6] == Vec2(-1, 1));
    CHECK(vs.v[8] == Vec2(1, -1));
    Vec2 sum = Vec2::Zero();
    for (const auto& v : vs.v) sum += v;
    CHECK(sum == Vec2::Zero());
    CHECK(d2q9(2.0).v[2] == Vec2(0, 2));
  }

  TEST_CASE("d2q9 rejects non-positive lambda") {
    CHECK_THROWS_AS(d2q9(0.0), std::invalid_argument);
    CHECK_THROWS_AS(d2q9(-1.0), std::invalid_argument);
  }

  TEST_CASE("velocity set closed under swap and sign flips") {
    const VelocitySet vs = d2q9(1.7);
    auto contains = [&](const Vec2& w) {
      for (const auto& v : vs.v)
        if (v == w) return true;
      return false;
    };
    for (const auto& v : vs.v) {
      CHECK(contains(Vec2(v.y(), v.x())));
      CHECK(contains(Vec2(-v.x(), v.y())));
      CHECK(contains(Vec2(v.x(), -v.y())));
    }
    for (int j = 0; j < kQ; ++j) {
      CHECK(vs.v[static_cast<std::size_t>(VelocitySet::kOpposite[static_cast<std::size_t>(j)])] == -vs.v[static_cast<std::size_t>(j)]);
    }
  }

  TEST_CASE("periodic_shift examples") {
    const VelocitySet vs = d2q9(1.0);
    const Grid g = Grid::unit_square(4, 4, 1.0);
    CHECK(periodic_shift(g, vs, {0, 0}, Vec2(1, 0)) == Cell{3, 0});
    CHECK(periodic_shift(g, vs, {2, 3}, Vec2(0, 0)) == Cell{2, 3});
    CHECK(periodic_shift(g, vs, {0, 0}, Vec2(-1, -1)) == Cell{1, 1});
    CHECK_THROWS_AS(periodic_shift(g, vs, {0, 0}, Vec2(0.5, 0)), std::invalid_argument);
    CHECK_THROWS_AS(periodic_shift(g, vs, {0, 0}, Vec2(2, 0)), std::invalid_argument);
  }

  TEST_CASE("periodic_shift round trip") {
    for (double lambda : {1.0, 3.0, 25.0 * std::sqrt(3.0)}) {
      const VelocitySet vs = d2q9(lambda);
      const Grid g = Grid::unit_square(5, 7, lambda);
      for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
          for (const auto& v : vs.v) {
            const Cell back = periodic_shift(g, vs, periodic_shift(g, vs, {i, j}, v), -v);
            CHECK(back == Cell{i, j});
          }
        }
      }
    }
  }

  TEST_CASE("acoustic scaling is exact") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lam(0.1, 100.0);
    for (int t = 0; t < 200; ++t) {
      const double lambda = t == 0 ? 25.0 * std::sqrt(3.0) : lam(rng);
      for (int n : {4, 16, 32, 128, 1000}) {
        const Grid g = Grid::unit_square(n, n, lambda);
        CHECK(g.dt * lambda == g.dx);
        CHECK(std::abs(g.dx - 1.0 / n) <= 4 * std::numeric_limits<double>::epsilon() / n);
      }
    }
  }

  TEST_CASE("grid size validation") {
    CHECK_THROWS_AS(Grid::unit_square(3, 8, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid::unit_square(8, 2, 1.0), std::invalid_argument);
    const Grid g = Grid::unit_square(8, 4, 1.0);
    CHECK(g.cells() == 32u);
    CHECK(g.index(3, 2) == 19u);
    CHECK(g.wrap_x(-1) == 7);
    CHECK(g.wrap_y(4) == 0);
  }
}
