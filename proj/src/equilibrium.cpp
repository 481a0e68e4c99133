#include "rvlbm/equilibrium.hpp"

#include <stdexcept>

namespace rvlbm {

std::string to_string(EquilibriumKind kind) {
  return kind == EquilibriumKind::Truncated2 ? "truncated2" : "product4";
}

EquilibriumKind parse_equilibrium(const std::string& text) {
  if (text == "truncated2" || text == "truncated" || text == "qian") return EquilibriumKind::Truncated2;
  if (text == "product4" || text == "product" || text == "geier") return EquilibriumKind::Product4;
  throw std::invalid_argument("unknown equilibrium '" + text + "' (expected truncated2 or product4)");
}

LatticeConstants LatticeConstants::d2q9(double lambda) {
  LatticeConstants c;
  c.weights = {4.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0,
               1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0};
  c.d = {-0.25, 0.5, 0.5, 0.5, 0.5, -1.0, -1.0, -1.0, -1.0};
  c.c0_sq = lambda * lambda / 3.0;
  return c;
}

namespace {

// g_j(u) without the density factor.
inline double shape(EquilibriumKind kind, int j, const Vec2& u, const LatticeConstants& k,
                    const VelocitySet& vset) {
  const double c2 = k.c0_sq;
  const double cu = vset.v[j].dot(u);
  const double uu = u.squaredNorm();
  double g = 1.0 + cu / c2 + cu * cu / (2.0 * c2 * c2) - uu / (2.0 * c2);
  if (kind == EquilibriumKind::Product4) {
    const double ux2 = u.x() * u.x();
    const double uy2 = u.y() * u.y();
    g += cu * cu * cu / (6.0 * c2 * c2 * c2) - uu * cu / (2.0 * c2 * c2) +
         k.d[j] * ux2 * uy2 / (c2 * c2);
  }
  return k.weights[j] * g;
}

inline Vec2 shape_gradient(EquilibriumKind kind, int j, const Vec2& u, const LatticeConstants& k,
                           const VelocitySet& vset) {
  const double c2 = k.c0_sq;
  const Vec2& v = vset.v[j];
  const double cu = v.dot(u);
  Vec2 grad = v / c2 + (cu / (c2 * c2)) * v - u / c2;
  if (kind == EquilibriumKind::Product4) {
    const double uu = u.squaredNorm();
    grad += (cu * cu / (2.0 * c2 * c2 * c2)) * v - (2.0 * cu * u + uu * v) / (2.0 * c2 * c2);
    const double ux = u.x();
    const double uy = u.y();
    grad += (k.d[j] / (c2 * c2)) * Vec2(2.0 * ux * uy * uy, 2.0 * ux * ux * uy);
  }
  return k.weights[j] * grad;
}

}  // namespace

Vec9 feq(EquilibriumKind kind, double rho, const Vec2& u, const LatticeConstants& consts,
         const VelocitySet& vset) {
  if (rho < 0.0) {
    throw std::invalid_argument("feq: negative density");
  }
  Vec9 out;
  for (int j = 0; j < kQ; ++j) {
    out[j] = rho * shape(kind, j, u, consts, vset);
  }
  return out;
}

Mat9 linearized_equilibrium(EquilibriumKind kind, const Vec2& velocity,
                            const LatticeConstants& consts, const VelocitySet& vset) {
  Mat9 e;
  for (int j = 0; j < kQ; ++j) {
    const double g = shape(kind, j, velocity, consts, vset);
    const Vec2 grad = shape_gradient(kind, j, velocity, consts, vset);
    for (int l = 0; l < kQ; ++l) {
      e(j, l) = g + grad.dot(vset.v[l] - velocity);
    }
  }
  return e;
}

}  // namespace rvlbm
