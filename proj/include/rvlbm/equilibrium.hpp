#ifndef RVLBM_EQUILIBRIUM_HPP_
#define RVLBM_EQUILIBRIUM_HPP_

#include <array>
#include <string>

#include "rvlbm/lattice.hpp"
#include "rvlbm/types.hpp"

namespace rvlbm {

/// Truncated2: second-order expansion of the Maxwellian.
/// Product4: fourth-order product form with the cubic terms and the
/// d_j (u^x)^2 (u^y)^2 correction.
enum class EquilibriumKind { Truncated2, Product4 };

std::string to_string(EquilibriumKind kind);
EquilibriumKind parse_equilibrium(const std::string& text);

/// Standard D2Q9 weights, c0^2 = lambda^2 / 3, and the product-form d_j.
struct LatticeConstants {
  std::array<double, kQ> weights{};
  std::array<double, kQ> d{};
  double c0_sq = 0.0;

  static LatticeConstants d2q9(double lambda);
};

/// feq_j = rho * g_j(u).
Vec9 feq(EquilibriumKind kind, double rho, const Vec2& u, const LatticeConstants& consts,
         const VelocitySet& vset);

/// The matrix E of the equilibrium linearized at (rho = 1, q = V) in terms of f:
/// E[j][l] = g_j(V) + grad g_j(V) . (v_l - V). Independent of the base density.
Mat9 linearized_equilibrium(EquilibriumKind kind, const Vec2& velocity,
                            const LatticeConstants& consts, const VelocitySet& vset);

}  // namespace rvlbm

#endif  // RVLBM_EQUILIBRIUM_HPP_
