#ifndef RVLBM_VON_NEUMANN_HPP_
#define RVLBM_VON_NEUMANN_HPP_

#include "rvlbm/collision.hpp"
#include "rvlbm/equilibrium.hpp"
#include "rvlbm/lattice.hpp"
#include "rvlbm/moment_basis.hpp"
#include "rvlbm/types.hpp"

namespace rvlbm {

/// Frame velocity used when the scheme is linearized around V.
enum class LinearShift { Zero, EqualsV, Fixed };

struct StabilityProblem {
  MomentBasis basis;
  EquilibriumKind kind = EquilibriumKind::Truncated2;
  RelaxationVector s;
  LinearShift shift = LinearShift::Zero;
  Vec2 fixed_shift = Vec2::Zero();
  /// Direction of the linearization velocity, in [0, 2 pi).
  double theta = 0.0;
  VelocitySet vset = d2q9(1.0);
  LatticeConstants consts = LatticeConstants::d2q9(1.0);
  double dt = 1.0;

  Vec2 resolve_shift(const Vec2& velocity) const;
  Vec2 direction() const;
};

/// Radius above which a mode is counted as growing.
inline constexpr double kRadiusTolerance = 1e-8;
inline constexpr int kDefaultKGrid = 64;
/// Returned by max_stable_speed when V = 0 is already unstable.
inline constexpr double kUnstableEverywhere = -1.0;

/// Linearized collision I + M^{-1} D M (E - I), independent of the wavevector.
Mat9 linear_collision(const StabilityProblem& prob, const Vec2& velocity);

/// L = A (I + M^{-1} D M (E - I)) with A = diag(exp(i dt k.v_j)).
CMat9 amplification(const StabilityProblem& prob, const Vec2& velocity, const Vec2& k);

/// Largest eigenvalue modulus. Throws NumericalFailure when neither the
/// plain nor the rescaled QR iteration converges.
double spectral_radius(const CMat9& l);
double spectral_radius(const Eigen::MatrixXcd& l);

/// max_k r(L) over a kgrid_n^2 grid of the Brillouin cell, refined by local
/// hill-climbing from the strongest coarse-grid peaks.
double max_radius_over_k(const StabilityProblem& prob, const Vec2& velocity, int kgrid_n = kDefaultKGrid);

/// True when some wavevector gives r(L) > 1 + kRadiusTolerance. Stops at the
/// first growing mode.
bool linearly_unstable(const StabilityProblem& prob, const Vec2& velocity, int kgrid_n = kDefaultKGrid);

struct SpeedScan {
  double tol = 0.01;
  /// Upper bound on |V| in absolute units; defaults to lambda when <= 0.
  double cap = 0.0;
  int kgrid_n = kDefaultKGrid;
};

/// Largest |V| along prob.theta, scanning up from 0 in steps of tol, such
/// that every step up to it is stable. kUnstableEverywhere if V = 0 fails.
/// Result is in lambda units.
double max_stable_speed(const StabilityProblem& prob, const SpeedScan& scan = {});

}  // namespace rvlbm

#endif  // RVLBM_VON_NEUMANN_HPP_
