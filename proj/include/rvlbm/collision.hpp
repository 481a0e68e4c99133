#ifndef RVLBM_COLLISION_HPP_
#define RVLBM_COLLISION_HPP_

#include <array>
#include <optional>
#include <string>

#include "rvlbm/equilibrium.hpp"
#include "rvlbm/lattice.hpp"
#include "rvlbm/moment_basis.hpp"
#include "rvlbm/types.hpp"

namespace rvlbm {

/// Relaxation rates aligned with the moment indices. The first three
/// (density and momentum) are always zero; the others lie in [0, 2].
class RelaxationVector {
public:
  RelaxationVector() = default;
  /// Validates the conserved entries and the [0, 2] range.
  explicit RelaxationVector(const std::array<double, kQ>& rates);

  static RelaxationVector bgk(double s);

  double operator[](int k) const { return rates_[static_cast<std::size_t>(k)]; }
  const std::array<double, kQ>& rates() const { return rates_; }
  Vec9 as_vector() const { return Vec9(rates_.data()); }
  /// True when all non-conserved rates coincide.
  bool is_bgk() const;

  friend bool operator==(const RelaxationVector&, const RelaxationVector&) = default;

private:
  std::array<double, kQ> rates_{};
};

/// (s_e, s_nu, s_nu, s_e, s_e, s_e) on moments 3..8.
RelaxationVector trt1(double s_e, double s_nu);
/// (s_e, s_e, s_e, s_p, s_p, s_e) on moments 3..8.
RelaxationVector trt2(double s_e, double s_p);
/// The tables' parameterization s = 2 - 2^{-exponent}.
double rate_from_exponent(int exponent);

enum class RelaxationType { Trt1, Trt2, Bgk };
std::string to_string(RelaxationType type);
RelaxationType parse_relaxation_type(const std::string& text);

struct RatePair {
  double s_e = 0.0;
  double s_nu = 0.0;
};

/// s = 1 / (3 visc / (lambda^2 dt) + 1/2).
double viscosity_to_rate(double viscosity, double lambda, double dt);
double rate_to_viscosity(double rate, double lambda, double dt);
RatePair viscosity_to_rates(double mu, double nu, double lambda, double dt);

/// How the relaxation frame velocity is chosen in each cell.
struct UtildePolicy {
  enum class Kind { Zero, Fluid, ScaledFluid, Fixed };

  Kind kind = Kind::Zero;
  double scale = 1.0;
  Vec2 fixed = Vec2::Zero();

  static UtildePolicy zero() { return {}; }
  static UtildePolicy fluid() { return {Kind::Fluid, 1.0, Vec2::Zero()}; }
  static UtildePolicy scaled_fluid(double c) { return {Kind::ScaledFluid, c, Vec2::Zero()}; }
  static UtildePolicy fixed_at(const Vec2& w) { return {Kind::Fixed, 1.0, w}; }

  Vec2 resolve(const Vec2& fluid_velocity) const;
  /// The shift does not depend on the local state.
  bool is_constant() const;
  /// The shift for constant policies.
  Vec2 constant_shift() const;
};

std::string to_string(const UtildePolicy& policy);

/// One collision: m = M(u~) f, m* = m + s (meq - m), f* = M(u~)^{-1} m*,
/// with meq = M(u~) feq(rho, q / rho) and (rho, q) taken from f.
/// Throws StateBlowupError for rho <= 0 and DegenerateShiftError when
/// M(u~) is not invertible.
Vec9 relax(const Vec9& f, const MomentBasis& basis, const VelocitySet& vset,
           const LatticeConstants& consts, const Vec2& shift, const RelaxationVector& s,
           EquilibriumKind kind, double condition_limit = kDefaultConditionLimit);

/// Per-cell collision kernel used by the time stepper.
///
/// For constant shifts the operator M^{-1} D M is assembled once; otherwise
/// M(u~) is rebuilt and factored in each call.
class CellCollider {
public:
  CellCollider(const MomentBasis& basis, const VelocitySet& vset, const LatticeConstants& consts,
               const RelaxationVector& s, EquilibriumKind kind, const UtildePolicy& policy);

  /// Relaxes f in place given its density and velocity (rho > 0 assumed).
  void collide(double* f, double rho, const Vec2& u) const;

  bool fused() const { return fused_.has_value(); }

private:
  MomentBasis basis_;
  VelocitySet vset_;
  LatticeConstants consts_;
  RelaxationVector s_;
  Vec9 rates_;
  EquilibriumKind kind_;
  UtildePolicy policy_;
  std::optional<Mat9> fused_;
};

}  // namespace rvlbm

#endif  // RVLBM_COLLISION_HPP_
