#ifndef RVLBM_MOMENT_BASIS_HPP_
#define RVLBM_MOMENT_BASIS_HPP_

#include <string>

#include "rvlbm/lattice.hpp"
#include "rvlbm/types.hpp"

namespace rvlbm {

/// Two one-parameter polynomial families for the D2Q9 moments.
///
/// Family A: 1, X, Y, X^2+Y^2, X^2-Y^2, XY, X(aX^2+Y^2), Y(X^2+aY^2),
///           (a/2)(X^4+Y^4)+X^2Y^2
/// Family B: 1, X, Y, X^2+Y^2, X^2-Y^2, XY, XY^2+a(X^2+Y^2),
///           YX^2+a(X^2+Y^2), X^2Y^2
///
/// A with a=0 is the central-moment (cascaded) basis and A with a=1 the
/// classical one; B with a=0 coincides with A at a=0.
enum class Family { A, B };

struct MomentBasis {
  Family family = Family::A;
  double alpha = 0.0;

  /// (P_0(p), ..., P_8(p)).
  Vec9 eval(const Vec2& p) const;
  /// Writes P_k(p) to out[k * stride].
  void eval_into(double x, double y, double* out, int stride) const;
  /// Row k holds the gradient of P_k at p.
  Eigen::Matrix<double, kQ, 2> gradient(const Vec2& p) const;
};

std::string to_string(Family family);
Family parse_family(const std::string& text);

inline constexpr double kDefaultConditionLimit = 1e12;

/// M(u~) with entry (k, j) = P_k(v_j - u~), factored once at construction.
class MomentMatrix {
public:
  MomentMatrix(const MomentBasis& basis, const VelocitySet& vset, const Vec2& shift,
               double condition_limit = kDefaultConditionLimit);

  const Mat9& entries() const { return entries_; }
  const Vec2& shift() const { return shift_; }
  /// Reciprocal 1-norm condition estimate from the LU factors.
  double rcond() const { return rcond_; }
  const Eigen::PartialPivLU<Mat9>& lu() const { return lu_; }

  /// M^{-1} y.
  Vec9 solve(const Vec9& y) const { return lu_.solve(y); }
  /// M^{-1} Y.
  Mat9 solve_matrix(const Mat9& y) const { return lu_.solve(y); }

private:
  Mat9 entries_;
  Vec2 shift_;
  Eigen::PartialPivLU<Mat9> lu_;
  double rcond_;
};

/// Fills the raw entries P_k(v_j - shift) without factorizing.
Mat9 moment_entries(const MomentBasis& basis, const VelocitySet& vset, const Vec2& shift);

MomentMatrix moment_matrix(const MomentBasis& basis, const VelocitySet& vset, const Vec2& shift,
                           double condition_limit = kDefaultConditionLimit);

/// M^{-1}; throws DegenerateShiftError when 1/rcond exceeds the limit.
Mat9 invert(const MomentMatrix& m, double condition_limit = kDefaultConditionLimit);

/// Shift factorization M(u~) = T(u~) M(0), with M(0)^{-1} computed once.
///
/// T(u~) maps unshifted moments to shifted ones; the relaxation can be
/// written as M(0)^{-1} T^{-1} D T M(0).
class ShiftFactorization {
public:
  ShiftFactorization(const MomentBasis& basis, const VelocitySet& vset,
                     double condition_limit = kDefaultConditionLimit);

  /// T(u~) = M(u~) M(0)^{-1}.
  Mat9 transfer(const Vec2& shift) const;
  /// M(u~) reassembled as T(u~) M(0).
  Mat9 shifted(const Vec2& shift) const;
  /// M(u~)^{-1} = M(0)^{-1} T(u~)^{-1}.
  Mat9 shifted_inverse(const Vec2& shift) const;

  const Mat9& base() const { return base_; }
  const Mat9& base_inverse() const { return base_inverse_; }

private:
  MomentBasis basis_;
  VelocitySet vset_;
  double condition_limit_;
  Mat9 base_;
  Mat9 base_inverse_;
};

}  // namespace rvlbm

#endif  // RVLBM_MOMENT_BASIS_HPP_
