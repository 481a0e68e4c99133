#ifndef RVLBM_TYPES_HPP_
#define RVLBM_TYPES_HPP_

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rvlbm {

inline constexpr int kQ = 9;

using Vec2 = Eigen::Vector2d;
using Vec9 = Eigen::Matrix<double, kQ, 1>;
using Mat9 = Eigen::Matrix<double, kQ, kQ>;
using CMat9 = Eigen::Matrix<std::complex<double>, kQ, kQ>;

/// Thrown when M(u~) cannot be inverted reliably at the requested shift.
class DegenerateShiftError : public std::runtime_error {
public:
  DegenerateShiftError(const Vec2& shift, double condition);

  const Vec2& shift() const { return shift_; }
  double condition() const { return condition_; }

private:
  Vec2 shift_;
  double condition_;
};

/// A local state that cannot be relaxed (non-positive density).
class StateBlowupError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NumericalFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace rvlbm

#endif  // RVLBM_TYPES_HPP_
