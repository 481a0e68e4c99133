#include "rvlbm/moment_basis.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rvlbm {

DegenerateShiftError::DegenerateShiftError(const Vec2& shift, double condition)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << "moment matrix is singular or ill-conditioned at shift (" << shift.x() << ", "
            << shift.y() << "), condition estimate " << condition;
        return msg.str();
      }()),
      shift_(shift),
      condition_(condition) {}

Vec9 MomentBasis::eval(const Vec2& p) const {
  const double x = p.x();
  const double y = p.y();
  const double x2 = x * x;
  const double y2 = y * y;
  const double a = alpha;
  Vec9 out;
  out << 1.0, x, y, x2 + y2, x2 - y2, x * y, 0.0, 0.0, 0.0;
  if (family == Family::A) {
    out[6] = x * (a * x2 + y2);
    out[7] = y * (x2 + a * y2);
    out[8] = 0.5 * a * (x2 * x2 + y2 * y2) + x2 * y2;
  } else {
    out[6] = x * y2 + a * (x2 + y2);
    out[7] = y * x2 + a * (x2 + y2);
    out[8] = x2 * y2;
  }
  return out;
}

void MomentBasis::eval_into(double x, double y, double* out, int stride) const {
  const double x2 = x * x;
  const double y2 = y * y;
  const double a = alpha;
  out[0] = 1.0;
  out[stride] = x;
  out[2 * stride] = y;
  out[3 * stride] = x2 + y2;
  out[4 * stride] = x2 - y2;
  out[5 * stride] = x * y;
  if (family == Family::A) {
    out[6 * stride] = x * (a * x2 + y2);
    out[7 * stride] = y * (x2 + a * y2);
    out[8 * stride] = 0.5 * a * (x2 * x2 + y2 * y2) + x2 * y2;
  } else {
    out[6 * stride] = x * y2 + a * (x2 + y2);
    out[7 * stride] = y * x2 + a * (x2 + y2);
    out[8 * stride] = x2 * y2;
  }
}

Eigen::Matrix<double, kQ, 2> MomentBasis::gradient(const Vec2& p) const {
  const double x = p.x();
  const double y = p.y();
  const double a = alpha;
  Eigen::Matrix<double, kQ, 2> g;
  g.row(0) << 0.0, 0.0;
  g.row(1) << 1.0, 0.0;
  g.row(2) << 0.0, 1.0;
  g.row(3) << 2.0 * x, 2.0 * y;
  g.row(4) << 2.0 * x, -2.0 * y;
  g.row(5) << y, x;
  if (family == Family::A) {
    g.row(6) << 3.0 * a * x * x + y * y, 2.0 * x * y;
    g.row(7) << 2.0 * x * y, x * x + 3.0 * a * y * y;
    g.row(8) << 2.0 * a * x * x * x + 2.0 * x * y * y, 2.0 * a * y * y * y + 2.0 * x * x * y;
  } else {
    g.row(6) << y * y + 2.0 * a * x, 2.0 * x * y + 2.0 * a * y;
    g.row(7) << 2.0 * x * y + 2.0 * a * x, x * x + 2.0 * a * y;
    g.row(8) << 2.0 * x * y * y, 2.0 * x * x * y;
  }
  return g;
}

std::string to_string(Family family) { return family == Family::A ? "A" : "B"; }

Family parse_family(const std::string& text) {
  if (text == "A" || text == "a") return Family::A;
  if (text == "B" || text == "b") return Family::B;
  throw std::invalid_argument("unknown moment family '" + text + "' (expected A or B)");
}

Mat9 moment_entries(const MomentBasis& basis, const VelocitySet& vset, const Vec2& shift) {
  Mat9 m;
  for (int j = 0; j < kQ; ++j) {
    m.col(j) = basis.eval(vset.v[j] - shift);
  }
  return m;
}

namespace {

// Entries scale like lambda^4 in the last row; condition is measured on the
// lambda = 1 image so the threshold does not depend on the velocity scale.
double scaled_rcond(const Mat9& entries, double lambda) {
  Mat9 scaled = entries;
  const Eigen::Array<double, kQ, 1> degree =
      (Eigen::Array<double, kQ, 1>() << 0, 1, 1, 2, 2, 2, 3, 3, 4).finished();
  for (int k = 0; k < kQ; ++k) {
    scaled.row(k) /= std::pow(lambda, degree[k]);
  }
  Eigen::PartialPivLU<Mat9> lu(scaled);
  return lu.rcond();
}

}  // namespace

MomentMatrix::MomentMatrix(const MomentBasis& basis, const VelocitySet& vset, const Vec2& shift,
                           double condition_limit)
    : entries_(moment_entries(basis, vset, shift)), shift_(shift) {
  lu_.compute(entries_);
  rcond_ = vset.lambda == 1.0 ? lu_.rcond() : scaled_rcond(entries_, vset.lambda);
  if (!(rcond_ > 0.0) || !std::isfinite(rcond_) || 1.0 / rcond_ > condition_limit) {
    throw DegenerateShiftError(shift, rcond_ > 0.0 ? 1.0 / rcond_ : INFINITY);
  }
}

MomentMatrix moment_matrix(const MomentBasis& basis, const VelocitySet& vset, const Vec2& shift,
                           double condition_limit) {
  return MomentMatrix(basis, vset, shift, condition_limit);
}

Mat9 invert(const MomentMatrix& m, double condition_limit) {
  if (1.0 / m.rcond() > condition_limit) {
    throw DegenerateShiftError(m.shift(), 1.0 / m.rcond());
  }
  return m.lu().inverse();
}

ShiftFactorization::ShiftFactorization(const MomentBasis& basis, const VelocitySet& vset,
                                       double condition_limit)
    : basis_(basis), vset_(vset), condition_limit_(condition_limit) {
  const MomentMatrix m0(basis, vset, Vec2::Zero(), condition_limit);
  base_ = m0.entries();
  base_inverse_ = m0.lu().inverse();
}

Mat9 ShiftFactorization::transfer(const Vec2& shift) const {
  return moment_entries(basis_, vset_, shift) * base_inverse_;
}

Mat9 ShiftFactorization::shifted(const Vec2& shift) const { return transfer(shift) * base_; }

Mat9 ShiftFactorization::shifted_inverse(const Vec2& shift) const {
  const Mat9 t = transfer(shift);
  Eigen::PartialPivLU<Mat9> lu(t);
  const double rc = lu.rcond();
  if (!(rc > 0.0) || 1.0 / rc > condition_limit_) {
    throw DegenerateShiftError(shift, rc > 0.0 ? 1.0 / rc : INFINITY);
  }
  return base_inverse_ * lu.inverse();
}

}  // namespace rvlbm
