#include "rvlbm/collision.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "small_solve.hpp"

namespace rvlbm {

namespace {

void check_rate(double s, const char* what) {
  if (!(s >= 0.0 && s <= 2.0)) {
    std::ostringstream msg;
    msg << what << ": relaxation rate " << s << " outside [0, 2]";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

RelaxationVector::RelaxationVector(const std::array<double, kQ>& rates) : rates_(rates) {
  for (int k = 0; k < 3; ++k) {
    if (rates_[static_cast<std::size_t>(k)] != 0.0) {
      throw std::invalid_argument("RelaxationVector: conserved moments 0..2 must have zero rate");
    }
  }
  for (int k = 3; k < kQ; ++k) {
    check_rate(rates_[static_cast<std::size_t>(k)], "RelaxationVector");
  }
}

RelaxationVector RelaxationVector::bgk(double s) {
  check_rate(s, "bgk");
  return RelaxationVector({0.0, 0.0, 0.0, s, s, s, s, s, s});
}

bool RelaxationVector::is_bgk() const {
  for (int k = 4; k < kQ; ++k) {
    if (rates_[static_cast<std::size_t>(k)] != rates_[3]) return false;
  }
  return true;
}

RelaxationVector trt1(double s_e, double s_nu) {
  check_rate(s_e, "trt1");
  check_rate(s_nu, "trt1");
  return RelaxationVector({0.0, 0.0, 0.0, s_e, s_nu, s_nu, s_e, s_e, s_e});
}

RelaxationVector trt2(double s_e, double s_p) {
  check_rate(s_e, "trt2");
  check_rate(s_p, "trt2");
  return RelaxationVector({0.0, 0.0, 0.0, s_e, s_e, s_e, s_p, s_p, s_e});
}

double rate_from_exponent(int exponent) { return 2.0 - std::ldexp(1.0, -exponent); }

std::string to_string(RelaxationType type) {
  switch (type) {
    case RelaxationType::Trt1: return "trt1";
    case RelaxationType::Trt2: return "trt2";
    case RelaxationType::Bgk: return "bgk";
  }
  return "?";
}

RelaxationType parse_relaxation_type(const std::string& raw) {
  std::string text = raw;
  std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
  if (text == "trt1") return RelaxationType::Trt1;
  if (text == "trt2") return RelaxationType::Trt2;
  if (text == "bgk") return RelaxationType::Bgk;
  throw std::invalid_argument("unknown relaxation type '" + raw + "' (expected trt1, trt2 or bgk)");
}

double viscosity_to_rate(double viscosity, double lambda, double dt) {
  if (!(viscosity >= 0.0) || !std::isfinite(viscosity)) {
    throw std::invalid_argument("viscosity_to_rate: viscosity must be finite and non-negative");
  }
  if (!(dt > 0.0) || !(lambda > 0.0)) {
    throw std::invalid_argument("viscosity_to_rate: lambda and dt must be positive");
  }
  const double sigma = 3.0 * viscosity / (lambda * lambda * dt);
  const double s = 1.0 / (sigma + 0.5);
  if (!(s > 0.0 && s <= 2.0)) {
    throw std::invalid_argument("viscosity_to_rate: viscosity gives a rate outside (0, 2]");
  }
  return s;
}

double rate_to_viscosity(double rate, double lambda, double dt) {
  if (!(rate > 0.0 && rate <= 2.0)) {
    throw std::invalid_argument("rate_to_viscosity: rate must lie in (0, 2]");
  }
  return lambda * lambda * dt * (1.0 / rate - 0.5) / 3.0;
}

RatePair viscosity_to_rates(double mu, double nu, double lambda, double dt) {
  return {viscosity_to_rate(mu, lambda, dt), viscosity_to_rate(nu, lambda, dt)};
}

Vec2 UtildePolicy::resolve(const Vec2& fluid_velocity) const {
  switch (kind) {
    case Kind::Zero: return Vec2::Zero();
    case Kind::Fluid: return fluid_velocity;
    case Kind::ScaledFluid: return scale * fluid_velocity;
    case Kind::Fixed: return fixed;
  }
  return Vec2::Zero();
}

bool UtildePolicy::is_constant() const {
  return kind == Kind::Zero || kind == Kind::Fixed || (kind == Kind::ScaledFluid && scale == 0.0);
}

Vec2 UtildePolicy::constant_shift() const { return kind == Kind::Fixed ? fixed : Vec2::Zero(); }

std::string to_string(const UtildePolicy& policy) {
  std::ostringstream out;
  switch (policy.kind) {
    case UtildePolicy::Kind::Zero: out << "zero"; break;
    case UtildePolicy::Kind::Fluid: out << "fluid"; break;
    case UtildePolicy::Kind::ScaledFluid: out << "scaled:" << policy.scale; break;
    case UtildePolicy::Kind::Fixed: out << "fixed:" << policy.fixed.x() << ":" << policy.fixed.y(); break;
  }
  return out.str();
}

Vec9 relax(const Vec9& f, const MomentBasis& basis, const VelocitySet& vset,
           const LatticeConstants& consts, const Vec2& shift, const RelaxationVector& s,
           EquilibriumKind kind, double condition_limit) {
  const double rho = f.sum();
  if (!(rho > 0.0)) {
    throw StateBlowupError("relax: non-positive density");
  }
  Vec2 q = Vec2::Zero();
  for (int j = 0; j < kQ; ++j) q += f[j] * vset.v[j];
  const MomentMatrix m(basis, vset, shift, condition_limit);
  const Vec9 moments = m.entries() * f;
  const Vec9 eq_moments = m.entries() * feq(kind, rho, q / rho, consts, vset);
  const Vec9 relaxed = moments + s.as_vector().cwiseProduct(eq_moments - moments);
  return m.solve(relaxed);
}

CellCollider::CellCollider(const MomentBasis& basis, const VelocitySet& vset,
                           const LatticeConstants& consts, const RelaxationVector& s,
                           EquilibriumKind kind, const UtildePolicy& policy)
    : basis_(basis),
      vset_(vset),
      consts_(consts),
      s_(s),
      rates_(s.as_vector()),
      kind_(kind),
      policy_(policy) {
  if (policy.is_constant()) {
    const MomentMatrix m(basis, vset, policy.constant_shift());
    fused_ = m.solve_matrix(rates_.asDiagonal() * m.entries());
  }
}

void CellCollider::collide(double* f, double rho, const Vec2& u) const {
  Eigen::Map<Vec9> dist(f);
  const Vec9 deviation = feq(kind_, rho, u, consts_, vset_) - dist;
  if (fused_) {
    dist.noalias() += *fused_ * deviation;
    return;
  }
  // Shifted moments of the deviation, relaxed, then mapped back by solving
  // with M(u~). Rows 0..2 of M(u~) (feq - f) vanish for any shift.
  const Vec2 shift = policy_.resolve(u);
  std::array<double, kQ * kQ> m;
  for (int j = 0; j < kQ; ++j) {
    const Vec2& v = vset_.v[static_cast<std::size_t>(j)];
    basis_.eval_into(v.x() - shift.x(), v.y() - shift.y(), m.data() + j, kQ);
  }
  std::array<double, kQ> relaxed{};
  for (int k = 3; k < kQ; ++k) {
    double sum = 0.0;
    for (int j = 0; j < kQ; ++j) sum += m[static_cast<std::size_t>(k * kQ + j)] * deviation[j];
    relaxed[static_cast<std::size_t>(k)] = rates_[k] * sum;
  }
  if (!detail::solve_in_place<kQ>(m, relaxed.data())) {
    for (int j = 0; j < kQ; ++j) f[j] = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  for (int j = 0; j < kQ; ++j) f[j] += relaxed[static_cast<std::size_t>(j)];
}

}  // namespace rvlbm
