#include "rvlbm/von_neumann.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rvlbm/spectral.hpp"

namespace rvlbm {

Vec2 StabilityProblem::resolve_shift(const Vec2& velocity) const {
  switch (shift) {
    case LinearShift::Zero: return Vec2::Zero();
    case LinearShift::EqualsV: return velocity;
    case LinearShift::Fixed: return fixed_shift;
  }
  return Vec2::Zero();
}

Vec2 StabilityProblem::direction() const { return {std::cos(theta), std::sin(theta)}; }

Mat9 linear_collision(const StabilityProblem& prob, const Vec2& velocity) {
  const MomentMatrix m(prob.basis, prob.vset, prob.resolve_shift(velocity));
  const Mat9 e = linearized_equilibrium(prob.kind, velocity, prob.consts, prob.vset);
  const Mat9 dm = prob.s.as_vector().asDiagonal() * m.entries();
  return Mat9::Identity() + m.solve_matrix(dm) * (e - Mat9::Identity());
}

namespace {

inline CMat9 apply_transport(const Mat9& collision, const Vec2& k, const StabilityProblem& prob) {
  CMat9 l;
  for (int j = 0; j < kQ; ++j) {
    const double phase = prob.dt * k.dot(prob.vset.v[static_cast<std::size_t>(j)]);
    const std::complex<double> a(std::cos(phase), std::sin(phase));
    l.row(j) = a * collision.row(j).cast<std::complex<double>>();
  }
  return l;
}

// Fallback when the Hessenberg QR sweep budget runs out: Eigen's complex
// Schur iteration on a copy scaled to unit max-entry with a larger budget.
template <typename Matrix>
double fallback_radius(const Matrix& l) {
  const double scale = l.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw NumericalFailure("spectral_radius: matrix is not finite");
  }
  Eigen::ComplexEigenSolver<Matrix> solver;
  solver.setMaxIterations(200 * static_cast<Eigen::Index>(l.rows()));
  solver.compute(l / scale, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("spectral_radius: eigenvalue iteration did not converge");
  }
  return scale * solver.eigenvalues().cwiseAbs().maxCoeff();
}

template <int N>
double radius_impl(const Eigen::Matrix<std::complex<double>, N, N>& l) {
  if (l.rows() != l.cols()) {
    throw std::invalid_argument("spectral_radius: matrix must be square");
  }
  if (l.rows() == 0) return 0.0;
  if (!l.allFinite()) {
    throw NumericalFailure("spectral_radius: matrix is not finite");
  }
  if (auto eig = hessenberg_qr_eigenvalues<N>(l)) {
    return eig->cwiseAbs().maxCoeff();
  }
  return fallback_radius(l);
}

// The transport phases are 2 pi / dx-periodic in each wavevector component
// since dt * lambda = dx; scanning [0, 2 pi) in units of 1 / (dt lambda)
// covers the whole cell.
double wave_period(const StabilityProblem& prob) { return 2.0 * std::numbers::pi / (prob.dt * prob.vset.lambda); }

}  // namespace

CMat9 amplification(const StabilityProblem& prob, const Vec2& velocity, const Vec2& k) {
  return apply_transport(linear_collision(prob, velocity), k, prob);
}

double spectral_radius(const CMat9& l) { return radius_impl<kQ>(l); }
double spectral_radius(const Eigen::MatrixXcd& l) { return radius_impl<Eigen::Dynamic>(l); }

namespace {

// Scans the kgrid_n^2 grid, then hill-climbs from the kRefineSeeds strongest
// local maxima of the coarse grid, halving the step when no neighbour improves.
// Returns early once a radius exceeds `stop_above`.
constexpr int kRefineSeeds = 8;
constexpr double kRefineFloor = 1.0 / 256.0;

double scan_wavevectors(const StabilityProblem& prob, const Vec2& velocity, int kgrid_n,
                        double stop_above) {
  if (kgrid_n < 8) {
    throw std::invalid_argument("wavevector scan: kgrid_n must be at least 8");
  }
  const Mat9 collision = linear_collision(prob, velocity);
  const double h = wave_period(prob) / kgrid_n;
  double best = -1.0;
  auto probe = [&](const Vec2& k) {
    const double r = spectral_radius(apply_transport(collision, k, prob));
    best = std::max(best, r);
    return r;
  };
  // Family A moments have definite parity in each coordinate, so with V and
  // u~ on the x axis the spectrum at (kx, -ky) equals the one at (kx, ky).
  const Vec2 shift = prob.resolve_shift(velocity);
  const bool mirror_y = prob.basis.family == Family::A && velocity.y() == 0.0 && shift.y() == 0.0;
  const int b_end = mirror_y ? kgrid_n / 2 + 1 : kgrid_n;
  std::vector<double> grid(static_cast<std::size_t>(kgrid_n) * static_cast<std::size_t>(kgrid_n));
  auto at = [&](int a, int b) -> double& {
    a = (a % kgrid_n + kgrid_n) % kgrid_n;
    b = (b % kgrid_n + kgrid_n) % kgrid_n;
    if (mirror_y && b >= b_end) b = kgrid_n - b;
    return grid[static_cast<std::size_t>(a) * static_cast<std::size_t>(kgrid_n) + static_cast<std::size_t>(b)];
  };
  for (int a = 0; a < kgrid_n; ++a) {
    for (int b = 0; b < b_end; ++b) {
      at(a, b) = probe(Vec2(a * h, b * h));
      if (best > stop_above) return best;
    }
  }

  std::vector<std::pair<double, std::array<int, 2>>> peaks;
  for (int a = 0; a < kgrid_n; ++a) {
    for (int b = 0; b < b_end; ++b) {
      const double r = at(a, b);
      bool peak = true;
      for (int da = -1; da <= 1 && peak; ++da) {
        for (int db = -1; db <= 1; ++db) {
          if ((da != 0 || db != 0) && at(a + da, b + db) > r) {
            peak = false;
            break;
          }
        }
      }
      if (peak) peaks.push_back({r, {a, b}});
    }
  }
  const std::size_t seeds = std::min<std::size_t>(peaks.size(), kRefineSeeds);
  std::partial_sort(peaks.begin(), peaks.begin() + static_cast<std::ptrdiff_t>(seeds), peaks.end(),
                    [](const auto& x, const auto& y) { return x.first > y.first; });

  for (std::size_t p = 0; p < seeds; ++p) {
    Vec2 k(peaks[p].second[0] * h, peaks[p].second[1] * h);
    double r = peaks[p].first;
    double step = h / 2.0;
    while (step >= h * kRefineFloor) {
      Vec2 next = k;
      double next_r = r;
      for (int da = -1; da <= 1; ++da) {
        for (int db = -1; db <= 1; ++db) {
          if (da == 0 && db == 0) continue;
          const Vec2 trial = k + Vec2(da * step, db * step);
          const double tr = probe(trial);
          if (best > stop_above) return best;
          if (tr > next_r) {
            next_r = tr;
            next = trial;
          }
        }
      }
      if (next_r > r) {
        k = next;
        r = next_r;
      } else {
        step /= 2.0;
      }
    }
  }
  return best;
}

}  // namespace

double max_radius_over_k(const StabilityProblem& prob, const Vec2& velocity, int kgrid_n) {
  return scan_wavevectors(prob, velocity, kgrid_n, INFINITY);
}

bool linearly_unstable(const StabilityProblem& prob, const Vec2& velocity, int kgrid_n) {
  constexpr double limit = 1.0 + kRadiusTolerance;
  return scan_wavevectors(prob, velocity, kgrid_n, limit) > limit;
}

double max_stable_speed(const StabilityProblem& prob, const SpeedScan& scan) {
  if (!(scan.tol > 0.0)) {
    throw std::invalid_argument("max_stable_speed: tol must be positive");
  }
  const double lambda = prob.vset.lambda;
  const double cap = scan.cap > 0.0 ? scan.cap : lambda;
  const Vec2 dir = prob.direction();
  const long steps = static_cast<long>(std::floor(cap / (scan.tol * lambda) + 1e-9));
  double last = kUnstableEverywhere;
  for (long i = 0; i <= steps; ++i) {
    const double speed = static_cast<double>(i) * scan.tol;
    if (linearly_unstable(prob, speed * lambda * dir, scan.kgrid_n)) {
      break;
    }
    last = speed;
  }
  return last;
}

}  // namespace rvlbm
