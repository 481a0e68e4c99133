#ifndef RVLBM_SMALL_SOLVE_HPP_
#define RVLBM_SMALL_SOLVE_HPP_

#include <array>
#include <cmath>
#include <utility>

namespace rvlbm::detail {

/// Solves A x = b for a row-major N x N system by Gaussian elimination with
/// partial pivoting. A and b are overwritten; b holds x on return. Returns
/// false on an exactly zero pivot.
template <int N>
inline bool solve_in_place(std::array<double, N * N>& a, double* b) {
  for (int k = 0; k < N; ++k) {
    int piv = k;
    double best = std::abs(a[k * N + k]);
    for (int i = k + 1; i < N; ++i) {
      const double v = std::abs(a[i * N + k]);
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) return false;
    if (piv != k) {
      for (int j = k; j < N; ++j) std::swap(a[k * N + j], a[piv * N + j]);
      std::swap(b[k], b[piv]);
    }
    const double inv = 1.0 / a[k * N + k];
    for (int i = k + 1; i < N; ++i) {
      const double factor = a[i * N + k] * inv;
      if (factor == 0.0) continue;
      for (int j = k + 1; j < N; ++j) a[i * N + j] -= factor * a[k * N + j];
      b[i] -= factor * b[k];
    }
  }
  for (int i = N - 1; i >= 0; --i) {
    double sum = b[i];
    for (int j = i + 1; j < N; ++j) sum -= a[i * N + j] * b[j];
    b[i] = sum / a[i * N + i];
  }
  return true;
}

}  // namespace rvlbm::detail

#endif  // RVLBM_SMALL_SOLVE_HPP_
