#include "rvlbm/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace rvlbm {

namespace {

using cd = std::complex<double>;

inline double abs1(const cd& z) { return std::abs(z.real()) + std::abs(z.imag()); }

// Rotation [c s; -conj(s) c] with real c mapping (x, y) to (r, 0).
struct Givens {
  double c;
  cd s;
};

inline Givens make_givens(const cd& x, const cd& y) {
  const double ax = std::abs(x);
  const double ay = std::abs(y);
  if (ay == 0.0) return {1.0, cd(0.0)};
  if (ax == 0.0) return {0.0, cd(1.0)};
  const double norm = std::hypot(ax, ay);
  return {ax / norm, (x / ax) * std::conj(y) / norm};
}

template <int N>
struct RotationStore {
  explicit RotationStore(int) {}
  Givens* data() { return rots.data(); }
  std::array<Givens, N> rots{};
};

template <>
struct RotationStore<Eigen::Dynamic> {
  explicit RotationStore(int n) : rots(static_cast<std::size_t>(n)) {}
  Givens* data() { return rots.data(); }
  std::vector<Givens> rots;
};

}  // namespace

template <int N>
std::optional<Eigen::Matrix<std::complex<double>, N, 1>> hessenberg_qr_eigenvalues(
    Eigen::Matrix<std::complex<double>, N, N> h) {
  const int n = static_cast<int>(h.rows());
  Eigen::Matrix<cd, N, 1> eig(n);
  if (n == 0) return eig;

  // Householder reduction to upper Hessenberg form.
  Eigen::Matrix<cd, N, 1> v(n);
  for (int k = 0; k + 2 < n; ++k) {
    const int len = n - k - 1;
    double norm2 = 0.0;
    for (int i = 0; i < len; ++i) norm2 += std::norm(h(k + 1 + i, k));
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) continue;
    const cd x0 = h(k + 1, k);
    const cd phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cd(1.0);
    const cd alpha = -phase * norm;
    for (int i = 0; i < len; ++i) v[i] = h(k + 1 + i, k);
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (int i = 0; i < len; ++i) vnorm2 += std::norm(v[i]);
    if (vnorm2 == 0.0) continue;
    const double beta = 2.0 / vnorm2;
    // H <- (I - beta v v^H) H on rows k+1..n-1.
    for (int col = k; col < n; ++col) {
      cd dot(0.0);
      for (int i = 0; i < len; ++i) dot += std::conj(v[i]) * h(k + 1 + i, col);
      dot *= beta;
      for (int i = 0; i < len; ++i) h(k + 1 + i, col) -= v[i] * dot;
    }
    // H <- H (I - beta v v^H) on columns k+1..n-1.
    for (int row = 0; row < n; ++row) {
      cd dot(0.0);
      for (int i = 0; i < len; ++i) dot += h(row, k + 1 + i) * v[i];
      dot *= beta;
      for (int i = 0; i < len; ++i) h(row, k + 1 + i) -= dot * std::conj(v[i]);
    }
    for (int i = 1; i < len; ++i) h(k + 1 + i, k) = cd(0.0);
  }

  constexpr double eps = std::numeric_limits<double>::epsilon();
  const int max_iter = 30 * n;
  int hi = n - 1;
  int iter = 0;
  int total = 0;
  RotationStore<N> store(n);
  Givens* rots = store.data();
  while (hi >= 0) {
    int lo = hi;
    while (lo > 0) {
      const double scale = abs1(h(lo - 1, lo - 1)) + abs1(h(lo, lo));
      if (abs1(h(lo, lo - 1)) <= eps * (scale > 0.0 ? scale : 1.0)) {
        h(lo, lo - 1) = cd(0.0);
        break;
      }
      --lo;
    }
    if (lo == hi) {
      eig[hi] = h(hi, hi);
      --hi;
      iter = 0;
      continue;
    }
    if (++total > max_iter) return std::nullopt;

    ++iter;

    cd shift;
    if (iter % 10 == 0) {
      // Exceptional shift to break cycles.
      shift = h(hi, hi) + cd(0.75 * std::abs(h(hi, hi - 1)), 0.0);
    } else {
      const cd a = h(hi - 1, hi - 1);
      const cd b = h(hi - 1, hi);
      const cd c = h(hi, hi - 1);
      const cd d = h(hi, hi);
      const cd half = 0.5 * (a - d);
      const cd disc = std::sqrt(half * half + b * c);
      const cd mu1 = 0.5 * (a + d) + disc;
      const cd mu2 = 0.5 * (a + d) - disc;
      shift = std::abs(mu1 - d) < std::abs(mu2 - d) ? mu1 : mu2;
    }

    for (int i = lo; i <= hi; ++i) h(i, i) -= shift;
    // QR: rotate rows so the active block becomes upper triangular.
    for (int k = lo; k < hi; ++k) {
      const Givens g = make_givens(h(k, k), h(k + 1, k));
      rots[k - lo] = g;
      for (int col = k; col <= hi; ++col) {
        const cd x = h(k, col);
        const cd y = h(k + 1, col);
        h(k, col) = g.c * x + g.s * y;
        h(k + 1, col) = -std::conj(g.s) * x + g.c * y;
      }
    }
    // RQ: apply the adjoint rotations from the right.
    for (int k = lo; k < hi; ++k) {
      const Givens g = rots[k - lo];
      const int last = std::min(k + 1, hi);
      for (int row = lo; row <= last; ++row) {
        const cd x = h(row, k);
        const cd y = h(row, k + 1);
        h(row, k) = g.c * x + std::conj(g.s) * y;
        h(row, k + 1) = -g.s * x + g.c * y;
      }
    }
    for (int i = lo; i <= hi; ++i) h(i, i) += shift;
  }
  return eig;
}

template std::optional<Eigen::Matrix<std::complex<double>, 9, 1>> hessenberg_qr_eigenvalues<9>(
    Eigen::Matrix<std::complex<double>, 9, 9>);
template std::optional<Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1>>
hessenberg_qr_eigenvalues<Eigen::Dynamic>(Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic>);

}  // namespace rvlbm
