#ifndef RVLBM_SPECTRAL_HPP_
#define RVLBM_SPECTRAL_HPP_

#include <complex>
#include <optional>

#include <Eigen/Dense>

namespace rvlbm {

/// Eigenvalues of a square complex matrix by Householder reduction to upper
/// Hessenberg form followed by single-shift QR with Wilkinson shifts and
/// deflation. Returns nullopt when the iteration budget (30 sweeps per
/// eigenvalue) is exhausted.
template <int N>
std::optional<Eigen::Matrix<std::complex<double>, N, 1>> hessenberg_qr_eigenvalues(
    Eigen::Matrix<std::complex<double>, N, N> h);

extern template std::optional<Eigen::Matrix<std::complex<double>, 9, 1>> hessenberg_qr_eigenvalues<9>(
    Eigen::Matrix<std::complex<double>, 9, 9>);
extern template std::optional<Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1>>
hessenberg_qr_eigenvalues<Eigen::Dynamic>(Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic>);

}  // namespace rvlbm

#endif  // RVLBM_SPECTRAL_HPP_
