#ifndef EOTMAP_TESTS_SUPPORT_HPP
#define EOTMAP_TESTS_SUPPORT_HPP

#include <eotmap/eotmap.hpp>

#include <Eigen/Dense>

#include <cstdint>

namespace eotmap::fixtures {

inline Eigen::MatrixXd gaussian_matrix(Index rows, Index cols, std::uint64_t seed, std::uint64_t stream = 0) {
    RngStream rng(seed, stream);
    Eigen::MatrixXd out(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            out(i, j) = rng.normal();
        }
    }
    return out;
}

inline DataMatrix gaussian_data(Index rows, Index cols, std::uint64_t seed, std::uint64_t stream = 0) {
    return DataMatrix(gaussian_matrix(rows, cols, seed, stream));
}

/// Orthonormal n x k basis from the QR factorization of a Gaussian matrix.
inline Eigen::MatrixXd random_orthonormal(Index n, Index k, std::uint64_t seed, std::uint64_t stream = 0) {
    const Eigen::MatrixXd G = gaussian_matrix(n, k, seed, stream);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    return qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
}

/// Plain multiplicative Sinkhorn-Knopp on an explicit kernel, run for a fixed
/// number of sweeps. Independent of the log-domain solver.
inline Eigen::MatrixXd reference_scaling(const Eigen::MatrixXd& K, int sweeps) {
    const auto m = static_cast<double>(K.rows());
    const auto n = static_cast<double>(K.cols());
    const double row_target = std::sqrt(n / m);
    const double col_target = std::sqrt(m / n);
    Eigen::VectorXd a = Eigen::VectorXd::Ones(K.rows());
    Eigen::VectorXd b = Eigen::VectorXd::Ones(K.cols());
    for (int s = 0; s < sweeps; ++s) {
        a = row_target * (K * b).cwiseInverse();
        b = col_target * (K.transpose() * a).cwiseInverse();
    }
    return a.asDiagonal() * K * b.asDiagonal();
}

inline double max_abs(const Eigen::MatrixXd& A) { return A.cwiseAbs().maxCoeff(); }

}  // namespace eotmap::fixtures

#endif  // EOTMAP_TESTS_SUPPORT_HPP
