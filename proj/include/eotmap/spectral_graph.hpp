#ifndef EOTMAP_SPECTRAL_GRAPH_HPP
#define EOTMAP_SPECTRAL_GRAPH_HPP

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "embedding.hpp"
#include "errors.hpp"
#include "transport.hpp"

/**
 * @file spectral_graph.hpp
 *
 * @brief Dense operators of the bipartite graph whose edge weights are the
 * transport plan, and the closed-form spectrum they are known to have.
 *
 * This is a verification surface: everything here is dense in (m + n) and
 * is limited to m + n <= 5000.
 */

namespace eotmap {

inline constexpr Index kMaxDenseGraphSize = 5000;

/**
 * Adjacency `What = [[0, W], [W^T, 0]]`, Laplacian `L = I - What`,
 * `D = diag(sqrt(m) I_m, sqrt(n) I_n)`, `Ltilde = D L D^{-1}` and the
 * random-walk matrix `P = I - Ltilde = D What D^{-1}`.
 */
struct BipartiteOperators {
    Index m = 0;
    Index n = 0;
    Eigen::MatrixXd What;
    Eigen::MatrixXd L;
    Eigen::VectorXd d;
    Eigen::MatrixXd Ltilde;
    Eigen::MatrixXd P;

    Eigen::MatrixXd W() const { return What.topRightCorner(m, n); }
};

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// of L (`phi`, by column) and of Ltilde (`psi = D phi / |D phi|`).
struct PredictedSpectrum {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd phi;
    Eigen::MatrixXd psi;
};

struct QuadraticForm {
    /// f^T L f.
    double matrix_form = 0.0;
    /// (1/sqrt(mn)) sum_ij (sqrt(m) g_i - sqrt(n) h_j)^2 W_ij with f = [g; h].
    double weighted_sum = 0.0;
};

inline BipartiteOperators build_operators(const TransportPlan& plan) {
    const Index m = plan.rows();
    const Index n = plan.cols();
    if (m + n > kMaxDenseGraphSize) {
        throw DimensionError("build_operators: dense graph operators are limited to m + n <= 5000");
    }
    const double row_scale = std::sqrt(static_cast<double>(m) / static_cast<double>(n));
    const double col_scale = 1.0 / row_scale;
    const double row_dev = (plan.W.rowwise().sum().array() * row_scale - 1.0).abs().maxCoeff();
    const double col_dev = (plan.W.colwise().sum().array() * col_scale - 1.0).abs().maxCoeff();
    if (row_dev > 1e-9 || col_dev > 1e-9) {
        throw PlanNotConvergedError("build_operators: marginals deviate by " + std::to_string(std::max(row_dev, col_dev)) +
                                    "; the random walk would not be row-stochastic");
    }

    BipartiteOperators ops;
    ops.m = m;
    ops.n = n;
    const Index N = m + n;
    ops.What = Eigen::MatrixXd::Zero(N, N);
    ops.What.topRightCorner(m, n) = plan.W;
    ops.What.bottomLeftCorner(n, m) = plan.W.transpose();
    ops.L = Eigen::MatrixXd::Identity(N, N) - ops.What;

    ops.d.resize(N);
    ops.d.head(m).setConstant(std::sqrt(static_cast<double>(m)));
    ops.d.tail(n).setConstant(std::sqrt(static_cast<double>(n)));
    ops.Ltilde = ops.d.asDiagonal() * ops.L * ops.d.cwiseInverse().asDiagonal();

    ops.P = Eigen::MatrixXd::Zero(N, N);
    ops.P.topRightCorner(m, n) = row_scale * plan.W;
    ops.P.bottomLeftCorner(n, m) = col_scale * plan.W.transpose();
    return ops;
}

/**
 * @brief Spectrum of L implied by the singular values of W:
 * `{0, 1-s_2, ..., 1-s_m, 1 (n-m times), 1+s_m, ..., 1+s_2, 2}`.
 *
 * The eigenvectors are `[u_k; v_k]/sqrt(2)` and `[u_k; -v_k]/sqrt(2)`, plus
 * `[0; v]` for any orthonormal completion v of the right singular vectors.
 * The model must hold all m triplets.
 */
inline PredictedSpectrum predicted_spectrum(const SpectralModel& model, Index m, Index n) {
    if (model.rank() != m || model.U.rows() != m || model.V.rows() != n || m > n) {
        throw InputError("predicted_spectrum: model must contain all m singular triplets of an m x n plan with m <= n");
    }
    const Index N = m + n;
    PredictedSpectrum out;
    out.eigenvalues.resize(N);
    out.phi = Eigen::MatrixXd::Zero(N, N);
    const double inv_root2 = 1.0 / std::sqrt(2.0);
    const double sm = static_cast<double>(m);
    const double sn = static_cast<double>(n);

    // Trivial pair at both ends of the spectrum.
    out.eigenvalues[0] = 0.0;
    out.phi.col(0).head(m).setConstant(1.0 / std::sqrt(2.0 * sm));
    out.phi.col(0).tail(n).setConstant(1.0 / std::sqrt(2.0 * sn));
    out.eigenvalues[N - 1] = 2.0;
    out.phi.col(N - 1).head(m).setConstant(1.0 / std::sqrt(2.0 * sm));
    out.phi.col(N - 1).tail(n).setConstant(-1.0 / std::sqrt(2.0 * sn));

    for (Index k = 1; k < m; ++k) {
        out.eigenvalues[k] = 1.0 - model.s[k];
        out.phi.col(k).head(m) = inv_root2 * model.U.col(k);
        out.phi.col(k).tail(n) = inv_root2 * model.V.col(k);

        const Index mirror = N - 1 - k;
        out.eigenvalues[mirror] = 1.0 + model.s[k];
        out.phi.col(mirror).head(m) = inv_root2 * model.U.col(k);
        out.phi.col(mirror).tail(n) = -inv_root2 * model.V.col(k);
    }

    if (n > m) {
        // Orthonormal completion of span(V) from a full Householder QR.
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(model.V);
        const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
        for (Index c = 0; c < n - m; ++c) {
            out.eigenvalues[m + c] = 1.0;
            out.phi.col(m + c).tail(n) = Q.col(m + c);
        }
    }

    Eigen::VectorXd d(N);
    d.head(m).setConstant(std::sqrt(sm));
    d.tail(n).setConstant(std::sqrt(sn));
    out.psi = d.asDiagonal() * out.phi;
    for (Index c = 0; c < N; ++c) {
        out.psi.col(c).normalize();
    }
    return out;
}

/// Evaluates f^T L f both as a matrix product and as the weighted
/// difference sum over graph edges.
inline QuadraticForm quadratic_form(const BipartiteOperators& ops, const Eigen::VectorXd& f) {
    if (f.size() != ops.m + ops.n) {
        throw DimensionError("quadratic_form: vector length must be m + n");
    }
    QuadraticForm out;
    out.matrix_form = f.dot(ops.L * f);

    const double rm = std::sqrt(static_cast<double>(ops.m));
    const double rn = std::sqrt(static_cast<double>(ops.n));
    double acc = 0.0;
    for (Index j = 0; j < ops.n; ++j) {
        const double hj = rn * f[ops.m + j];
        for (Index i = 0; i < ops.m; ++i) {
            const double diff = rm * f[i] - hj;
            acc += diff * diff * ops.What(i, ops.m + j);
        }
    }
    out.weighted_sum = acc / (rm * rn);
    return out;
}

}  // namespace eotmap

#endif  // EOTMAP_SPECTRAL_GRAPH_HPP
