#ifndef EOTMAP_TRANSPORT_HPP
#define EOTMAP_TRANSPORT_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "parallel.hpp"

/**
 * @file transport.hpp
 *
 * @brief Entropic optimal transport plan between two point clouds.
 *
 * The plan is the Gaussian kernel `K_ij = exp(-|x_i - y_j|^2 / eps)` scaled
 * on both sides, `W_ij = alpha_i K_ij beta_j`, so that every row of `W` sums
 * to `sqrt(n/m)` and every column to `sqrt(m/n)`. The entries therefore sum
 * to `sqrt(mn)` rather than one.
 */

namespace eotmap {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/**
 * @brief A converged entropic transport plan.
 *
 * `W` is always stored with the smaller dataset along the rows. When the
 * caller passed the larger dataset first, `swapped` is set and the rows of
 * `W` index the caller's second dataset; `caller_W()` restores the caller's
 * orientation.
 */
struct TransportPlan {
    Eigen::MatrixXd W;
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;
    /// Natural logs of alpha and beta; stay finite even when alpha/beta do not.
    Eigen::VectorXd log_alpha;
    Eigen::VectorXd log_beta;
    /// Kernel bandwidth in squared-distance units. NaN for plans built
    /// directly from a log-kernel.
    double epsilon = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    /// Largest absolute deviation of any row or column sum from its target.
    double marginal_residual = 0.0;
    bool swapped = false;

    Index rows() const noexcept { return W.rows(); }
    Index cols() const noexcept { return W.cols(); }

    double row_target() const { return std::sqrt(static_cast<double>(cols()) / static_cast<double>(rows())); }
    double col_target() const { return std::sqrt(static_cast<double>(rows()) / static_cast<double>(cols())); }

    Eigen::MatrixXd caller_W() const { return swapped ? Eigen::MatrixXd(W.transpose()) : W; }
};

struct SinkhornOptions {
    /// Stop once every row and column sum is within `tol` of its target, relatively.
    double tol = 1e-10;
    int max_iter = 10000;
};

/// Entry (i, j) is the squared Euclidean distance between row i of X and row j of Y.
inline Eigen::MatrixXd squared_distance_matrix(const DataMatrix& X, const DataMatrix& Y) {
    if (X.cols() != Y.cols()) {
        throw InputError("squared_distance_matrix: datasets have different dimensions (" + std::to_string(X.cols()) +
                         " vs " + std::to_string(Y.cols()) + ")");
    }
    const Index m = X.rows();
    const Index n = Y.rows();
    const Index p = X.cols();
    const RowMatrix xs = X.values();
    const RowMatrix ys = Y.values();
    RowMatrix D(m, n);
    parallel_for(0, m, [&](std::ptrdiff_t i) {
        const double* xi = xs.data() + i * p;
        for (Index j = 0; j < n; ++j) {
            const double* yj = ys.data() + j * p;
            double acc = 0.0;
            for (Index d = 0; d < p; ++d) {
                const double diff = xi[d] - yj[d];
                acc += diff * diff;
            }
            D(i, j) = acc;
        }
    }, 4);
    return D;
}

/// Median of all entries; the mean of the two central values for even counts.
inline double median_bandwidth(const Eigen::MatrixXd& D2) {
    if (D2.size() == 0) {
        throw InputError("median_bandwidth: empty distance matrix");
    }
    std::vector<double> vals(D2.data(), D2.data() + D2.size());
    const std::size_t n = vals.size();
    const std::size_t mid = n / 2;
    std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(mid), vals.end());
    double med = vals[mid];
    if (n % 2 == 0) {
        const double lower = *std::max_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(mid));
        med = 0.5 * (lower + med);
    }
    if (!(med > 0.0)) {
        throw DegenerateBandwidthError("median_bandwidth: median squared distance is zero");
    }
    return med;
}

/// Direct-form kernel exp(-D2 / eps). Throws if any entry underflows; use
/// the log-domain `sinkhorn` path in that case.
inline Eigen::MatrixXd gaussian_kernel(const Eigen::MatrixXd& D2, double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw InputError("gaussian_kernel: epsilon must be positive and finite");
    }
    Eigen::MatrixXd K = (-D2.array() / epsilon).exp().matrix();
    if ((K.array() <= 0.0).any()) {
        throw NumericalError("gaussian_kernel: kernel underflows to zero; use the log-domain path");
    }
    return K;
}

namespace detail {

// log(sum_k exp(a[k])) for a strided sequence, shifted by the maximum.
template <typename Get>
double log_sum_exp(Index count, Get&& get) {
    double mx = -std::numeric_limits<double>::infinity();
    for (Index k = 0; k < count; ++k) {
        mx = std::max(mx, get(k));
    }
    if (!std::isfinite(mx)) {
        return mx;
    }
    double acc = 0.0;
    for (Index k = 0; k < count; ++k) {
        acc += std::exp(get(k) - mx);
    }
    return mx + std::log(acc);
}

}  // namespace detail

/**
 * @brief Scales `exp(logK)` to the prescribed marginals.
 *
 * Alternates dual updates in the log domain, rows first and then columns.
 * After each full sweep the column sums are exact up to rounding; iteration
 * stops once every row sum is within `tol` of `sqrt(n/m)` relatively.
 * The scalar ambiguity in (alpha, beta) is resolved by `|alpha|_1 = |beta|_1`.
 */
inline TransportPlan sinkhorn(const Eigen::MatrixXd& logK, const SinkhornOptions& opts = {}) {
    const Index m = logK.rows();
    const Index n = logK.cols();
    if (m < 1 || n < 1) {
        throw DimensionError("sinkhorn: empty kernel");
    }
    if (!(opts.tol > 0.0)) {
        throw InputError("sinkhorn: tol must be positive");
    }
    if (!logK.allFinite()) {
        throw InputError("sinkhorn: log-kernel must be finite");
    }
    const double log_row_target = 0.5 * (std::log(static_cast<double>(n)) - std::log(static_cast<double>(m)));
    const double log_col_target = -log_row_target;

    const RowMatrix logK_rows = logK;
    Eigen::VectorXd f = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd row_lse(m);

    auto update_row_lse = [&] {
        parallel_for(0, m, [&](std::ptrdiff_t i) {
            const double* row = logK_rows.data() + i * n;
            row_lse[i] = detail::log_sum_exp(n, [&](Index j) { return row[j] + g[j]; });
        });
    };

    int iterations = 0;
    double residual = std::numeric_limits<double>::infinity();
    for (;;) {
        update_row_lse();
        if (iterations > 0) {
            residual = 0.0;
            for (Index i = 0; i < m; ++i) {
                residual = std::max(residual, std::abs(std::expm1(f[i] + row_lse[i] - log_row_target)));
            }
            if (!std::isfinite(residual)) {
                throw NumericalError("sinkhorn: non-finite marginals; epsilon is likely too small for the data scale");
            }
            if (residual <= opts.tol) {
                break;
            }
        }
        if (iterations >= opts.max_iter) {
            throw ConvergenceError("sinkhorn: no convergence after " + std::to_string(iterations) +
                                       " sweeps (residual " + std::to_string(residual) + ")",
                                   residual, iterations);
        }
        f = log_row_target - row_lse.array();
        parallel_for(0, n, [&](std::ptrdiff_t j) {
            const double* col = logK.data() + j * m;
            g[j] = log_col_target - detail::log_sum_exp(m, [&](Index i) { return col[i] + f[i]; });
        });
        if (!f.allFinite() || !g.allFinite()) {
            throw NumericalError("sinkhorn: non-finite dual variables; epsilon is likely too small for the data scale");
        }
        ++iterations;
    }

    const double log_alpha_mass = detail::log_sum_exp(m, [&](Index i) { return f[i]; });
    const double log_beta_mass = detail::log_sum_exp(n, [&](Index j) { return g[j]; });
    const double shift = 0.5 * (log_beta_mass - log_alpha_mass);
    f.array() += shift;
    g.array() -= shift;

    TransportPlan plan;
    plan.W.resize(m, n);
    parallel_for(0, n, [&](std::ptrdiff_t j) {
        for (Index i = 0; i < m; ++i) {
            plan.W(i, j) = std::exp(f[i] + logK(i, j) + g[j]);
        }
    });
    plan.log_alpha = f;
    plan.log_beta = g;
    plan.alpha = f.array().exp();
    plan.beta = g.array().exp();
    plan.iterations = iterations;

    const double row_target = std::exp(log_row_target);
    const double col_target = std::exp(log_col_target);
    const double row_err = (plan.W.rowwise().sum().array() - row_target).abs().maxCoeff();
    const double col_err = (plan.W.colwise().sum().array() - col_target).abs().maxCoeff();
    plan.marginal_residual = std::max(row_err, col_err);
    return plan;
}

/**
 * @brief Entropic transport plan between X and Y.
 *
 * `epsilon` empty means the median of all squared cross distances.
 * If X has more rows than Y the roles are exchanged internally and
 * `swapped` is set on the result.
 */
inline TransportPlan transport_plan(const DataMatrix& X, const DataMatrix& Y, std::optional<double> epsilon = std::nullopt,
                                    const SinkhornOptions& opts = {}) {
    if (X.cols() != Y.cols()) {
        throw InputError("transport_plan: datasets have different dimensions (" + std::to_string(X.cols()) + " vs " +
                         std::to_string(Y.cols()) + ")");
    }
    const bool swapped = X.rows() > Y.rows();
    const Eigen::MatrixXd D2 = swapped ? squared_distance_matrix(Y, X) : squared_distance_matrix(X, Y);
    double eps = 0.0;
    if (epsilon) {
        eps = *epsilon;
        if (!(eps > 0.0) || !std::isfinite(eps)) {
            throw InputError("transport_plan: epsilon must be positive and finite");
        }
    } else {
        eps = median_bandwidth(D2);
    }
    TransportPlan plan = sinkhorn(-D2 / eps, opts);
    plan.epsilon = eps;
    plan.swapped = swapped;
    return plan;
}

}  // namespace eotmap

#endif  // EOTMAP_TRANSPORT_HPP
