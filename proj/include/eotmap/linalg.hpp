#ifndef EOTMAP_LINALG_HPP
#define EOTMAP_LINALG_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

/**
 * @file linalg.hpp
 *
 * @brief Dense matrix container and the two decompositions used throughout:
 * a truncated SVD and a symmetric eigendecomposition, both with a
 * deterministic sign convention.
 */

namespace eotmap {

using Index = Eigen::Index;

/**
 * @brief A dataset of `rows()` points in `cols()` ambient dimensions.
 *
 * Construction rejects empty or non-finite input, so every downstream
 * routine can assume a well-formed point cloud.
 */
class DataMatrix {
public:
    explicit DataMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
        if (values_.rows() < 1 || values_.cols() < 1) {
            throw DimensionError("DataMatrix needs at least one row and one column");
        }
        if (!values_.allFinite()) {
            throw InputError("DataMatrix entries must be finite");
        }
    }

    Index rows() const noexcept { return values_.rows(); }
    Index cols() const noexcept { return values_.cols(); }
    const Eigen::MatrixXd& values() const noexcept { return values_; }

private:
    Eigen::MatrixXd values_;
};

namespace linalg {

/// Leading singular triplets, singular values in descending order.
struct SvdResult {
    Eigen::VectorXd s;
    Eigen::MatrixXd U;
    Eigen::MatrixXd V;
};

/// Leading eigenpairs of a symmetric matrix, values in descending order.
struct SymmetricEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

/// Flips `v` so that its entry of largest magnitude is positive. The first
/// such entry wins on exact ties. Returns true if the vector was flipped.
inline bool normalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > best_abs) {
            best_abs = a;
            best = i;
        }
    }
    if (v.size() > 0 && v[best] < 0.0) {
        v = -v;
        return true;
    }
    return false;
}

namespace detail {

inline void require_finite(const Eigen::MatrixXd& A, const char* what) {
    if (!A.allFinite()) {
        throw InputError(std::string(what) + ": input contains non-finite entries");
    }
}

// Full eigendecomposition of a symmetric matrix, reordered to descending
// eigenvalues. Equal eigenvalues keep the solver's (ascending-index) order.
inline SymmetricEigen descending_eigen(const Eigen::MatrixXd& sym) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("symmetric eigensolver did not converge");
    }
    const Index n = sym.rows();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    const auto& vals = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return vals[a] > vals[b]; });

    SymmetricEigen out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Index k = 0; k < n; ++k) {
        out.values[k] = vals[order[static_cast<std::size_t>(k)]];
        out.vectors.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
    }
    return out;
}

// Two passes of modified Gram-Schmidt on column k against columns [0, k).
// Columns that collapse are replaced by the first standard basis vector that
// survives orthogonalization.
inline void orthonormalize_column(Eigen::MatrixXd& Q, Index k) {
    auto project_out = [&](Eigen::Ref<Eigen::VectorXd> v) {
        for (int pass = 0; pass < 2; ++pass) {
            for (Index j = 0; j < k; ++j) {
                v -= Q.col(j).dot(v) * Q.col(j);
            }
        }
    };
    Eigen::VectorXd v = Q.col(k);
    project_out(v);
    double norm = v.norm();
    for (Index e = 0; norm < 1e-8 && e < Q.rows(); ++e) {
        v.setZero();
        v[e] = 1.0;
        project_out(v);
        norm = v.norm();
    }
    Q.col(k) = v / norm;
}

}  // namespace detail

/**
 * @brief Leading `k` eigenpairs of a symmetric matrix, by algebraic value.
 *
 * Each eigenvector is sign-normalized so that its largest-magnitude entry is
 * positive.
 */
inline SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& A, Index k) {
    if (A.rows() != A.cols()) {
        throw DimensionError("symmetric_eigen: matrix must be square");
    }
    if (k < 1 || k > A.rows()) {
        throw DimensionError("symmetric_eigen: k must lie in [1, n]");
    }
    detail::require_finite(A, "symmetric_eigen");
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw InputError("symmetric_eigen: matrix is not symmetric");
    }
    const Eigen::MatrixXd sym = 0.5 * (A + A.transpose());
    SymmetricEigen full = detail::descending_eigen(sym);

    SymmetricEigen out;
    out.values = full.values.head(k);
    out.vectors = full.vectors.leftCols(k);
    for (Index c = 0; c < k; ++c) {
        normalize_sign(out.vectors.col(c));
    }
    return out;
}

/**
 * @brief Leading `k` singular triplets of `A`.
 *
 * Works through the eigendecomposition of the smaller Gram matrix. The
 * partner vectors are recovered as `A^T u / s` (or `A v / s`) and then
 * re-orthogonalized; for singular values below `1e-12 * s_1` they are
 * completed to an orthonormal set.
 *
 * Sign convention: the largest-magnitude entry of each left vector is
 * positive and the right vector is chosen so that `u^T A v >= 0`.
 */
inline SvdResult truncated_svd(const Eigen::MatrixXd& A, Index k) {
    const Index m = A.rows();
    const Index n = A.cols();
    if (m < 1 || n < 1) {
        throw DimensionError("truncated_svd: empty matrix");
    }
    if (k < 1 || k > std::min(m, n)) {
        throw DimensionError("truncated_svd: k must lie in [1, min(rows, cols)]");
    }
    detail::require_finite(A, "truncated_svd");

    const bool left_gram = m <= n;
    const Eigen::MatrixXd gram = left_gram ? Eigen::MatrixXd(A * A.transpose()) : Eigen::MatrixXd(A.transpose() * A);
    SymmetricEigen eig = detail::descending_eigen(0.5 * (gram + gram.transpose()));

    SvdResult out;
    out.s.resize(k);
    for (Index c = 0; c < k; ++c) {
        out.s[c] = std::sqrt(std::max(eig.values[c], 0.0));
    }
    const double floor = 1e-12 * std::max(out.s[0], 0.0);

    Eigen::MatrixXd primary = eig.vectors.leftCols(k);
    Eigen::MatrixXd partner(left_gram ? n : m, k);
    for (Index c = 0; c < k; ++c) {
        if (out.s[c] > floor && out.s[c] > 0.0) {
            partner.col(c) = (left_gram ? Eigen::VectorXd(A.transpose() * primary.col(c))
                                        : Eigen::VectorXd(A * primary.col(c))) /
                             out.s[c];
        } else {
            partner.col(c).setZero();
        }
        detail::orthonormalize_column(partner, c);
    }

    if (left_gram) {
        out.U = std::move(primary);
        out.V = std::move(partner);
    } else {
        out.U = std::move(partner);
        out.V = std::move(primary);
    }
    for (Index c = 0; c < k; ++c) {
        if (normalize_sign(out.U.col(c))) {
            out.V.col(c) = -out.V.col(c);
        }
        if (out.U.col(c).dot(A * out.V.col(c)) < 0.0) {
            out.V.col(c) = -out.V.col(c);
        }
    }
    return out;
}

/// Singular values only, all min(m, n) of them, descending.
inline Eigen::VectorXd singular_values(const Eigen::MatrixXd& A) {
    detail::require_finite(A, "singular_values");
    const Eigen::MatrixXd gram = A.rows() <= A.cols() ? Eigen::MatrixXd(A * A.transpose()) : Eigen::MatrixXd(A.transpose() * A);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (gram + gram.transpose()), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("symmetric eigensolver did not converge");
    }
    Eigen::VectorXd vals = solver.eigenvalues().reverse();
    return vals.cwiseMax(0.0).cwiseSqrt();
}

}  // namespace linalg
}  // namespace eotmap

#endif  // EOTMAP_LINALG_HPP
