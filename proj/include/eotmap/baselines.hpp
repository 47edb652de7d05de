#ifndef EOTMAP_BASELINES_HPP
#define EOTMAP_BASELINES_HPP

#include <Eigen/Dense>

#include <string>
#include <utility>

#include "errors.hpp"
#include "linalg.hpp"

namespace eotmap::baselines {

/// Principal component scores: the centered data projected onto the top q
/// eigenvectors of the sample covariance, signs fixed by `linalg::normalize_sign`.
inline Eigen::MatrixXd pca_embed(const DataMatrix& X, Index q) {
    const Index m = X.rows();
    const Index p = X.cols();
    if (q < 1 || q > std::min(m - 1, p)) {
        throw DimensionError("pca_embed: q = " + std::to_string(q) + " must lie in [1, min(m-1, p)]");
    }
    const Eigen::MatrixXd centered = X.values().rowwise() - X.values().colwise().mean();
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(m - 1);
    const linalg::SymmetricEigen eig = linalg::symmetric_eigen(cov, q);
    return centered * eig.vectors;
}

/// PCA of the stacked data, split back into the blocks of X and Y.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> joint_pca_embed(const DataMatrix& X, const DataMatrix& Y, Index q) {
    if (X.cols() != Y.cols()) {
        throw DimensionError("joint_pca_embed: X and Y must have the same number of columns");
    }
    Eigen::MatrixXd stacked(X.rows() + Y.rows(), X.cols());
    stacked.topRows(X.rows()) = X.values();
    stacked.bottomRows(Y.rows()) = Y.values();
    const Eigen::MatrixXd scores = pca_embed(DataMatrix(std::move(stacked)), q);
    return {scores.topRows(X.rows()), scores.bottomRows(Y.rows())};
}

}  // namespace eotmap::baselines

#endif  // EOTMAP_BASELINES_HPP
