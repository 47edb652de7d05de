#include "support.hpp"

#include "lapack_oracle.hpp"

#include <gtest/gtest.h>

using namespace eotmap;
using namespace eotmap::baselines;
using eotmap::fixtures::gaussian_matrix;
using eotmap::fixtures::max_abs;

namespace {

double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd ca = a.array() - a.mean();
    const Eigen::VectorXd cb = b.array() - b.mean();
    return ca.dot(cb) / (ca.norm() * cb.norm());
}

}  // namespace

TEST(Pca, PointsOnALine) {
    const Eigen::VectorXd t = gaussian_matrix(40, 1, 1);
    Eigen::Vector4d direction(1.0, -2.0, 0.5, 3.0);
    const Eigen::MatrixXd X = t * direction.transpose();
    const Eigen::MatrixXd scores = pca_embed(DataMatrix(X), 1);
    EXPECT_NEAR(std::abs(correlation(scores.col(0), t)), 1.0, 1e-12);
    EXPECT_NEAR(scores.col(0).norm(), (t.array() - t.mean()).matrix().norm() * direction.norm(), 1e-9);
}

TEST(Pca, FullRankIsAnIsometry) {
    const Eigen::MatrixXd X = gaussian_matrix(30, 5, 2);
    const Eigen::MatrixXd scores = pca_embed(DataMatrix(X), 5);
    const Eigen::MatrixXd centered = X.rowwise() - X.colwise().mean();
    for (Index i = 0; i < 30; i += 3) {
        for (Index j = 0; j < 30; j += 4) {
            EXPECT_NEAR((scores.row(i) - scores.row(j)).norm(), (centered.row(i) - centered.row(j)).norm(), 1e-10);
        }
    }
}

TEST(Pca, ScoreVariancesAreCovarianceEigenvalues) {
    Eigen::MatrixXd X = gaussian_matrix(200, 6, 3);
    X.col(0) *= 5.0;
    X.col(3) *= 2.0;
    const Eigen::MatrixXd scores = pca_embed(DataMatrix(X), 3);
    const Eigen::MatrixXd centered = X.rowwise() - X.colwise().mean();
    const Eigen::MatrixXd cov = centered.transpose() * centered / 199.0;
    const Eigen::VectorXd oracle = oracle::symmetric_eigenvalues(cov);
    const Eigen::MatrixXd score_cov = scores.transpose() * scores / 199.0;
    for (Index k = 0; k < 3; ++k) {
        EXPECT_NEAR(score_cov(k, k), oracle[5 - k], 1e-9);
        EXPECT_NEAR(scores.col(k).mean(), 0.0, 1e-10);
    }
    EXPECT_LE(max_abs(score_cov - Eigen::MatrixXd(score_cov.diagonal().asDiagonal())), 1e-9);
}

TEST(Pca, Errors) {
    const DataMatrix X(gaussian_matrix(4, 6, 4));
    EXPECT_THROW(pca_embed(X, 0), DimensionError);
    EXPECT_THROW(pca_embed(X, 4), DimensionError);
    EXPECT_NO_THROW(pca_embed(X, 3));
    EXPECT_THROW(joint_pca_embed(X, DataMatrix(gaussian_matrix(4, 5, 5)), 2), DimensionError);
}

TEST(JointPca, IdenticalInputsGiveIdenticalBlocks) {
    const DataMatrix X(gaussian_matrix(25, 4, 6));
    const auto [a, b] = joint_pca_embed(X, X, 2);
    EXPECT_EQ(a.rows(), 25);
    EXPECT_LE(max_abs(a - b), 1e-12);
}

TEST(JointPca, ShiftedCopyIsDominatedByTheShift) {
    // A translated copy puts the dataset indicator on the first component,
    // which is the failure mode the transport embedding is meant to avoid.
    const Eigen::MatrixXd X = gaussian_matrix(100, 5, 7);
    Eigen::MatrixXd Y = X;
    Y.col(2).array() += 20.0;
    const auto [a, b] = joint_pca_embed(DataMatrix(X), DataMatrix(Y), 1);
    Eigen::VectorXd pooled(200);
    pooled << a.col(0), b.col(0);
    Eigen::VectorXd indicator(200);
    indicator << Eigen::VectorXd::Zero(100), Eigen::VectorXd::Ones(100);
    EXPECT_GT(std::abs(correlation(pooled, indicator)), 0.99);
}

TEST(JointPca, TranslatingBothDatasetsTogetherChangesNothing) {
    const Eigen::MatrixXd X = gaussian_matrix(40, 3, 8);
    const Eigen::MatrixXd Y = gaussian_matrix(50, 3, 9) * 2.0;
    const Eigen::RowVector3d shift(4.0, -1.0, 7.0);
    const auto [a, b] = joint_pca_embed(DataMatrix(X), DataMatrix(Y), 2);
    const auto [c, d] = joint_pca_embed(DataMatrix(X.rowwise() + shift), DataMatrix(Y.rowwise() + shift), 2);
    EXPECT_LE(max_abs(a - c), 1e-9);
    EXPECT_LE(max_abs(b - d), 1e-9);
}
