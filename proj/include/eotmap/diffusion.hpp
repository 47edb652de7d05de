#ifndef EOTMAP_DIFFUSION_HPP
#define EOTMAP_DIFFUSION_HPP

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "embedding.hpp"
#include "errors.hpp"

/**
 * @file diffusion.hpp
 *
 * @brief Diffusion distances of the random walk that alternates between the
 * two datasets, with transition matrix `P = [[0, sqrt(m/n) W], [sqrt(n/m) W^T, 0]]`.
 *
 * After t steps the blocks are
 *   XX = U S^t U^T,  XY = sqrt(m/n) U S^t V^T,
 *   YX = sqrt(n/m) V S^t U^T,  YY = V S^t V^T.
 * Only the blocks of matching parity (XX, YY for even t; XY, YX for odd t)
 * are true transition probabilities; the others are interpolations with the
 * same formula and may have negative entries.
 *
 * All indices here refer to the plan's stored orientation (the smaller
 * dataset is X). `caller_distance` translates from the caller's order.
 */

namespace eotmap {

enum class PairKind { XX, YY, XY, YX };

/// Full-rank spectral model together with the number of walk steps.
struct DiffusionContext {
    SpectralModel model;
    int t = 1;
    Index m = 0;
    Index n = 0;
};

struct BlockPowers {
    Eigen::MatrixXd XX;
    Eigen::MatrixXd XY;
    Eigen::MatrixXd YX;
    Eigen::MatrixXd YY;
};

inline DiffusionContext make_diffusion_context(SpectralModel model, int t, Index m, Index n) {
    if (t < 1) {
        throw InputError("diffusion: t must be a positive integer");
    }
    if (model.rank() != m || model.U.rows() != m || model.V.rows() != n) {
        throw InputError("diffusion: model must contain all m = " + std::to_string(m) + " singular triplets");
    }
    return DiffusionContext{std::move(model), t, m, n};
}

/// Builds the full-rank context directly from a converged plan.
inline DiffusionContext make_diffusion_context(const TransportPlan& plan, int t) {
    return make_diffusion_context(spectral_model(plan, plan.rows()), t, plan.rows(), plan.cols());
}

inline BlockPowers block_power(const DiffusionContext& ctx) {
    if (ctx.t < 1) {
        throw InputError("block_power: t must be at least 1");
    }
    const Eigen::VectorXd st = ctx.model.s.array().pow(static_cast<double>(ctx.t));
    const Eigen::MatrixXd& U = ctx.model.U;
    const Eigen::MatrixXd& V = ctx.model.V;
    const double ratio = std::sqrt(static_cast<double>(ctx.m) / static_cast<double>(ctx.n));
    const Eigen::MatrixXd US = U * st.asDiagonal();
    const Eigen::MatrixXd VS = V * st.asDiagonal();

    BlockPowers out;
    out.XX = US * U.transpose();
    out.XY = ratio * (US * V.transpose());
    out.YX = (1.0 / ratio) * (VS * U.transpose());
    out.YY = VS * V.transpose();
    return out;
}

namespace detail {

inline void check_pair(const DiffusionContext& ctx, PairKind kind, Index i, Index j) {
    const Index first = (kind == PairKind::XX || kind == PairKind::XY) ? ctx.m : ctx.n;
    const Index second = (kind == PairKind::XX || kind == PairKind::YX) ? ctx.m : ctx.n;
    if (i < 0 || i >= first || j < 0 || j >= second) {
        throw InputError("diffusion_distance: index out of range (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }
}

}  // namespace detail

/**
 * @brief Diffusion distance after t steps, from the singular triplets.
 *
 * XX: `sqrt(sum_{k>=2} s_k^{2t} (sqrt(m) u_k[i] - sqrt(m) u_k[j])^2)`,
 * YY analogously with `sqrt(n) v_k`, and XY (i in X, j in Y) with
 * `sqrt(m) u_k[i] - sqrt(n) v_k[j]`. YX takes (j in Y, i in X) and equals XY.
 * O(m) per pair; no n x n block is formed.
 */
inline double diffusion_distance(const DiffusionContext& ctx, PairKind kind, Index i, Index j) {
    detail::check_pair(ctx, kind, i, j);
    if (kind == PairKind::YX) {
        return diffusion_distance(ctx, PairKind::XY, j, i);
    }
    const double rm = std::sqrt(static_cast<double>(ctx.m));
    const double rn = std::sqrt(static_cast<double>(ctx.n));
    const auto& U = ctx.model.U;
    const auto& V = ctx.model.V;
    double acc = 0.0;
    for (Index k = 1; k < ctx.m; ++k) {
        double a = 0.0;
        double b = 0.0;
        switch (kind) {
            case PairKind::XX:
                a = rm * U(i, k);
                b = rm * U(j, k);
                break;
            case PairKind::YY:
                a = rn * V(i, k);
                b = rn * V(j, k);
                break;
            default:
                a = rm * U(i, k);
                b = rn * V(j, k);
                break;
        }
        const double w = std::pow(ctx.model.s[k], 2.0 * ctx.t);
        acc += w * (a - b) * (a - b);
    }
    return std::sqrt(acc);
}

/**
 * @brief Diffusion distance by its definition: a weighted Euclidean distance
 * between rows of the t-step blocks. Dense; intended for verification.
 *
 * XX uses `sqrt(m)|XX_i - XX_j|` for even t and `sqrt(n)|XY_i - XY_j|` for odd t;
 * YY uses `sqrt(n)|YY_i - YY_j|` or `sqrt(m)|YX_i - YX_j|`; XY compares
 * `sqrt(n)|XY_i - YY_j|` and YX compares `sqrt(m)|YX_j - XX_i|`.
 */
inline double diffusion_distance_by_definition(const BlockPowers& blocks, const DiffusionContext& ctx, PairKind kind, Index i,
                                               Index j) {
    detail::check_pair(ctx, kind, i, j);
    const double rm = std::sqrt(static_cast<double>(ctx.m));
    const double rn = std::sqrt(static_cast<double>(ctx.n));
    const bool even = ctx.t % 2 == 0;
    switch (kind) {
        case PairKind::XX:
            return even ? rm * (blocks.XX.row(i) - blocks.XX.row(j)).norm() : rn * (blocks.XY.row(i) - blocks.XY.row(j)).norm();
        case PairKind::YY:
            return even ? rn * (blocks.YY.row(i) - blocks.YY.row(j)).norm() : rm * (blocks.YX.row(i) - blocks.YX.row(j)).norm();
        case PairKind::XY:
            return rn * (blocks.XY.row(i) - blocks.YY.row(j)).norm();
        case PairKind::YX:
            return rm * (blocks.YX.row(i) - blocks.XX.row(j)).norm();
    }
    return 0.0;
}

/// Distance with indices in the caller's order: for a swapped plan the
/// caller's X is the stored Y and vice versa.
inline double caller_distance(const DiffusionContext& ctx, bool swapped, PairKind kind, Index i, Index j) {
    if (!swapped) {
        return diffusion_distance(ctx, kind, i, j);
    }
    switch (kind) {
        case PairKind::XX:
            return diffusion_distance(ctx, PairKind::YY, i, j);
        case PairKind::YY:
            return diffusion_distance(ctx, PairKind::XX, i, j);
        case PairKind::XY:
            return diffusion_distance(ctx, PairKind::YX, i, j);
        case PairKind::YX:
            return diffusion_distance(ctx, PairKind::XY, i, j);
    }
    return 0.0;
}

/**
 * @brief Bound on the squared-distance error of keeping only the leading
 * coordinates, where `s_next` is the largest discarded singular value.
 *
 * `(sqrt(m) + sqrt(n))^2 s^{2t}` for XY/YX pairs, `4 m s^{2t}` for XX and
 * `4 n s^{2t}` for YY.
 */
inline double truncation_bound(double s_next, int t, Index m, Index n, PairKind kind) {
    if (!(s_next >= 0.0 && s_next <= 1.0)) {
        throw InputError("truncation_bound: s_next must lie in [0, 1]");
    }
    if (t < 1) {
        throw InputError("truncation_bound: t must be a positive integer");
    }
    const double decay = std::pow(s_next, 2.0 * t);
    const double sm = static_cast<double>(m);
    const double sn = static_cast<double>(n);
    switch (kind) {
        case PairKind::XX:
            return 4.0 * sm * decay;
        case PairKind::YY:
            return 4.0 * sn * decay;
        default: {
            const double w = std::sqrt(sm) + std::sqrt(sn);
            return w * w * decay;
        }
    }
}

}  // namespace eotmap

#endif  // EOTMAP_DIFFUSION_HPP
