#ifndef EOTMAP_EMBEDDING_HPP
#define EOTMAP_EMBEDDING_HPP

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "transport.hpp"

/**
 * @file embedding.hpp
 *
 * @brief Joint embedding of two datasets from the singular vectors of their
 * transport plan.
 *
 * With `W = U S V^T` and the trivial pair `(1, 1/sqrt(m), 1/sqrt(n))` removed,
 * point i of the first dataset maps to `sqrt(m) * (s_k^t u_k[i])_{k=2..q+1}`
 * and point j of the second to `sqrt(n) * (s_k^t v_k[j])_{k=2..q+1}`.
 * For t = 0 this pair minimizes the transport cost of the embedded points
 * among all zero-mean, unit-variance, uncorrelated coordinate sets.
 * For integer t > 0, Euclidean distances in the full embedding are diffusion
 * distances of the bipartite random walk (see diffusion.hpp); for
 * non-integer t only the scaling interpretation applies.
 */

namespace eotmap {

/// Leading singular triplets of a transport plan, in the plan's stored orientation.
struct SpectralModel {
    Eigen::VectorXd s;
    Eigen::MatrixXd U;
    Eigen::MatrixXd V;
    bool trivial_certified = false;

    Index rank() const noexcept { return s.size(); }
};

/// Embedded datasets in the caller's order: `Xt` for the first dataset passed.
struct JointEmbedding {
    Eigen::MatrixXd Xt;
    Eigen::MatrixXd Yt;
    Index q = 0;
    double t = 0.0;
    /// s_2 ... s_{q+1}.
    Eigen::VectorXd s_used;
    /// s_{q+1} and s_{q+2} coincide to 1e-12: the last coordinate is only
    /// defined up to a rotation within the tied subspace.
    bool near_degenerate = false;
};

struct DimensionChoice {
    Index q = 1;
    /// No ratio qualified and q fell back to 1.
    bool degenerate = false;
};

inline constexpr double kTrivialPairTolerance = 1e-6;
inline constexpr double kDefaultEigengap = 0.02;

/**
 * @brief Leading `k` singular triplets of `plan.W`, with the trivial pair
 * checked against `(1, 1/sqrt(m), 1/sqrt(n))`.
 *
 * @throws PlanNotConvergedError if the leading pair deviates by more than
 * 1e-6, which in practice means the Sinkhorn tolerance was too loose.
 */
inline SpectralModel spectral_model(const TransportPlan& plan, Index k) {
    const Index m = plan.rows();
    const Index n = plan.cols();
    if (k < 1 || k > m) {
        throw DimensionError("spectral_model: k must lie in [1, m] with m = " + std::to_string(m));
    }
    linalg::SvdResult svd = linalg::truncated_svd(plan.W, k);

    const double u_trivial = 1.0 / std::sqrt(static_cast<double>(m));
    const double v_trivial = 1.0 / std::sqrt(static_cast<double>(n));
    const double s1_err = std::abs(svd.s[0] - 1.0);
    const double u_err = (svd.U.col(0).array() - u_trivial).abs().maxCoeff();
    const double v_err = (svd.V.col(0).array() - v_trivial).abs().maxCoeff();
    if (s1_err > kTrivialPairTolerance || u_err > kTrivialPairTolerance || v_err > kTrivialPairTolerance) {
        throw PlanNotConvergedError("spectral_model: leading singular pair is not trivial (|s1-1| = " +
                                    std::to_string(s1_err) + ", |u1 - 1/sqrt(m)| = " + std::to_string(u_err) +
                                    ", |v1 - 1/sqrt(n)| = " + std::to_string(v_err) + ")");
    }

    SpectralModel model;
    model.s = std::move(svd.s);
    model.U = std::move(svd.U);
    model.V = std::move(svd.V);
    model.trivial_certified = true;
    return model;
}

/**
 * @brief Eigengap rule: the largest i with `s_i / s_{i+1} >= 1 + threshold`.
 *
 * `s` holds the singular values including `s_1`, in descending order. A zero
 * denominator counts as an infinite ratio. Falls back to q = 1 with the
 * `degenerate` flag when nothing qualifies.
 */
inline DimensionChoice select_dimension(std::span<const double> s, double threshold = kDefaultEigengap) {
    if (s.size() < 2) {
        throw InputError("select_dimension: need at least two singular values");
    }
    for (double v : s) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw InputError("select_dimension: singular values must be finite and nonnegative");
        }
    }
    DimensionChoice choice{1, true};
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double ratio = s[i + 1] == 0.0 ? std::numeric_limits<double>::infinity() : s[i] / s[i + 1];
        if (ratio >= 1.0 + threshold) {
            choice.q = static_cast<Index>(i + 1);
            choice.degenerate = false;
        }
    }
    return choice;
}

/**
 * @brief Singular values of the plan that the Gram-matrix route resolves.
 *
 * Values below `sqrt(m * machine_eps) * s_1` are dominated by rounding and
 * are dropped so that the eigengap rule does not chase noise.
 */
inline Eigen::VectorXd resolved_spectrum(const TransportPlan& plan) {
    const Eigen::VectorXd s = linalg::singular_values(plan.W);
    const double floor = std::sqrt(static_cast<double>(plan.rows()) * std::numeric_limits<double>::epsilon()) * s[0];
    Index keep = 0;
    while (keep < s.size() && s[keep] > floor) {
        ++keep;
    }
    return s.head(std::max<Index>(keep, std::min<Index>(2, s.size())));
}

/// Default embedding dimension for a plan: eigengap rule over the resolved spectrum.
inline DimensionChoice auto_dimension(const TransportPlan& plan, double threshold = kDefaultEigengap) {
    if (plan.rows() < 2) {
        throw DimensionError("auto_dimension: the smaller dataset needs at least two points");
    }
    const Eigen::VectorXd s = resolved_spectrum(plan);
    DimensionChoice choice = select_dimension(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())), threshold);
    choice.q = std::min<Index>(choice.q, plan.rows() - 1);
    return choice;
}

/// Assembles the embedding from an already converged plan.
inline JointEmbedding embed_from_plan(const TransportPlan& plan, Index q, double t) {
    const Index m = plan.rows();
    const Index n = plan.cols();
    if (q < 1 || q > m - 1) {
        throw DimensionError("eot_eigenmaps: q = " + std::to_string(q) + " must lie in [1, m-1] with m = " +
                             std::to_string(m));
    }
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw InputError("eot_eigenmaps: t must be a finite nonnegative number");
    }
    const Index k = std::min<Index>(q + 2, m);
    const SpectralModel model = spectral_model(plan, k);

    const double root_m = std::sqrt(static_cast<double>(m));
    const double root_n = std::sqrt(static_cast<double>(n));
    Eigen::MatrixXd left(m, q);
    Eigen::MatrixXd right(n, q);
    JointEmbedding emb;
    emb.s_used = model.s.segment(1, q);
    for (Index c = 0; c < q; ++c) {
        const double w = std::pow(model.s[c + 1], t);
        left.col(c) = root_m * w * model.U.col(c + 1);
        right.col(c) = root_n * w * model.V.col(c + 1);
    }
    emb.q = q;
    emb.t = t;
    emb.near_degenerate = (q + 2 <= m) && std::abs(model.s[q] - model.s[q + 1]) <= 1e-12;
    if (plan.swapped) {
        emb.Xt = std::move(right);
        emb.Yt = std::move(left);
    } else {
        emb.Xt = std::move(left);
        emb.Yt = std::move(right);
    }
    return emb;
}

struct EmbedOptions {
    /// Empty selects q by the eigengap rule.
    std::optional<Index> q;
    double t = 0.0;
    /// Empty uses the median squared cross distance.
    std::optional<double> epsilon;
    SinkhornOptions sinkhorn;
    double eigengap = kDefaultEigengap;
};

/// Transport plan plus embedding, for callers that want both.
struct EmbeddingRun {
    TransportPlan plan;
    JointEmbedding embedding;
    DimensionChoice dimension;
};

inline EmbeddingRun eot_eigenmaps_run(const DataMatrix& X, const DataMatrix& Y, const EmbedOptions& opts = {}) {
    EmbeddingRun run;
    run.plan = transport_plan(X, Y, opts.epsilon, opts.sinkhorn);
    if (opts.q) {
        run.dimension = {*opts.q, false};
    } else {
        run.dimension = auto_dimension(run.plan, opts.eigengap);
    }
    run.embedding = embed_from_plan(run.plan, run.dimension.q, opts.t);
    return run;
}

/// Embeds X and Y jointly into q dimensions.
inline JointEmbedding eot_eigenmaps(const DataMatrix& X, const DataMatrix& Y, Index q, double t = 0.0,
                                    std::optional<double> epsilon = std::nullopt, const SinkhornOptions& sinkhorn_opts = {}) {
    const TransportPlan plan = transport_plan(X, Y, epsilon, sinkhorn_opts);
    return embed_from_plan(plan, q, t);
}

/**
 * @brief Transport cost of the embedded points under the plan,
 * `sum_ij |xt_i - yt_j|^2 W_ij`, evaluated term by term.
 */
inline double embedding_cost(const JointEmbedding& emb, const TransportPlan& plan) {
    const Eigen::MatrixXd W = plan.caller_W();
    if (emb.Xt.rows() != W.rows() || emb.Yt.rows() != W.cols() || emb.Xt.cols() != emb.Yt.cols()) {
        throw DimensionError("embedding_cost: embedding and plan shapes disagree");
    }
    const RowMatrix xs = emb.Xt;
    const RowMatrix ys = emb.Yt;
    const Index q = xs.cols();
    std::vector<double> per_row(static_cast<std::size_t>(W.rows()), 0.0);
    parallel_for(0, W.rows(), [&](std::ptrdiff_t i) {
        double acc = 0.0;
        for (Index j = 0; j < W.cols(); ++j) {
            double d2 = 0.0;
            for (Index c = 0; c < q; ++c) {
                const double diff = xs(i, c) - ys(j, c);
                d2 += diff * diff;
            }
            acc += d2 * W(i, j);
        }
        per_row[static_cast<std::size_t>(i)] = acc;
    });
    double total = 0.0;
    for (double v : per_row) {
        total += v;
    }
    return total;
}

}  // namespace eotmap

#endif  // EOTMAP_EMBEDDING_HPP
