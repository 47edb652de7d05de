#ifndef EOTMAP_METRICS_HPP
#define EOTMAP_METRICS_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "transport.hpp"

/**
 * @file metrics.hpp
 *
 * @brief Alignment and clustering quality measures, with the exact k-NN and
 * k-means routines they rely on. All distances are Euclidean.
 */

namespace eotmap::metrics {

/// k nearest neighbors of every point, self excluded, nearest first.
/// Ties are broken by the smaller index.
struct NeighborSets {
    Index k = 0;
    std::vector<std::vector<Index>> indices;
};

namespace detail {

inline void check_labels(const Eigen::MatrixXd& points, std::span<const int> labels, const char* who) {
    if (static_cast<Index>(labels.size()) != points.rows()) {
        throw DimensionError(std::string(who) + ": one label per point required");
    }
}

inline double squared_distance(const RowMatrix& pts, Index a, Index b) {
    const double* pa = pts.data() + a * pts.cols();
    const double* pb = pts.data() + b * pts.cols();
    double acc = 0.0;
    for (Index d = 0; d < pts.cols(); ++d) {
        const double diff = pa[d] - pb[d];
        acc += diff * diff;
    }
    return acc;
}

// Distinct labels in ascending order and, per point, the position of its label.
inline std::vector<int> dense_labels(std::span<const int> labels, std::vector<int>& distinct) {
    distinct.assign(labels.begin(), labels.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), labels[i]) - distinct.begin());
    }
    return out;
}

}  // namespace detail

/// Exact k nearest neighbors by brute force.
inline NeighborSets knn(const Eigen::MatrixXd& points, Index k) {
    const Index N = points.rows();
    if (k < 1 || k >= N) {
        throw InputError("knn: k must lie in [1, N-1] (k = " + std::to_string(k) + ", N = " + std::to_string(N) + ")");
    }
    const RowMatrix pts = points;
    NeighborSets out;
    out.k = k;
    out.indices.resize(static_cast<std::size_t>(N));
    parallel_for(0, N, [&](std::ptrdiff_t i) {
        std::vector<std::pair<double, Index>> cand;
        cand.reserve(static_cast<std::size_t>(N - 1));
        for (Index j = 0; j < N; ++j) {
            if (j != i) {
                cand.emplace_back(detail::squared_distance(pts, i, j), j);
            }
        }
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
        auto& dst = out.indices[static_cast<std::size_t>(i)];
        dst.resize(static_cast<std::size_t>(k));
        for (Index c = 0; c < k; ++c) {
            dst[static_cast<std::size_t>(c)] = cand[static_cast<std::size_t>(c)].second;
        }
    }, 8);
    return out;
}

/**
 * @brief Mean Jaccard overlap between the k-NN sets of each point in the
 * latent coordinates and in the embedding.
 *
 * Rows of both matrices are the pooled points of the two datasets, in the
 * same order; neighbors are searched in the pooled set.
 */
inline double jaccard_concordance(const Eigen::MatrixXd& embedded, const Eigen::MatrixXd& latent, Index k = 50) {
    if (embedded.rows() != latent.rows()) {
        throw DimensionError("jaccard_concordance: embedded and latent must have the same number of rows");
    }
    const NeighborSets in_latent = knn(latent, k);
    const NeighborSets in_embedding = knn(embedded, k);
    double total = 0.0;
    for (std::size_t i = 0; i < in_latent.indices.size(); ++i) {
        std::vector<Index> a = in_latent.indices[i];
        std::vector<Index> b = in_embedding.indices[i];
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        std::vector<Index> common;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
        const double inter = static_cast<double>(common.size());
        total += inter / (2.0 * static_cast<double>(k) - inter);
    }
    return total / static_cast<double>(in_latent.indices.size());
}

/// Fraction of point pairs on which two partitions agree (together in both,
/// or apart in both). Computed from the contingency table.
inline double rand_index(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) {
        throw DimensionError("rand_index: label vectors differ in length");
    }
    const std::size_t N = a.size();
    if (N < 2) {
        throw InputError("rand_index: need at least two points");
    }
    std::map<std::pair<int, int>, std::int64_t> joint;
    std::map<int, std::int64_t> ca;
    std::map<int, std::int64_t> cb;
    for (std::size_t i = 0; i < N; ++i) {
        ++joint[{a[i], b[i]}];
        ++ca[a[i]];
        ++cb[b[i]];
    }
    auto pairs = [](std::int64_t c) { return c * (c - 1) / 2; };
    std::int64_t same_both = 0;
    for (const auto& [key, c] : joint) {
        same_both += pairs(c);
    }
    std::int64_t same_a = 0;
    for (const auto& [key, c] : ca) {
        same_a += pairs(c);
    }
    std::int64_t same_b = 0;
    for (const auto& [key, c] : cb) {
        same_b += pairs(c);
    }
    const auto total = pairs(static_cast<std::int64_t>(N));
    const std::int64_t apart_both = total - same_a - same_b + same_both;
    return static_cast<double>(same_both + apart_both) / static_cast<double>(total);
}

/**
 * @brief Davies-Bouldin index, `(1/K) sum_k max_{j != k} (S_k + S_j) / M_kj`,
 * with S_k the root-mean-square distance of cluster k to its centroid and
 * M_kj the distance between centroids.
 *
 * Returns +infinity when two centroids coincide.
 */
inline double davies_bouldin(const Eigen::MatrixXd& points, std::span<const int> labels) {
    detail::check_labels(points, labels, "davies_bouldin");
    std::vector<int> distinct;
    const std::vector<int> ids = detail::dense_labels(labels, distinct);
    const auto K = static_cast<Index>(distinct.size());
    if (K < 2) {
        throw InputError("davies_bouldin: need at least two labels");
    }
    Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(K, points.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(K);
    for (Index i = 0; i < points.rows(); ++i) {
        centroids.row(ids[static_cast<std::size_t>(i)]) += points.row(i);
        counts[ids[static_cast<std::size_t>(i)]] += 1.0;
    }
    centroids.array().colwise() /= counts.array();
    Eigen::VectorXd scatter = Eigen::VectorXd::Zero(K);
    for (Index i = 0; i < points.rows(); ++i) {
        const int c = ids[static_cast<std::size_t>(i)];
        scatter[c] += (points.row(i) - centroids.row(c)).squaredNorm();
    }
    scatter = (scatter.array() / counts.array()).sqrt();

    double total = 0.0;
    for (Index k = 0; k < K; ++k) {
        double worst = 0.0;
        for (Index j = 0; j < K; ++j) {
            if (j == k) {
                continue;
            }
            const double sep = (centroids.row(k) - centroids.row(j)).norm();
            if (sep == 0.0) {
                return std::numeric_limits<double>::infinity();
            }
            worst = std::max(worst, (scatter[k] + scatter[j]) / sep);
        }
        total += worst;
    }
    return total / static_cast<double>(K);
}

/**
 * @brief Mean silhouette. For each point, a is the mean distance to the
 * other members of its cluster and b the smallest mean distance to another
 * cluster; s = 1 - a/b if a < b, 0 if a = b, b/a - 1 otherwise.
 * Members of singleton clusters get s = 0.
 */
inline double silhouette_mean(const Eigen::MatrixXd& points, std::span<const int> labels) {
    detail::check_labels(points, labels, "silhouette_mean");
    std::vector<int> distinct;
    const std::vector<int> ids = detail::dense_labels(labels, distinct);
    const auto K = static_cast<Index>(distinct.size());
    if (K < 2) {
        throw InputError("silhouette_mean: all points carry the same label");
    }
    const Index N = points.rows();
    std::vector<Index> sizes(static_cast<std::size_t>(K), 0);
    for (int c : ids) {
        ++sizes[static_cast<std::size_t>(c)];
    }
    const RowMatrix pts = points;
    std::vector<double> s(static_cast<std::size_t>(N), 0.0);
    parallel_for(0, N, [&](std::ptrdiff_t i) {
        const int own = ids[static_cast<std::size_t>(i)];
        if (sizes[static_cast<std::size_t>(own)] < 2) {
            return;
        }
        std::vector<double> sums(static_cast<std::size_t>(K), 0.0);
        for (Index j = 0; j < N; ++j) {
            if (j != i) {
                sums[static_cast<std::size_t>(ids[static_cast<std::size_t>(j)])] += std::sqrt(detail::squared_distance(pts, i, j));
            }
        }
        const double a = sums[static_cast<std::size_t>(own)] / static_cast<double>(sizes[static_cast<std::size_t>(own)] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (Index c = 0; c < K; ++c) {
            if (c != own) {
                b = std::min(b, sums[static_cast<std::size_t>(c)] / static_cast<double>(sizes[static_cast<std::size_t>(c)]));
            }
        }
        double v = 0.0;
        if (a < b) {
            v = 1.0 - a / b;
        } else if (a > b) {
            v = b / a - 1.0;
        }
        s[static_cast<std::size_t>(i)] = v;
    }, 8);
    return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(N);
}

/**
 * @brief Mean label purity of hyperspheres: around each point, the ball whose
 * radius is the distance to its k-th nearest neighbor; purity is the share
 * of the other points inside the ball that carry the same label.
 */
inline double neighbor_purity(const Eigen::MatrixXd& points, std::span<const int> labels, Index k = 50) {
    detail::check_labels(points, labels, "neighbor_purity");
    const Index N = points.rows();
    if (k < 1 || k >= N) {
        throw InputError("neighbor_purity: k must lie in [1, N-1]");
    }
    const RowMatrix pts = points;
    std::vector<double> purity(static_cast<std::size_t>(N), 0.0);
    parallel_for(0, N, [&](std::ptrdiff_t i) {
        std::vector<double> d2;
        d2.reserve(static_cast<std::size_t>(N - 1));
        for (Index j = 0; j < N; ++j) {
            if (j != i) {
                d2.push_back(detail::squared_distance(pts, i, j));
            }
        }
        std::vector<double> sorted = d2;
        std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
        const double radius2 = sorted[static_cast<std::size_t>(k - 1)];
        std::size_t inside = 0;
        std::size_t same = 0;
        std::size_t slot = 0;
        for (Index j = 0; j < N; ++j) {
            if (j == i) {
                continue;
            }
            if (d2[slot++] <= radius2) {
                ++inside;
                same += labels[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(i)] ? 1 : 0;
            }
        }
        purity[static_cast<std::size_t>(i)] = static_cast<double>(same) / static_cast<double>(inside);
    }, 8);
    return std::accumulate(purity.begin(), purity.end(), 0.0) / static_cast<double>(N);
}

struct KMeansResult {
    std::vector<int> labels;
    Eigen::MatrixXd centroids;
    /// Within-cluster sum of squared distances.
    double wcss = 0.0;
};

namespace detail {

inline KMeansResult lloyd(const RowMatrix& pts, Index k, RngStream& rng, int max_iter) {
    const Index N = pts.rows();
    const Index d = pts.cols();

    // Greedy k-means++: draw several D^2-weighted candidates per step, keep
    // the one that lowers the potential the most.
    const int trials = 2 + static_cast<int>(std::log(static_cast<double>(k)));
    RowMatrix centers(k, d);
    std::vector<double> closest(static_cast<std::size_t>(N));
    auto dist_to = [&](Index i, const double* c) {
        double acc = 0.0;
        for (Index t = 0; t < d; ++t) {
            const double diff = pts(i, t) - c[t];
            acc += diff * diff;
        }
        return acc;
    };
    const auto first = static_cast<Index>(rng.below(static_cast<std::uint64_t>(N)));
    centers.row(0) = pts.row(first);
    for (Index i = 0; i < N; ++i) {
        closest[static_cast<std::size_t>(i)] = dist_to(i, centers.row(0).data());
    }
    for (Index c = 1; c < k; ++c) {
        const double potential = std::accumulate(closest.begin(), closest.end(), 0.0);
        Index best_point = -1;
        double best_potential = std::numeric_limits<double>::infinity();
        for (int trial = 0; trial < trials; ++trial) {
            Index pick = N - 1;
            if (potential > 0.0) {
                double target = rng.uniform() * potential;
                for (Index i = 0; i < N; ++i) {
                    target -= closest[static_cast<std::size_t>(i)];
                    if (target < 0.0) {
                        pick = i;
                        break;
                    }
                }
            } else {
                pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(N)));
            }
            double pot = 0.0;
            for (Index i = 0; i < N; ++i) {
                pot += std::min(closest[static_cast<std::size_t>(i)], dist_to(i, pts.row(pick).data()));
            }
            if (pot < best_potential) {
                best_potential = pot;
                best_point = pick;
            }
        }
        centers.row(c) = pts.row(best_point);
        for (Index i = 0; i < N; ++i) {
            closest[static_cast<std::size_t>(i)] = std::min(closest[static_cast<std::size_t>(i)], dist_to(i, centers.row(c).data()));
        }
    }

    std::vector<int> assign(static_cast<std::size_t>(N), -1);
    std::vector<double> own_dist(static_cast<std::size_t>(N), 0.0);
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (Index i = 0; i < N; ++i) {
            int best = 0;
            double bd = dist_to(i, centers.row(0).data());
            for (Index c = 1; c < k; ++c) {
                const double dc = dist_to(i, centers.row(c).data());
                if (dc < bd) {
                    bd = dc;
                    best = static_cast<int>(c);
                }
            }
            own_dist[static_cast<std::size_t>(i)] = bd;
            if (assign[static_cast<std::size_t>(i)] != best) {
                assign[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }

        RowMatrix sums = RowMatrix::Zero(k, d);
        std::vector<Index> counts(static_cast<std::size_t>(k), 0);
        for (Index i = 0; i < N; ++i) {
            sums.row(assign[static_cast<std::size_t>(i)]) += pts.row(i);
            ++counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
        }
        for (Index c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
                continue;
            }
            // Empty cluster: move its centroid onto the worst-served point.
            const auto far = static_cast<Index>(std::max_element(own_dist.begin(), own_dist.end()) - own_dist.begin());
            centers.row(c) = pts.row(far);
            own_dist[static_cast<std::size_t>(far)] = 0.0;
            assign[static_cast<std::size_t>(far)] = static_cast<int>(c);
            changed = true;
        }
        if (!changed) {
            break;
        }
    }

    KMeansResult out;
    out.labels = assign;
    out.centroids = centers;
    out.wcss = 0.0;
    for (Index i = 0; i < N; ++i) {
        out.wcss += dist_to(i, centers.row(assign[static_cast<std::size_t>(i)]).data());
    }
    return out;
}

}  // namespace detail

/// Lloyd's algorithm from greedy k-means++ seeds; the best of `restarts`
/// runs by within-cluster sum of squares. Deterministic for a fixed seed.
inline KMeansResult kmeans(const Eigen::MatrixXd& points, Index k, std::uint64_t seed, int restarts = 10, int max_iter = 200) {
    const Index N = points.rows();
    if (k < 1 || k > N) {
        throw InputError("kmeans: k must lie in [1, N]");
    }
    if (restarts < 1 || max_iter < 1) {
        throw InputError("kmeans: restarts and max_iter must be positive");
    }
    if (!points.allFinite()) {
        throw InputError("kmeans: points must be finite");
    }
    const RowMatrix pts = points;
    std::vector<KMeansResult> runs(static_cast<std::size_t>(restarts));
    parallel_for(0, restarts, [&](std::ptrdiff_t r) {
        RngStream rng(seed, 0x6b6d65616e73ULL + static_cast<std::uint64_t>(r));
        runs[static_cast<std::size_t>(r)] = detail::lloyd(pts, k, rng, max_iter);
    }, 1);
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (runs[r].wcss < runs[best].wcss) {
            best = r;
        }
    }
    return std::move(runs[best]);
}

}  // namespace eotmap::metrics

#endif  // EOTMAP_METRICS_HPP
