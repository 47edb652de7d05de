#ifndef EOTMAP_SIMULATE_HPP
#define EOTMAP_SIMULATE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "random.hpp"

/**
 * @file simulate.hpp
 *
 * @brief Seeded generators for the shared latent manifold model
 *
 *     x_i = nu1 + a1 U xbar_i + V1 z1_i + eta1_i
 *     y_j = nu2 + a2 U ybar_j + V2 z2_j + eta2_j
 *
 * with U, V1, V2 mutually orthogonal orthonormal bases, and for the two
 * benchmark families built on it (torus alignment, Gaussian-mixture joint
 * clustering).
 *
 * Every random quantity comes from its own counter-based stream keyed by
 * (seed, dataset, role), so outputs are bitwise identical for any thread
 * count.
 */

namespace eotmap::simulate {

enum class Dataset : std::uint64_t { first = 1, second = 2 };

enum class Role : std::uint64_t { latent = 0, nuisance = 1, noise = 2 };

/// Stream identifier for one (dataset, role) pair.
constexpr std::uint64_t stream_id(Dataset which, Role role) {
    return (static_cast<std::uint64_t>(which) * 16 + static_cast<std::uint64_t>(role)) * 8;
}

inline constexpr double kTorusMajorRadius = 2.0;
inline constexpr double kTorusMinorRadius = 0.8;
inline constexpr int kMixtureClasses = 6;
inline constexpr double kMixtureMeanScale = 5.0;

struct LatentSample {
    DataMatrix points;
    /// Class ids for mixture samples; empty for manifold samples.
    std::optional<std::vector<int>> labels;
};

/// Per-point nuisance coordinates z: either absent or i.i.d. uniform on [lo, hi].
struct NuisanceSpec {
    enum class Kind { none, uniform };
    Kind kind = Kind::none;
    double lo = 0.0;
    double hi = 0.0;

    static NuisanceSpec none() { return {}; }
    static NuisanceSpec uniform(double lo, double hi) { return {Kind::uniform, lo, hi}; }
};

/**
 * @brief Gaussian noise with a per-entry standard deviation.
 *
 * `banded` is the heteroskedastic law used for the second dataset of the
 * benchmarks. With 1-based row j out of `count` rows and 1-based column k:
 * variance 10 sigma^2 when 2 <= k <= r and j <= floor(count/3);
 * 5 sigma^2 when 1 <= k <= r and count/3 < j <= floor(2 count/3);
 * sigma^2 otherwise. The first band deliberately starts at k = 2.
 */
struct NoiseSpec {
    enum class Law { none, homoskedastic, banded };
    Law law = Law::none;
    double sigma = 0.0;

    static NoiseSpec none() { return {}; }
    static NoiseSpec homoskedastic(double sigma) { return {Law::homoskedastic, sigma}; }
    static NoiseSpec banded(double sigma) { return {Law::banded, sigma}; }

    /// Standard deviation of entry (row, col), both 0-based.
    double std_at(Index row, Index col, Index count, Index r) const {
        switch (law) {
            case Law::none:
                return 0.0;
            case Law::homoskedastic:
                return sigma;
            case Law::banded: {
                const Index j = row + 1;
                const Index k = col + 1;
                if (k >= 2 && k <= r && j <= count / 3) {
                    return std::sqrt(10.0) * sigma;
                }
                if (k >= 1 && k <= r && 3 * j > count && j <= (2 * count) / 3) {
                    return std::sqrt(5.0) * sigma;
                }
                return sigma;
            }
        }
        return 0.0;
    }
};

struct ObservationModelConfig {
    Index p = 0;
    Index r = 0;
    Eigen::VectorXd nu1;
    Eigen::VectorXd nu2;
    double a1 = 1.0;
    double a2 = 1.0;
    Eigen::MatrixXd U_basis;
    Eigen::MatrixXd V1_basis;
    Eigen::MatrixXd V2_basis;
    NuisanceSpec nuisance1;
    NuisanceSpec nuisance2;
    NoiseSpec noise1;
    NoiseSpec noise2;
    std::uint64_t seed = 0;

    /// Checks shapes, positivity of the scalings and the mutual orthogonality
    /// of the three bases (to 1e-10).
    void validate() const {
        if (p < 1 || r < 1) {
            throw DimensionError("ObservationModelConfig: p and r must be positive");
        }
        if (nu1.size() != p || nu2.size() != p) {
            throw DimensionError("ObservationModelConfig: translations must have length p");
        }
        if (U_basis.rows() != p || U_basis.cols() != r || V1_basis.rows() != p || V2_basis.rows() != p) {
            throw DimensionError("ObservationModelConfig: bases must have p rows and U must have r columns");
        }
        if (!(a1 > 0.0) || !(a2 > 0.0)) {
            throw InputError("ObservationModelConfig: scalings a1, a2 must be positive");
        }
        auto orthonormal = [](const Eigen::MatrixXd& B) {
            return B.cols() == 0 ||
                   (B.transpose() * B - Eigen::MatrixXd::Identity(B.cols(), B.cols())).cwiseAbs().maxCoeff() <= 1e-10;
        };
        auto orthogonal = [](const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
            return A.cols() == 0 || B.cols() == 0 || (A.transpose() * B).cwiseAbs().maxCoeff() <= 1e-10;
        };
        if (!orthonormal(U_basis) || !orthonormal(V1_basis) || !orthonormal(V2_basis)) {
            throw InputError("ObservationModelConfig: bases must have orthonormal columns");
        }
        if (!orthogonal(U_basis, V1_basis) || !orthogonal(U_basis, V2_basis) || !orthogonal(V1_basis, V2_basis)) {
            throw InputError("ObservationModelConfig: shared and nuisance subspaces must be mutually orthogonal");
        }
    }
};

/// Points ((R + r cos u) cos v, (R + r cos u) sin v, r sin u) with R = 2,
/// r = 0.8 and (u, v) uniform on [0, 2 pi)^2.
inline LatentSample sample_torus(Index count, std::uint64_t seed, std::uint64_t stream = 0) {
    if (count < 1) {
        throw InputError("sample_torus: count must be positive");
    }
    const CounterRng rng(seed, stream);
    Eigen::MatrixXd pts(count, 3);
    parallel_for(0, count, [&](std::ptrdiff_t i) {
        const auto c = static_cast<std::uint64_t>(i);
        const double u = 2.0 * std::numbers::pi * rng.uniform(2 * c);
        const double v = 2.0 * std::numbers::pi * rng.uniform(2 * c + 1);
        const double ring = kTorusMajorRadius + kTorusMinorRadius * std::cos(u);
        pts(i, 0) = ring * std::cos(v);
        pts(i, 1) = ring * std::sin(v);
        pts(i, 2) = kTorusMinorRadius * std::sin(u);
    });
    return {DataMatrix(std::move(pts)), std::nullopt};
}

/// Six-class Gaussian mixture in R^6: class uniform, mean 5 e_class, identity covariance.
inline LatentSample sample_gmm(Index count, std::uint64_t seed, std::uint64_t stream = 0) {
    if (count < 1) {
        throw InputError("sample_gmm: count must be positive");
    }
    const CounterRng label_rng(seed, stream + 1);
    const CounterRng point_rng(seed, stream + 2);
    constexpr Index r = kMixtureClasses;
    Eigen::MatrixXd pts(count, r);
    std::vector<int> labels(static_cast<std::size_t>(count));
    parallel_for(0, count, [&](std::ptrdiff_t i) {
        const auto c = static_cast<std::uint64_t>(i);
        const int label = std::min(kMixtureClasses - 1, static_cast<int>(label_rng.uniform(c) * kMixtureClasses));
        labels[static_cast<std::size_t>(i)] = label;
        for (Index k = 0; k < r; ++k) {
            pts(i, k) = point_rng.normal(c * r + static_cast<std::uint64_t>(k)) + (k == label ? kMixtureMeanScale : 0.0);
        }
    });
    return {DataMatrix(std::move(pts)), std::move(labels)};
}

/// Lifts a latent sample into the ambient space for one of the two datasets.
inline DataMatrix observe(const LatentSample& latent, Dataset which, const ObservationModelConfig& cfg) {
    cfg.validate();
    const Eigen::MatrixXd& lat = latent.points.values();
    if (lat.cols() != cfg.r) {
        throw DimensionError("observe: latent dimension " + std::to_string(lat.cols()) + " does not match r = " +
                             std::to_string(cfg.r));
    }
    const bool first = which == Dataset::first;
    const Eigen::VectorXd& nu = first ? cfg.nu1 : cfg.nu2;
    const double a = first ? cfg.a1 : cfg.a2;
    const Eigen::MatrixXd& V = first ? cfg.V1_basis : cfg.V2_basis;
    const NuisanceSpec& nuisance = first ? cfg.nuisance1 : cfg.nuisance2;
    const NoiseSpec& noise = first ? cfg.noise1 : cfg.noise2;
    const Index count = lat.rows();
    const Index p = cfg.p;

    Eigen::MatrixXd out = a * lat * cfg.U_basis.transpose();
    out.rowwise() += nu.transpose();

    if (nuisance.kind == NuisanceSpec::Kind::uniform && V.cols() > 0) {
        const CounterRng rng(cfg.seed, stream_id(which, Role::nuisance));
        const Index rv = V.cols();
        Eigen::MatrixXd Z(count, rv);
        parallel_for(0, count, [&](std::ptrdiff_t i) {
            for (Index c = 0; c < rv; ++c) {
                Z(i, c) = rng.uniform(static_cast<std::uint64_t>(i * rv + c), nuisance.lo, nuisance.hi);
            }
        });
        out += Z * V.transpose();
    }

    if (noise.law != NoiseSpec::Law::none) {
        const CounterRng rng(cfg.seed, stream_id(which, Role::noise));
        parallel_for(0, count, [&](std::ptrdiff_t i) {
            for (Index k = 0; k < p; ++k) {
                const double sd = noise.std_at(i, k, count, cfg.r);
                if (sd > 0.0) {
                    out(i, k) += sd * rng.normal(static_cast<std::uint64_t>(i * p + k));
                }
            }
        });
    }
    return DataMatrix(std::move(out));
}

enum class PresetName { setting1, setting2, clustering };

inline std::optional<PresetName> parse_preset_name(const std::string& name) {
    if (name == "setting1") return PresetName::setting1;
    if (name == "setting2") return PresetName::setting2;
    if (name == "clustering") return PresetName::clustering;
    return std::nullopt;
}

inline const char* preset_name(PresetName name) {
    switch (name) {
        case PresetName::setting1:
            return "setting1";
        case PresetName::setting2:
            return "setting2";
        case PresetName::clustering:
            return "clustering";
    }
    return "";
}

/// `param` is tau for setting1, gamma for setting2 and theta for clustering.
struct PresetSpec {
    PresetName name = PresetName::setting1;
    double param = 1.0;
    Index m = 600;
    Index n = 600;
    Index p = 1000;
    std::uint64_t seed = 0;
    /// Accept parameters outside the benchmark ranges.
    bool allow_out_of_range = false;
};

struct SimulatedPair {
    DataMatrix X;
    DataMatrix Y;
    LatentSample latent_x;
    LatentSample latent_y;
    ObservationModelConfig config;
    /// Embedding dimension the benchmark uses for this preset.
    Index q_default;
};

/// Scale of the torus benchmarks.
inline constexpr double kTorusTheta = 13.0;

/**
 * @brief Model configuration for a preset.
 *
 * setting1(tau): a1 = 3 theta, a2 = theta with theta = 13, nu1 = 3 tau theta e1,
 * no nuisance, homoskedastic noise sigma = 0.05 theta.
 * setting2(gamma): as setting1 with tau = 1, plus nuisance z2 ~ U[gamma theta/2, gamma theta]
 * and banded noise on the second dataset.
 * clustering(theta): a1 = a2 = theta, nu1 = 15 e1 + 15 e2, z2 ~ U[theta/2, theta],
 * unit noise, banded on the second dataset.
 * All use U = [I_r; 0], V1 = 0 and V2 = [e_{r+1} ... e_p].
 */
inline ObservationModelConfig preset_config(const PresetSpec& spec) {
    const bool clustering = spec.name == PresetName::clustering;
    const Index r = clustering ? kMixtureClasses : 3;
    if (spec.m < 1 || spec.n < 1) {
        throw InputError("preset: m and n must be positive");
    }
    if (spec.p < r) {
        throw InputError("preset: p must be at least the latent dimension " + std::to_string(r));
    }
    if (!spec.allow_out_of_range) {
        const double v = spec.param;
        const bool ok = spec.name == PresetName::setting1   ? (v >= 1.0 && v <= 8.0)
                        : spec.name == PresetName::setting2 ? (v >= 0.0 && v <= 1.0)
                                                            : (v >= 1.0 && v <= 3.0);
        if (!ok) {
            throw InputError(std::string("preset: param out of range for ") + preset_name(spec.name));
        }
    }

    ObservationModelConfig cfg;
    cfg.p = spec.p;
    cfg.r = r;
    cfg.seed = spec.seed;
    cfg.U_basis = Eigen::MatrixXd::Zero(spec.p, r);
    cfg.U_basis.topRows(r).setIdentity();
    cfg.V1_basis = Eigen::MatrixXd::Zero(spec.p, 0);
    cfg.V2_basis = Eigen::MatrixXd::Zero(spec.p, spec.p - r);
    cfg.V2_basis.bottomRows(spec.p - r).setIdentity();
    cfg.nu1 = Eigen::VectorXd::Zero(spec.p);
    cfg.nu2 = Eigen::VectorXd::Zero(spec.p);

    if (clustering) {
        const double theta = spec.param;
        cfg.a1 = theta;
        cfg.a2 = theta;
        cfg.nu1[0] = 15.0;
        cfg.nu1[1] = 15.0;
        cfg.nuisance2 = NuisanceSpec::uniform(theta / 2.0, theta);
        cfg.noise1 = NoiseSpec::homoskedastic(1.0);
        cfg.noise2 = NoiseSpec::banded(1.0);
        return cfg;
    }

    const double theta = kTorusTheta;
    const double sigma = 0.05 * theta;
    const double tau = spec.name == PresetName::setting1 ? spec.param : 1.0;
    cfg.a1 = 3.0 * theta;
    cfg.a2 = theta;
    cfg.nu1[0] = tau * 3.0 * theta;
    cfg.noise1 = NoiseSpec::homoskedastic(sigma);
    if (spec.name == PresetName::setting1) {
        cfg.noise2 = NoiseSpec::homoskedastic(sigma);
    } else {
        const double gamma = spec.param;
        if (gamma > 0.0) {
            cfg.nuisance2 = NuisanceSpec::uniform(gamma * theta / 2.0, gamma * theta);
        }
        cfg.noise2 = NoiseSpec::banded(sigma);
    }
    return cfg;
}

inline SimulatedPair preset(const PresetSpec& spec) {
    ObservationModelConfig cfg = preset_config(spec);
    const bool clustering = spec.name == PresetName::clustering;
    const std::uint64_t sx = stream_id(Dataset::first, Role::latent);
    const std::uint64_t sy = stream_id(Dataset::second, Role::latent);
    LatentSample lx = clustering ? sample_gmm(spec.m, spec.seed, sx) : sample_torus(spec.m, spec.seed, sx);
    LatentSample ly = clustering ? sample_gmm(spec.n, spec.seed, sy) : sample_torus(spec.n, spec.seed, sy);
    DataMatrix X = observe(lx, Dataset::first, cfg);
    DataMatrix Y = observe(ly, Dataset::second, cfg);
    return SimulatedPair{std::move(X), std::move(Y), std::move(lx), std::move(ly), std::move(cfg), clustering ? Index{6} : Index{3}};
}

}  // namespace eotmap::simulate

#endif  // EOTMAP_SIMULATE_HPP
