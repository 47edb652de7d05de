// Aligns two simulated views of the same Gaussian mixture, then clusters the
// joint embedding and scores it against the true classes.
//
//   ./demo [seed]

#include <eotmap/eotmap.hpp>

#include <cstdio>
#include <cstdlib>
#include <vector>

int main(int argc, char** argv) {
    using namespace eotmap;
    using namespace eotmap::metrics;
    using namespace eotmap::simulate;

    const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 7;

    PresetSpec spec;
    spec.name = PresetName::clustering;
    spec.param = 2.0;
    spec.m = 200;
    spec.n = 250;
    spec.p = 300;
    spec.seed = seed;
    const SimulatedPair pair = preset(spec);

    EmbedOptions opts;
    opts.q = pair.q_default;
    const EmbeddingRun run = eot_eigenmaps_run(pair.X, pair.Y, opts);
    std::printf("plan %ldx%ld, epsilon %.4g, sinkhorn iterations %d\n", static_cast<long>(run.plan.rows()),
                static_cast<long>(run.plan.cols()), run.plan.epsilon, run.plan.iterations);

    const Index m = run.embedding.Xt.rows();
    const Index n = run.embedding.Yt.rows();
    Eigen::MatrixXd pooled(m + n, run.embedding.q);
    pooled << run.embedding.Xt, run.embedding.Yt;

    std::vector<int> truth = *pair.latent_x.labels;
    truth.insert(truth.end(), pair.latent_y.labels->begin(), pair.latent_y.labels->end());

    const KMeansResult clusters = kmeans(pooled, kMixtureClasses, seed);
    std::printf("q = %ld\n", static_cast<long>(run.embedding.q));
    std::printf("rand index        %.4f\n", rand_index(clusters.labels, truth));
    std::printf("silhouette        %.4f\n", silhouette_mean(pooled, truth));
    std::printf("davies-bouldin    %.4f\n", davies_bouldin(pooled, truth));
    std::printf("neighbor purity   %.4f\n", neighbor_purity(pooled, truth, 20));
    return EXIT_SUCCESS;
}
