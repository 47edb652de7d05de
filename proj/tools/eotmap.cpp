#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace eotmap::cli;

    CLI::App app{"Joint embedding of two datasets through an entropic transport plan"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: all cores)");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Generate a benchmark dataset pair from a JSON config");
    simulate->add_option("--config", sim.config, "Preset config (JSON)")->required();
    simulate->add_option("--seed", sim.seed, "Override the config seed");
    simulate->add_option("--out-x", sim.out_x, "First dataset CSV")->required();
    simulate->add_option("--out-y", sim.out_y, "Second dataset CSV")->required();
    simulate->add_option("--out-latent", sim.out_latent, "Latent coordinates CSV, first dataset then second")->required();
    simulate->add_option("--out-labels", sim.out_labels, "Labels CSV: dataset, class")->required();

    EmbedArgs emb;
    auto* embed = app.add_subcommand("embed", "Embed two datasets into a shared space");
    embed->add_option("--x", emb.in_x, "First dataset CSV")->required();
    embed->add_option("--y", emb.in_y, "Second dataset CSV")->required();
    embed->add_option("--q", emb.q, "Embedding dimension or 'auto'")->capture_default_str();
    embed->add_option("--t", emb.t, "Diffusion time (nonnegative)")->capture_default_str();
    embed->add_option("--epsilon", emb.epsilon, "Kernel bandwidth or 'median'")->capture_default_str();
    embed->add_option("--tol", emb.tol, "Sinkhorn tolerance")->capture_default_str();
    embed->add_option("--max-iter", emb.max_iter, "Sinkhorn iteration cap")->capture_default_str();
    embed->add_option("--out", emb.out_embedding, "Embedding CSV: dataset, index, coordinates")->required();
    embed->add_option("--out-spectrum", emb.out_spectrum, "Singular values CSV: k, s_k");

    SpectrumArgs spec;
    auto* spectrum = app.add_subcommand("spectrum", "Print the singular values of the transport plan");
    spectrum->add_option("--x", spec.in_x, "First dataset CSV")->required();
    spectrum->add_option("--y", spec.in_y, "Second dataset CSV")->required();
    spectrum->add_option("--epsilon", spec.epsilon, "Kernel bandwidth or 'median'")->capture_default_str();
    spectrum->add_option("--tol", spec.tol, "Sinkhorn tolerance")->capture_default_str();
    spectrum->add_option("--max-iter", spec.max_iter, "Sinkhorn iteration cap")->capture_default_str();
    spectrum->add_option("--out", spec.out, "Output CSV (default: stdout)");

    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "Score an embedding");
    evaluate->add_option("--embedding", ev.embedding, "Embedding CSV from 'embed'")->required();
    evaluate->add_option("--metric", ev.metric, "concordance, rand, db, silhouette or purity")->required();
    evaluate->add_option("--latent", ev.latent, "Latent coordinates CSV (concordance)");
    evaluate->add_option("--labels", ev.labels, "Labels CSV (rand, db, silhouette, purity)");
    evaluate->add_option("--label-column", ev.label_column, "Column of the labels CSV to use")->capture_default_str();
    evaluate->add_option("--predicted", ev.predicted, "Predicted labels CSV for rand (last column)");
    evaluate->add_option("--clusters", ev.clusters, "k-means cluster count for rand (0: number of true labels)");
    evaluate->add_option("--seed", ev.seed, "k-means seed")->capture_default_str();
    evaluate->add_option("--k", ev.k, "Neighborhood size")->capture_default_str();
    evaluate->add_option("--out", ev.out, "JSON report (default: stdout)");

    DistancesArgs dist;
    auto* distances = app.add_subcommand("distances", "Diffusion distances for listed point pairs");
    distances->add_option("--x", dist.in_x, "First dataset CSV")->required();
    distances->add_option("--y", dist.in_y, "Second dataset CSV")->required();
    distances->add_option("--epsilon", dist.epsilon, "Kernel bandwidth or 'median'")->capture_default_str();
    distances->add_option("--t", dist.t, "Number of walk steps (positive integer)")->capture_default_str();
    distances->add_option("--tol", dist.tol, "Sinkhorn tolerance")->capture_default_str();
    distances->add_option("--max-iter", dist.max_iter, "Sinkhorn iteration cap")->capture_default_str();
    distances->add_option("--pairs", dist.pairs, "CSV of kind,i,j rows")->required();
    distances->add_option("--out", dist.out, "Output CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    if (threads > 0) {
        eotmap::set_thread_count(threads);
    }
    if (simulate->parsed()) {
        return cmd_simulate(sim);
    }
    if (embed->parsed()) {
        return cmd_embed(emb);
    }
    if (spectrum->parsed()) {
        return cmd_spectrum(spec);
    }
    if (evaluate->parsed()) {
        return cmd_evaluate(ev);
    }
    return cmd_distances(dist);
}
