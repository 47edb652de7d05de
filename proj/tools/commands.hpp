#ifndef EOTMAP_TOOLS_COMMANDS_HPP
#define EOTMAP_TOOLS_COMMANDS_HPP

// Implementation of the eotmap command-line subcommands. Each command takes a
// plain argument struct and returns a process exit code, so the same code
// path is exercised by the executable and by the tests.

#include <eotmap/eotmap.hpp>

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace eotmap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kSchemaVersion = 1;

/// Runs `body` and maps library exceptions to exit codes.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        body();
        return kExitOk;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << " (residual " << io::format_number(e.residual()) << " after " << e.iterations()
            << " iterations)\n";
        return kExitNumerical;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
}

// ---------------------------------------------------------------------------
// simulate

inline simulate::PresetSpec parse_preset_config(const nlohmann::json& cfg) {
    using nlohmann::json;
    if (!cfg.is_object()) {
        throw InputError("config: top level must be a JSON object");
    }
    static const std::set<std::string> known{"schema_version", "name", "m", "n", "p", "seed", "param"};
    for (const auto& [key, value] : cfg.items()) {
        if (!known.contains(key)) {
            throw InputError("config: unknown field '" + key + "'");
        }
    }
    auto require = [&](const char* field) -> const json& {
        if (!cfg.contains(field)) {
            throw InputError(std::string("config: missing field '") + field + "'");
        }
        return cfg.at(field);
    };
    auto positive_count = [&](const char* field, Index fallback) -> Index {
        if (!cfg.contains(field)) {
            return fallback;
        }
        const json& v = cfg.at(field);
        if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
            throw InputError(std::string("config: field '") + field + "' must be a positive integer");
        }
        return static_cast<Index>(v.get<std::int64_t>());
    };

    const json& version = require("schema_version");
    if (!version.is_number_integer() || version.get<std::int64_t>() != kSchemaVersion) {
        throw InputError("config: field 'schema_version' must be " + std::to_string(kSchemaVersion));
    }
    const json& name = require("name");
    if (!name.is_string()) {
        throw InputError("config: field 'name' must be a string");
    }
    const auto preset = simulate::parse_preset_name(name.get<std::string>());
    if (!preset) {
        throw InputError("config: field 'name' has unknown preset '" + name.get<std::string>() + "'");
    }
    const json& param = require("param");
    if (!param.is_number()) {
        throw InputError("config: field 'param' must be a number");
    }

    simulate::PresetSpec spec;
    spec.name = *preset;
    spec.param = param.get<double>();
    spec.m = positive_count("m", spec.m);
    spec.n = positive_count("n", spec.n);
    spec.p = positive_count("p", spec.p);
    if (cfg.contains("seed")) {
        const json& seed = cfg.at("seed");
        if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
            throw InputError("config: field 'seed' must be a nonnegative integer");
        }
        spec.seed = seed.get<std::uint64_t>();
    }
    try {
        simulate::preset_config(spec);
    } catch (const InputError& e) {
        throw InputError(std::string("config: field 'param': ") + e.what());
    }
    return spec;
}

struct SimulateArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_x;
    std::string out_y;
    std::string out_latent;
    std::string out_labels;
};

inline int cmd_simulate(const SimulateArgs& args, std::ostream& err = std::cerr) {
    return guarded(err, [&] {
        std::ifstream in(args.config);
        if (!in) {
            throw InputError("cannot open config " + args.config);
        }
        nlohmann::json cfg;
        try {
            cfg = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw InputError("config: invalid JSON: " + std::string(e.what()));
        }
        simulate::PresetSpec spec = parse_preset_config(cfg);
        if (args.seed) {
            spec.seed = *args.seed;
        }
        const simulate::SimulatedPair pair = simulate::preset(spec);

        const Index m = pair.X.rows();
        const Index n = pair.Y.rows();
        const Eigen::MatrixXd& lx = pair.latent_x.points.values();
        const Eigen::MatrixXd& ly = pair.latent_y.points.values();
        Eigen::MatrixXd latent(m + n, lx.cols());
        latent.topRows(m) = lx;
        latent.bottomRows(n) = ly;

        Eigen::MatrixXd labels(m + n, 2);
        for (Index i = 0; i < m + n; ++i) {
            const bool first = i < m;
            const auto& sample = first ? pair.latent_x : pair.latent_y;
            const Index local = first ? i : i - m;
            labels(i, 0) = first ? 0.0 : 1.0;
            labels(i, 1) = sample.labels ? static_cast<double>((*sample.labels)[static_cast<std::size_t>(local)]) : 0.0;
        }

        io::write_matrix(args.out_x, pair.X.values());
        io::write_matrix(args.out_y, pair.Y.values());
        io::write_matrix(args.out_latent, latent);
        io::write_matrix(args.out_labels, labels);
    });
}

// ---------------------------------------------------------------------------
// embed

/// Parses a number or the given keyword; the keyword yields an empty optional.
inline std::optional<double> number_or_keyword(const std::string& text, const std::string& keyword, const char* flag) {
    if (text == keyword) {
        return std::nullopt;
    }
    return io::parse_number(text, flag);
}

struct EmbedArgs {
    std::string in_x;
    std::string in_y;
    std::string q = "auto";
    double t = 0.0;
    std::string epsilon = "median";
    double tol = 1e-10;
    int max_iter = 10000;
    std::string out_embedding;
    std::string out_spectrum;
};

inline SinkhornOptions sinkhorn_options(double tol, int max_iter) {
    if (!(tol > 0.0) || max_iter < 1) {
        throw InputError("--tol must be positive and --max-iter at least 1");
    }
    return SinkhornOptions{tol, max_iter};
}

inline std::optional<double> parse_epsilon(const std::string& text) {
    const auto eps = number_or_keyword(text, "median", "--epsilon");
    if (eps && !(*eps > 0.0)) {
        throw InputError("--epsilon must be positive or 'median'");
    }
    return eps;
}

/// Rows `[dataset, index, coords...]`, X first.
inline Eigen::MatrixXd embedding_table(const JointEmbedding& emb) {
    const Index m = emb.Xt.rows();
    const Index n = emb.Yt.rows();
    Eigen::MatrixXd table(m + n, emb.q + 2);
    for (Index i = 0; i < m; ++i) {
        table(i, 0) = 0.0;
        table(i, 1) = static_cast<double>(i);
        table.row(i).tail(emb.q) = emb.Xt.row(i);
    }
    for (Index j = 0; j < n; ++j) {
        table(m + j, 0) = 1.0;
        table(m + j, 1) = static_cast<double>(j);
        table.row(m + j).tail(emb.q) = emb.Yt.row(j);
    }
    return table;
}

inline Eigen::MatrixXd spectrum_table(const Eigen::VectorXd& s) {
    Eigen::MatrixXd table(s.size(), 2);
    for (Index k = 0; k < s.size(); ++k) {
        table(k, 0) = static_cast<double>(k + 1);
        table(k, 1) = s[k];
    }
    return table;
}

inline int cmd_embed(const EmbedArgs& args, std::ostream& err = std::cerr) {
    return guarded(err, [&] {
        EmbedOptions opts;
        opts.epsilon = parse_epsilon(args.epsilon);
        opts.sinkhorn = sinkhorn_options(args.tol, args.max_iter);
        if (!(args.t >= 0.0)) {
            throw InputError("--t must be nonnegative");
        }
        opts.t = args.t;
        if (const auto q = number_or_keyword(args.q, "auto", "--q")) {
            if (*q < 1.0 || *q != std::floor(*q)) {
                throw InputError("--q must be a positive integer or 'auto'");
            }
            opts.q = static_cast<Index>(*q);
        }
        const DataMatrix X(io::read_matrix(args.in_x));
        const DataMatrix Y(io::read_matrix(args.in_y));
        const EmbeddingRun run = eot_eigenmaps_run(X, Y, opts);
        if (!opts.q) {
            err << "selected q = " << run.dimension.q << (run.dimension.degenerate ? " (no eigengap found)" : "") << '\n';
        }
        if (run.embedding.near_degenerate) {
            err << "warning: last retained singular value is tied with the next one\n";
        }
        io::write_matrix(args.out_embedding, embedding_table(run.embedding));
        if (!args.out_spectrum.empty()) {
            io::write_matrix(args.out_spectrum, spectrum_table(linalg::singular_values(run.plan.W)));
        }
    });
}

// ---------------------------------------------------------------------------
// spectrum

struct SpectrumArgs {
    std::string in_x;
    std::string in_y;
    std::string epsilon = "median";
    double tol = 1e-10;
    int max_iter = 10000;
    std::string out;
};

/// Writes the singular values of the plan and reports the eigengap choice.
inline int cmd_spectrum(const SpectrumArgs& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return guarded(err, [&] {
        const DataMatrix X(io::read_matrix(args.in_x));
        const DataMatrix Y(io::read_matrix(args.in_y));
        const TransportPlan plan = transport_plan(X, Y, parse_epsilon(args.epsilon), sinkhorn_options(args.tol, args.max_iter));
        const Eigen::VectorXd s = linalg::singular_values(plan.W);
        const DimensionChoice choice = auto_dimension(plan);
        const std::string table = io::to_csv(spectrum_table(s));
        if (args.out.empty()) {
            out << table;
        } else {
            io::write_text(args.out, table);
        }
        err << "epsilon = " << io::format_number(plan.epsilon) << ", sinkhorn iterations = " << plan.iterations
            << ", eigengap q = " << choice.q << (choice.degenerate ? " (degenerate)" : "") << '\n';
    });
}

// ---------------------------------------------------------------------------
// evaluate

/// Embedding file rows sorted by (dataset, index), with the index checked
/// to be contiguous within each dataset.
inline Eigen::MatrixXd read_embedding(const std::string& path, Index* first_count = nullptr) {
    const Eigen::MatrixXd table = io::read_matrix(path);
    if (table.cols() < 3) {
        throw InputError(path + ": embedding needs columns dataset, index and at least one coordinate");
    }
    std::vector<Index> order(static_cast<std::size_t>(table.rows()));
    for (Index i = 0; i < table.rows(); ++i) {
        const double d = table(i, 0);
        if (d != 0.0 && d != 1.0) {
            throw InputError(path + ": dataset column must be 0 or 1");
        }
        order[static_cast<std::size_t>(i)] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return std::pair(table(a, 0), table(a, 1)) < std::pair(table(b, 0), table(b, 1));
    });
    Eigen::MatrixXd coords(table.rows(), table.cols() - 2);
    Index count0 = 0;
    Index expected = 0;
    double dataset = 0.0;
    for (Index r = 0; r < table.rows(); ++r) {
        const Index src = order[static_cast<std::size_t>(r)];
        if (table(src, 0) != dataset) {
            dataset = table(src, 0);
            expected = 0;
        }
        if (table(src, 1) != static_cast<double>(expected)) {
            throw InputError(path + ": point indices must run 0, 1, ... within each dataset");
        }
        ++expected;
        if (dataset == 0.0) {
            ++count0;
        }
        coords.row(r) = table.row(src).tail(table.cols() - 2);
    }
    if (first_count != nullptr) {
        *first_count = count0;
    }
    return coords;
}

inline std::vector<int> label_column(const Eigen::MatrixXd& table, Index column, const std::string& path) {
    if (column < 0 || column >= table.cols()) {
        throw InputError(path + ": label column " + std::to_string(column) + " does not exist");
    }
    std::vector<int> out(static_cast<std::size_t>(table.rows()));
    for (Index i = 0; i < table.rows(); ++i) {
        const double v = table(i, column);
        if (v != std::floor(v) || std::abs(v) > 1e9) {
            throw InputError(path + ": labels must be integers");
        }
        out[static_cast<std::size_t>(i)] = static_cast<int>(v);
    }
    return out;
}

struct EvaluateArgs {
    std::string embedding;
    std::string metric;
    std::string latent;
    std::string labels;
    Index label_column = 1;
    /// Predicted labels for `rand`; if empty, k-means on the embedding.
    std::string predicted;
    /// Cluster count for k-means; 0 uses the number of distinct true labels.
    Index clusters = 0;
    std::uint64_t seed = 0;
    Index k = 50;
    std::string out;
};

inline int cmd_evaluate(const EvaluateArgs& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return guarded(err, [&] {
        static const std::set<std::string> metrics_known{"concordance", "rand", "db", "silhouette", "purity"};
        if (!metrics_known.contains(args.metric)) {
            throw InputError("--metric must be one of concordance, rand, db, silhouette, purity");
        }
        const Eigen::MatrixXd coords = read_embedding(args.embedding);
        const Index N = coords.rows();
        nlohmann::ordered_json report;
        report["metric"] = args.metric;
        nlohmann::ordered_json params = nlohmann::ordered_json::object();
        double value = 0.0;

        if (args.metric == "concordance") {
            if (args.latent.empty()) {
                throw InputError("metric 'concordance' requires --latent");
            }
            const Eigen::MatrixXd latent = io::read_matrix(args.latent);
            if (latent.rows() != N) {
                throw InputError("--latent must have one row per embedded point");
            }
            value = metrics::jaccard_concordance(coords, latent, args.k);
            params["k"] = args.k;
        } else {
            if (args.labels.empty()) {
                throw InputError("metric '" + args.metric + "' requires --labels");
            }
            const Eigen::MatrixXd table = io::read_matrix(args.labels);
            if (table.rows() != N) {
                throw InputError("--labels must have one row per embedded point");
            }
            const std::vector<int> truth = label_column(table, args.label_column, args.labels);
            params["label_column"] = args.label_column;
            if (args.metric == "rand") {
                std::vector<int> predicted;
                if (!args.predicted.empty()) {
                    const Eigen::MatrixXd pred = io::read_matrix(args.predicted);
                    if (pred.rows() != N) {
                        throw InputError("--predicted must have one row per embedded point");
                    }
                    predicted = label_column(pred, pred.cols() - 1, args.predicted);
                } else {
                    Index k = args.clusters;
                    if (k == 0) {
                        k = static_cast<Index>(std::set<int>(truth.begin(), truth.end()).size());
                    }
                    predicted = metrics::kmeans(coords, k, args.seed).labels;
                    params["clusters"] = k;
                    params["seed"] = args.seed;
                }
                value = metrics::rand_index(truth, predicted);
            } else if (args.metric == "db") {
                value = metrics::davies_bouldin(coords, truth);
            } else if (args.metric == "silhouette") {
                value = metrics::silhouette_mean(coords, truth);
            } else {
                value = metrics::neighbor_purity(coords, truth, args.k);
                params["k"] = args.k;
            }
        }
        if (std::isfinite(value)) {
            report["value"] = value;
        } else {
            report["value"] = "inf";
        }
        report["params"] = params;
        const std::string text = report.dump(2) + "\n";
        if (args.out.empty()) {
            out << text;
        } else {
            io::write_text(args.out, text);
        }
    });
}

// ---------------------------------------------------------------------------
// distances

struct PairRequest {
    PairKind kind;
    Index i;
    Index j;
};

inline const char* kind_name(PairKind kind) {
    switch (kind) {
        case PairKind::XX:
            return "XX";
        case PairKind::YY:
            return "YY";
        case PairKind::XY:
            return "XY";
        case PairKind::YX:
            return "YX";
    }
    return "?";
}

/// Lines `kind,i,j` with kind one of XX, YY, XY, YX. For YX, i indexes Y.
inline std::vector<PairRequest> read_pairs(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path);
    }
    static const std::map<std::string, PairKind> kinds{
        {"XX", PairKind::XX}, {"YY", PairKind::YY}, {"XY", PairKind::XY}, {"YX", PairKind::YX}};
    std::vector<PairRequest> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const std::string where = path + ":" + std::to_string(line_no);
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            field.erase(0, field.find_first_not_of(" \t"));
            field.erase(field.find_last_not_of(" \t\r") + 1);
            fields.push_back(field);
        }
        if (fields.size() != 3 || !kinds.contains(fields[0])) {
            throw InputError(where + ": expected 'kind,i,j' with kind in XX, YY, XY, YX");
        }
        const double i = io::parse_number(fields[1], where);
        const double j = io::parse_number(fields[2], where);
        if (i < 0 || j < 0 || i != std::floor(i) || j != std::floor(j)) {
            throw InputError(where + ": indices must be nonnegative integers");
        }
        out.push_back({kinds.at(fields[0]), static_cast<Index>(i), static_cast<Index>(j)});
    }
    return out;
}

struct DistancesArgs {
    std::string in_x;
    std::string in_y;
    std::string epsilon = "median";
    int t = 1;
    double tol = 1e-10;
    int max_iter = 10000;
    std::string pairs;
    std::string out;
};

inline int cmd_distances(const DistancesArgs& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return guarded(err, [&] {
        if (args.t < 1) {
            throw InputError("--t must be a positive integer");
        }
        const std::vector<PairRequest> pairs = read_pairs(args.pairs);
        const DataMatrix X(io::read_matrix(args.in_x));
        const DataMatrix Y(io::read_matrix(args.in_y));
        const TransportPlan plan = transport_plan(X, Y, parse_epsilon(args.epsilon), sinkhorn_options(args.tol, args.max_iter));
        const DiffusionContext ctx = make_diffusion_context(plan, args.t);
        std::ostringstream table;
        for (const PairRequest& req : pairs) {
            const double d = caller_distance(ctx, plan.swapped, req.kind, req.i, req.j);
            table << kind_name(req.kind) << ',' << req.i << ',' << req.j << ',' << io::format_number(d) << '\n';
        }
        if (args.out.empty()) {
            out << table.str();
        } else {
            io::write_text(args.out, table.str());
        }
    });
}

}  // namespace eotmap::cli

#endif  // EOTMAP_TOOLS_COMMANDS_HPP
