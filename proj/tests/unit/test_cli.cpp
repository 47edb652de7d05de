#include "support.hpp"

#include "commands.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace eotmap;
using namespace eotmap::cli;
namespace fs = std::filesystem;

namespace {

class Workdir : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("eotmap_cli_") + info->test_suite_name() + "_" + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name)) << text;
        return path(name);
    }

    static std::string slurp(const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    /// Simulates a small preset into x.csv, y.csv, latent.csv, labels.csv.
    void simulate_preset(const std::string& name, double param, Index m, Index n, Index p, std::uint64_t seed = 1) {
        std::ostringstream cfg;
        cfg << R"({"schema_version": 1, "name": ")" << name << R"(", "param": )" << param << R"(, "m": )" << m
            << R"(, "n": )" << n << R"(, "p": )" << p << R"(, "seed": )" << seed << "}";
        SimulateArgs args{write("config.json", cfg.str()), std::nullopt, path("x.csv"), path("y.csv"),
                          path("latent.csv"), path("labels.csv")};
        std::ostringstream err;
        ASSERT_EQ(cmd_simulate(args, err), kExitOk) << err.str();
    }

    EmbedArgs embed_args(const std::string& q, double t = 0.0) const {
        EmbedArgs args;
        args.in_x = path("x.csv");
        args.in_y = path("y.csv");
        args.q = q;
        args.t = t;
        args.out_embedding = path("embedding.csv");
        args.out_spectrum = path("spectrum.csv");
        return args;
    }

    /// Runs the installed executable; returns its exit status.
    static int run_cli(const std::string& arguments) {
        const std::string command = std::string(EOTMAP_CLI_PATH) + " " + arguments + " >/dev/null 2>&1";
        const int status = std::system(command.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    fs::path dir_;
};

int simulate_with(const std::string& config_path, const std::string& dir, std::ostream& err) {
    SimulateArgs args{config_path, std::nullopt, dir + "/x.csv", dir + "/y.csv", dir + "/l.csv", dir + "/c.csv"};
    return cmd_simulate(args, err);
}

}  // namespace

using SimulateCommand = Workdir;

TEST_F(SimulateCommand, ShapesOfTheFourFiles) {
    simulate_preset("setting1", 8.0, 200, 200, 300);
    const Eigen::MatrixXd X = io::read_matrix(path("x.csv"));
    const Eigen::MatrixXd Y = io::read_matrix(path("y.csv"));
    const Eigen::MatrixXd L = io::read_matrix(path("latent.csv"));
    const Eigen::MatrixXd C = io::read_matrix(path("labels.csv"));
    EXPECT_EQ(X.rows(), 200);
    EXPECT_EQ(X.cols(), 300);
    EXPECT_EQ(Y.rows(), 200);
    EXPECT_EQ(Y.cols(), 300);
    EXPECT_EQ(L.rows(), 400);
    EXPECT_EQ(L.cols(), 3);
    EXPECT_EQ(C.rows(), 400);
    EXPECT_EQ(C(0, 0), 0.0);
    EXPECT_EQ(C(399, 0), 1.0);
}

TEST_F(SimulateCommand, ConfigErrorsNameTheField) {
    const std::string d = dir_.string();
    struct Case {
        const char* json;
        const char* field;
    };
    const Case cases[] = {
        {R"({"schema_version": 2, "name": "setting1", "param": 2})", "schema_version"},
        {R"({"name": "setting1", "param": 2})", "schema_version"},
        {R"({"schema_version": 1, "name": "setting7", "param": 2})", "name"},
        {R"({"schema_version": 1, "name": "setting1"})", "param"},
        {R"({"schema_version": 1, "name": "setting1", "param": 20})", "param"},
        {R"({"schema_version": 1, "name": "setting1", "param": 2, "m": 0})", "'m'"},
        {R"({"schema_version": 1, "name": "setting1", "param": 2, "p": 2.5})", "'p'"},
        {R"({"schema_version": 1, "name": "setting1", "param": 2, "sed": 4})", "sed"},
        {R"({"schema_version": 1, "name": "setting1", "param": 2, "seed": -1})", "seed"},
    };
    for (const Case& c : cases) {
        std::ostringstream err;
        EXPECT_EQ(simulate_with(write("bad.json", c.json), d, err), kExitInput) << c.json;
        EXPECT_NE(err.str().find(c.field), std::string::npos) << err.str();
    }
    std::ostringstream err;
    EXPECT_EQ(simulate_with(write("broken.json", "{not json"), d, err), kExitInput);
    EXPECT_EQ(simulate_with(path("missing.json"), d, err), kExitInput);
}

TEST_F(SimulateCommand, RerunsAreByteIdentical) {
    simulate_preset("clustering", 2.0, 60, 50, 20, 7);
    const std::string x1 = slurp(path("x.csv"));
    const std::string y1 = slurp(path("y.csv"));
    const std::string c1 = slurp(path("labels.csv"));
    simulate_preset("clustering", 2.0, 60, 50, 20, 7);
    EXPECT_EQ(slurp(path("x.csv")), x1);
    EXPECT_EQ(slurp(path("y.csv")), y1);
    EXPECT_EQ(slurp(path("labels.csv")), c1);
    simulate_preset("clustering", 2.0, 60, 50, 20, 8);
    EXPECT_NE(slurp(path("x.csv")), x1);
}

TEST_F(SimulateCommand, SeedFlagOverridesConfig) {
    simulate_preset("setting2", 0.5, 30, 30, 10, 3);
    const std::string reference = slurp(path("y.csv"));
    SimulateArgs args{path("config.json"), std::uint64_t{4}, path("y2x.csv"), path("y2.csv"), path("l2.csv"), path("c2.csv")};
    std::ostringstream err;
    ASSERT_EQ(cmd_simulate(args, err), kExitOk);
    EXPECT_NE(slurp(path("y2.csv")), reference);
}

using EmbedCommand = Workdir;

TEST_F(EmbedCommand, WritesOneRowPerPoint) {
    simulate_preset("setting1", 2.0, 40, 30, 12);
    std::ostringstream err;
    ASSERT_EQ(cmd_embed(embed_args("3"), err), kExitOk) << err.str();
    const Eigen::MatrixXd E = io::read_matrix(path("embedding.csv"));
    EXPECT_EQ(E.rows(), 70);
    EXPECT_EQ(E.cols(), 5);
    EXPECT_EQ(E(39, 0), 0.0);
    EXPECT_EQ(E(39, 1), 39.0);
    EXPECT_EQ(E(40, 0), 1.0);
    EXPECT_EQ(E(40, 1), 0.0);
    const Eigen::MatrixXd S = io::read_matrix(path("spectrum.csv"));
    EXPECT_EQ(S.rows(), 30);
    EXPECT_NEAR(S(0, 1), 1.0, 1e-8);
}

TEST_F(EmbedCommand, AutoDimensionIsReported) {
    simulate_preset("clustering", 3.0, 60, 60, 20);
    std::ostringstream err;
    ASSERT_EQ(cmd_embed(embed_args("auto"), err), kExitOk) << err.str();
    EXPECT_NE(err.str().find("selected q = "), std::string::npos);
}

TEST_F(EmbedCommand, DiffusionTimeRescalesColumns) {
    simulate_preset("setting1", 1.0, 30, 35, 10);
    std::ostringstream err;
    ASSERT_EQ(cmd_embed(embed_args("4", 0.0), err), kExitOk);
    const Eigen::MatrixXd E0 = io::read_matrix(path("embedding.csv"));
    const Eigen::MatrixXd S = io::read_matrix(path("spectrum.csv"));
    ASSERT_EQ(cmd_embed(embed_args("4", 1.0), err), kExitOk);
    const Eigen::MatrixXd E1 = io::read_matrix(path("embedding.csv"));
    for (Index c = 0; c < 4; ++c) {
        const double s = S(c + 1, 1);
        EXPECT_LE((E1.col(c + 2) - s * E0.col(c + 2)).cwiseAbs().maxCoeff(), 1e-9) << c;
    }
}

TEST_F(EmbedCommand, ErrorsMapToExitCodes) {
    simulate_preset("setting1", 1.0, 10, 12, 6);
    std::ostringstream err;
    EXPECT_EQ(cmd_embed(embed_args("10"), err), kExitInput);
    EXPECT_EQ(cmd_embed(embed_args("2.5"), err), kExitInput);
    EXPECT_EQ(cmd_embed(embed_args("-1"), err), kExitInput);

    EmbedArgs bad_eps = embed_args("2");
    bad_eps.epsilon = "-3";
    EXPECT_EQ(cmd_embed(bad_eps, err), kExitInput);

    EmbedArgs missing = embed_args("2");
    missing.in_x = path("nope.csv");
    EXPECT_EQ(cmd_embed(missing, err), kExitInput);

    EmbedArgs stalled = embed_args("2");
    stalled.epsilon = "0.5";
    stalled.tol = 1e-15;
    stalled.max_iter = 2;
    std::ostringstream conv;
    EXPECT_EQ(cmd_embed(stalled, conv), kExitNumerical);
    EXPECT_NE(conv.str().find("residual"), std::string::npos) << conv.str();
}

TEST_F(EmbedCommand, MismatchedColumnsAreInputErrors) {
    write("x.csv", "1,2\n3,4\n5,6\n");
    write("y.csv", "1,2,3\n4,5,6\n");
    std::ostringstream err;
    EXPECT_EQ(cmd_embed(embed_args("1"), err), kExitInput);
}

using SpectrumCommand = Workdir;

TEST_F(SpectrumCommand, PrintsSingularValues) {
    simulate_preset("setting1", 1.0, 20, 25, 8);
    SpectrumArgs args;
    args.in_x = path("x.csv");
    args.in_y = path("y.csv");
    std::ostringstream out;
    std::ostringstream err;
    ASSERT_EQ(cmd_spectrum(args, out, err), kExitOk) << err.str();
    std::istringstream lines(out.str());
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        ++count;
    }
    EXPECT_EQ(count, 20);
    EXPECT_NE(err.str().find("eigengap q = "), std::string::npos);
}

using EvaluateCommand = Workdir;

TEST_F(EvaluateCommand, PerfectEmbeddingScoresOne) {
    // An "embedding" that is the latent matrix itself.
    const Eigen::MatrixXd latent = fixtures::gaussian_matrix(60, 3, 1);
    Eigen::MatrixXd table(60, 5);
    for (Index i = 0; i < 60; ++i) {
        table(i, 0) = i < 25 ? 0.0 : 1.0;
        table(i, 1) = static_cast<double>(i < 25 ? i : i - 25);
    }
    table.rightCols(3) = latent;
    io::write_matrix(path("embedding.csv"), table);
    io::write_matrix(path("latent.csv"), latent);
    EvaluateArgs args;
    args.embedding = path("embedding.csv");
    args.metric = "concordance";
    args.latent = path("latent.csv");
    args.k = 10;
    std::ostringstream out;
    std::ostringstream err;
    ASSERT_EQ(cmd_evaluate(args, out, err), kExitOk) << err.str();
    const auto report = nlohmann::json::parse(out.str());
    EXPECT_EQ(report["metric"], "concordance");
    EXPECT_DOUBLE_EQ(report["value"].get<double>(), 1.0);
    EXPECT_EQ(report["params"]["k"], 10);
}

TEST_F(EvaluateCommand, LabelMetrics) {
    // Two tight clusters at distance 10.
    write("embedding.csv", "0,0,0,0\n0,1,0,0\n1,0,10,0\n1,1,10,0\n");
    write("labels.csv", "0,0\n0,0\n1,1\n1,1\n");
    write("relabeled.csv", "5\n5\n2\n2\n");
    EvaluateArgs args;
    args.embedding = path("embedding.csv");
    args.labels = path("labels.csv");
    std::ostringstream err;
    auto value = [&](const std::string& metric) {
        args.metric = metric;
        std::ostringstream out;
        EXPECT_EQ(cmd_evaluate(args, out, err), kExitOk) << err.str();
        return nlohmann::json::parse(out.str())["value"].get<double>();
    };
    EXPECT_EQ(value("db"), 0.0);
    EXPECT_DOUBLE_EQ(value("silhouette"), 1.0);
    args.predicted = path("relabeled.csv");
    EXPECT_DOUBLE_EQ(value("rand"), 1.0);
    args.predicted.clear();
    EXPECT_DOUBLE_EQ(value("rand"), 1.0);
    args.k = 1;
    EXPECT_DOUBLE_EQ(value("purity"), 1.0);
}

TEST_F(EvaluateCommand, CoincidentCentroidsReportInfinity) {
    write("embedding.csv", "0,0,0\n0,1,1\n1,0,0\n1,1,1\n");
    write("labels.csv", "0,0\n0,0\n1,1\n1,1\n");
    EvaluateArgs args;
    args.embedding = path("embedding.csv");
    args.labels = path("labels.csv");
    args.metric = "db";
    std::ostringstream out;
    std::ostringstream err;
    ASSERT_EQ(cmd_evaluate(args, out, err), kExitOk);
    EXPECT_EQ(nlohmann::json::parse(out.str())["value"], "inf");
}

TEST_F(EvaluateCommand, MismatchedInputsExitTwo) {
    write("embedding.csv", "0,0,0\n0,1,1\n1,0,0\n");
    write("labels.csv", "0,0\n0,0\n");
    EvaluateArgs args;
    args.embedding = path("embedding.csv");
    std::ostringstream out;
    std::ostringstream err;
    args.metric = "rand";
    EXPECT_EQ(cmd_evaluate(args, out, err), kExitInput);
    EXPECT_NE(err.str().find("--labels"), std::string::npos);
    args.labels = path("labels.csv");
    EXPECT_EQ(cmd_evaluate(args, out, err), kExitInput);
    args.metric = "accuracy";
    EXPECT_EQ(cmd_evaluate(args, out, err), kExitInput);
    args.metric = "concordance";
    EXPECT_EQ(cmd_evaluate(args, out, err), kExitInput);
    write("gappy.csv", "0,0,0\n0,2,1\n1,0,0\n");
    args.embedding = path("gappy.csv");
    args.metric = "db";
    EXPECT_EQ(cmd_evaluate(args, out, err), kExitInput);
}

using DistancesCommand = Workdir;

TEST_F(DistancesCommand, MatchesFullEmbedding) {
    simulate_preset("setting1", 1.0, 15, 20, 6);
    write("pairs.csv", "XX,3,3\nXY,2,7\nYX,7,2\nXX,0,14\nYY,4,19\n");
    DistancesArgs args;
    args.in_x = path("x.csv");
    args.in_y = path("y.csv");
    args.pairs = path("pairs.csv");
    args.t = 2;
    args.out = path("distances.csv");
    std::ostringstream err;
    ASSERT_EQ(cmd_distances(args, std::cout, err), kExitOk) << err.str();
    const std::string text = slurp(path("distances.csv"));
    EXPECT_EQ(text.substr(0, 9), "XX,3,3,0\n");

    ASSERT_EQ(cmd_embed(embed_args("14", 2.0), err), kExitOk) << err.str();
    const Eigen::MatrixXd E = io::read_matrix(path("embedding.csv"));
    auto xrow = [&](Index i) { return Eigen::RowVectorXd(E.row(i).tail(14)); };
    auto yrow = [&](Index j) { return Eigen::RowVectorXd(E.row(15 + j).tail(14)); };
    std::istringstream lines(text);
    std::string line;
    std::vector<double> d;
    while (std::getline(lines, line)) {
        d.push_back(io::parse_number(line.substr(line.rfind(',') + 1), "distances"));
    }
    ASSERT_EQ(d.size(), 5u);
    EXPECT_NEAR(d[1], (xrow(2) - yrow(7)).norm(), 1e-8);
    EXPECT_EQ(d[1], d[2]);
    EXPECT_NEAR(d[3], (xrow(0) - xrow(14)).norm(), 1e-8);
    EXPECT_NEAR(d[4], (yrow(4) - yrow(19)).norm(), 1e-8);
}

TEST_F(DistancesCommand, BadRequestsExitTwo) {
    simulate_preset("setting1", 1.0, 8, 9, 5);
    DistancesArgs args;
    args.in_x = path("x.csv");
    args.in_y = path("y.csv");
    std::ostringstream out;
    std::ostringstream err;
    for (const char* pairs : {"XZ,1,2\n", "XX,1\n", "XY,1,-2\n", "XY,1,0.5\n", "XX,0,8\n", "YX,9,0\n"}) {
        args.pairs = write("pairs.csv", pairs);
        EXPECT_EQ(cmd_distances(args, out, err), kExitInput) << pairs;
    }
    args.pairs = write("pairs.csv", "XX,0,1\n");
    args.t = 0;
    EXPECT_EQ(cmd_distances(args, out, err), kExitInput);
}

using MatrixIo = Workdir;

TEST_F(MatrixIo, RoundTripIsExact) {
    Eigen::MatrixXd M = fixtures::gaussian_matrix(7, 4, 2) * 1e5;
    M(0, 0) = 1.0 / 3.0;
    M(1, 1) = -0.0;
    M(2, 2) = 5e-310;
    io::write_matrix(path("m.csv"), M);
    const Eigen::MatrixXd R = io::read_matrix(path("m.csv"));
    ASSERT_EQ(R.rows(), 7);
    EXPECT_TRUE(std::equal(M.data(), M.data() + M.size(), R.data()));
}

TEST_F(MatrixIo, HeadersDelimitersAndErrors) {
    write("tab.tsv", "a\tb\n1\t2\n\n3\t 4\n");
    const Eigen::MatrixXd T = io::read_matrix(io::MatrixFile{path("tab.tsv"), '\t', true});
    ASSERT_EQ(T.rows(), 2);
    EXPECT_EQ(T(1, 1), 4.0);
    EXPECT_THROW(io::read_matrix(write("ragged.csv", "1,2\n3\n")), InputError);
    EXPECT_THROW(io::read_matrix(write("text.csv", "1,x\n")), InputError);
    EXPECT_THROW(io::read_matrix(write("nan.csv", "1,nan\n")), InputError);
    EXPECT_THROW(io::read_matrix(write("empty.csv", "")), InputError);
    EXPECT_THROW(io::read_matrix(path("absent.csv")), InputError);
    EXPECT_EQ(io::format_number(0.1), "0.10000000000000001");
}

using Executable = Workdir;

TEST_F(Executable, EndToEndOnEveryPreset) {
    const std::string d = dir_.string();
    const char* presets[][2] = {{"setting1", "3"}, {"setting2", "0.5"}, {"clustering", "2"}};
    for (const auto& preset : presets) {
        write("c.json", std::string(R"({"schema_version": 1, "name": ")") + preset[0] + R"(", "param": )" + preset[1] +
                            R"(, "m": 50, "n": 40, "p": 20, "seed": 5})");
        ASSERT_EQ(run_cli("simulate --config " + d + "/c.json --out-x " + d + "/x.csv --out-y " + d + "/y.csv --out-latent " +
                          d + "/l.csv --out-labels " + d + "/c.csv"),
                  0)
            << preset[0];
        ASSERT_EQ(run_cli("--threads 2 embed --x " + d + "/x.csv --y " + d + "/y.csv --q auto --out " + d + "/e.csv"), 0);
        EXPECT_EQ(run_cli("evaluate --embedding " + d + "/e.csv --metric concordance --latent " + d + "/l.csv --k 10"), 0);
        EXPECT_EQ(run_cli("evaluate --embedding " + d + "/e.csv --metric silhouette --labels " + d + "/c.csv --label-column 0"),
                  0);
    }
    EXPECT_EQ(run_cli("evaluate --embedding " + d + "/e.csv --metric rand"), 2);
    EXPECT_EQ(run_cli("embed --x " + d + "/x.csv"), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);
    EXPECT_EQ(run_cli("--help"), 0);
}
