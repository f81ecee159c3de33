#include <doctest.h>

#include <fstream>
#include <sstream>

#include "sompca/eval.hpp"
#include "sompca/io.hpp"
#include "sompca/trainer.hpp"
#include "sompca/tvp.hpp"

#include "../support/proc.hpp"
#include "../support/structured.hpp"

using namespace sompca;
using testutil::TempDir;
using testutil::cli_path;
using testutil::run_command;

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty()) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

} // namespace

TEST_CASE("cli end-to-end: synth, train, project, variance, eval") {
    TempDir dir;
    const std::string cli = cli_path();
    const std::string data = dir.file("data.ten");
    const std::string model = dir.file("model.json");

    // synth is deterministic per seed
    REQUIRE(run_command(cli + " synth --classes 3 --per-class 6 --dims 5x4x3 --sep 4 --noise 1"
                              " --seed 9 --out " + data).exit_code == 0);
    const std::string data2 = dir.file("data2.ten");
    REQUIRE(run_command(cli + " synth --classes 3 --per-class 6 --dims 5x4x3 --sep 4 --noise 1"
                              " --seed 9 --out " + data2).exit_code == 0);
    CHECK(testutil::slurp(data) == testutil::slurp(data2));

    // train writes a model and a per-sweep CSV trace
    const auto train_run = run_command(cli + " train --input " + data +
                                       " --algo so-mpca-rs --features 4 --out " + model);
    REQUIRE(train_run.exit_code == 0);
    const auto trace_lines = split_lines(train_run.output);
    REQUIRE(!trace_lines.empty());
    CHECK(trace_lines[0] == "p,sweep,scatter");
    CHECK(split_csv_row(trace_lines[1])[0] == "1");
    CHECK(split_csv_row(trace_lines[1])[1] == "0"); // fixed relaxed-start entry
    // 1 relaxed-start row + 3 features x 20 sweeps
    CHECK(trace_lines.size() == 1 + 1 + 3 * 20);

    // project emits one row per sample with features in scatter-sorted order
    const auto project_run = run_command(cli + " project --model " + model + " --input " + data);
    REQUIRE(project_run.exit_code == 0);
    const auto proj_lines = split_lines(project_run.output);
    REQUIRE(proj_lines.size() == 1 + 18);
    CHECK(proj_lines[0] == "f1,f2,f3,f4,label");

    // CSV features equal a library-level recomputation on a few samples
    const LabeledDataset ds = load_dataset(data);
    const TvpModel mdl = load_model(model);
    const auto order = sort_features_by_scatter(mdl);
    for (int i : {0, 7, 17}) {
        const Eigen::VectorXd feats = tvp_project(ds.samples[static_cast<std::size_t>(i)], mdl);
        const auto cells = split_csv_row(proj_lines[static_cast<std::size_t>(i + 1)]);
        REQUIRE(cells.size() == 5);
        for (int j = 0; j < 4; ++j)
            CHECK(std::stod(cells[static_cast<std::size_t>(j)]) ==
                  feats[order[static_cast<std::size_t>(j)]]);
        CHECK(std::stoi(cells[4]) == ds.labels[static_cast<std::size_t>(i)]);
    }

    // variance report has one row per feature with the documented columns
    const auto var_run = run_command(cli + " variance --model " + model + " --input " + data);
    REQUIRE(var_run.exit_code == 0);
    const auto var_lines = split_lines(var_run.output);
    REQUIRE(var_lines.size() == 1 + 4);
    CHECK(var_lines[0] == "feature_index,scatter_unsorted,rank_sorted,scatter_sorted");

    // eval in split mode: header + one row per (P, rank)
    const auto eval_run = run_command(cli + " eval --data " + data +
                                      " --splits 2 --reps 3 --algo so-mpca-rs"
                                      " --features 2,5,99 --ranks 1 --seed 3");
    REQUIRE(eval_run.exit_code == 0);
    const auto eval_lines = split_lines(eval_run.output);
    REQUIRE(eval_lines.size() == 1 + 3);
    CHECK(eval_lines[0] == "algo,subset,P,rank,mean_rate_percent,std_percent");
    CHECK(split_csv_row(eval_lines[1])[0] == "so-mpca-rs");
    CHECK(split_csv_row(eval_lines[1])[1] == "2");
    CHECK(split_csv_row(eval_lines[3])[4] == "-"); // P=99 exceeds the bound of 5
    CHECK(split_csv_row(eval_lines[3])[5] == "-");

    // eval in gallery-probe mode: std column is exactly zero
    const std::string probe = dir.file("probe.ten");
    REQUIRE(run_command(cli + " synth --classes 3 --per-class 2 --dims 5x4x3 --sep 4 --noise 1"
                              " --seed 10 --out " + probe).exit_code == 0);
    const auto gp_run = run_command(cli + " eval --train " + data + " --test " + probe +
                                    " --algo so-mpca --features 3 --ranks 1,2");
    REQUIRE(gp_run.exit_code == 0);
    const auto gp_lines = split_lines(gp_run.output);
    REQUIRE(gp_lines.size() == 1 + 2);
    for (int r = 1; r <= 2; ++r) {
        const auto cells = split_csv_row(gp_lines[static_cast<std::size_t>(r)]);
        CHECK(cells[1] == "probe");
        CHECK(cells[5] == "0.00");
    }
}

TEST_CASE("cli variance matches stored scatters on converged models") {
    TempDir dir;
    const std::string cli = cli_path();
    const std::string data = dir.file("structured.ten");

    // data with crisp spectral gaps so sweep 20 leaves nothing on the table
    LabeledDataset ds;
    ds.samples = testutil::structured_samples(30, {6, 5, 4}, 515);
    ds.labels.assign(30, -1);
    save_dataset(data, ds);

    const std::string model = dir.file("model.json");
    REQUIRE(run_command(cli + " train --input " + data +
                        " --algo so-mpca-rs --features 5 --out " + model).exit_code == 0);
    const TvpModel mdl = load_model(model);

    const auto run = run_command(cli + " variance --model " + model + " --input " + data);
    REQUIRE(run.exit_code == 0);
    const auto lines = split_lines(run.output);
    REQUIRE(lines.size() == 1 + 5);
    double prev_sorted = 0;
    for (int p = 0; p < 5; ++p) {
        const auto cells = split_csv_row(lines[static_cast<std::size_t>(p + 1)]);
        REQUIRE(cells.size() == 4);
        CHECK(std::stod(cells[1]) ==
              doctest::Approx(mdl.emps[static_cast<std::size_t>(p)].scatter).epsilon(1e-8));
        const double sorted = std::stod(cells[3]);
        if (p > 0) CHECK(sorted <= prev_sorted);
        prev_sorted = sorted;
    }
}

TEST_CASE("cli exit codes follow the documented taxonomy") {
    TempDir dir;
    const std::string cli = cli_path();
    const std::string data = dir.file("data.ten");
    REQUIRE(run_command(cli + " synth --classes 2 --per-class 4 --dims 10x8x6 --sep 2 --noise 1"
                              " --seed 1 --out " + data).exit_code == 0);

    SUBCASE("feature bound violations exit 2 and name the bound") {
        const auto run = run_command(cli + " train --input " + data +
                                     " --algo fo-mpca --features 7 --out " + dir.file("m.json"));
        CHECK(run.exit_code == 2);
    }
    SUBCASE("malformed dataset exits 3") {
        const std::string bad = dir.file("bad.ten");
        std::ofstream(bad, std::ios::binary) << "garbage bytes, not a dataset";
        const auto run = run_command(cli + " train --input " + bad + " --out " + dir.file("m.json"));
        CHECK(run.exit_code == 3);
    }
    SUBCASE("shape mismatches exit 4") {
        const std::string model = dir.file("m.json");
        REQUIRE(run_command(cli + " train --input " + data + " --algo so-mpca --features 2 --out " +
                            model).exit_code == 0);
        const std::string other = dir.file("other.ten");
        REQUIRE(run_command(cli + " synth --classes 2 --per-class 3 --dims 4x4 --sep 1 --noise 1"
                                  " --seed 2 --out " + other).exit_code == 0);
        const auto run = run_command(cli + " project --model " + model + " --input " + other);
        CHECK(run.exit_code == 4);
    }
    SUBCASE("bad dims string exits 2") {
        const auto run = run_command(cli + " synth --classes 2 --per-class 2 --dims 3xx2"
                                           " --seed 1 --out " + dir.file("x.ten"));
        CHECK(run.exit_code == 2);
    }
    SUBCASE("conflicting eval modes exit 2") {
        const auto run = run_command(cli + " eval --data " + data + " --splits 1 --train " + data +
                                     " --test " + data + " --features 1");
        CHECK(run.exit_code == 2);
    }
}

TEST_CASE("cli default iteration count is 20") {
    TempDir dir;
    const std::string cli = cli_path();
    const std::string data = dir.file("data.ten");
    REQUIRE(run_command(cli + " synth --classes 2 --per-class 3 --dims 4x3 --sep 2 --noise 1"
                              " --seed 4 --out " + data).exit_code == 0);
    const std::string model = dir.file("m.json");
    REQUIRE(run_command(cli + " train --input " + data + " --algo so-mpca --features 2 --out " +
                        model).exit_code == 0);
    CHECK(load_model(model).iterations == 20);
}

TEST_CASE("cli feature auto trains the nu-mode bound and runs are byte-identical") {
    TempDir dir;
    const std::string cli = cli_path();
    const std::string data = dir.file("data.ten");
    REQUIRE(run_command(cli + " synth --classes 2 --per-class 4 --dims 10x8x6 --sep 3 --noise 1"
                              " --seed 6 --out " + data).exit_code == 0);

    const std::string a = dir.file("a.json"), b = dir.file("b.json");
    REQUIRE(run_command(cli + " train --input " + data + " --algo so-mpca-rs --features auto"
                              " --out " + a).exit_code == 0);
    REQUIRE(run_command(cli + " train --input " + data + " --algo so-mpca-rs --features auto"
                              " --out " + b).exit_code == 0);
    CHECK(load_model(a).num_features() == 10);
    CHECK(testutil::slurp(a) == testutil::slurp(b));
}

TEST_CASE("cli project on a single-feature model emits one feature column") {
    TempDir dir;
    const std::string cli = cli_path();
    const std::string data = dir.file("data.ten");
    REQUIRE(run_command(cli + " synth --classes 2 --per-class 3 --dims 3x4 --sep 2 --noise 1"
                              " --seed 8 --out " + data).exit_code == 0);
    const std::string model = dir.file("m.json");
    REQUIRE(run_command(cli + " train --input " + data + " --algo so-mpca --features 1 --out " +
                        model).exit_code == 0);
    const auto run = run_command(cli + " project --model " + model + " --input " + data);
    REQUIRE(run.exit_code == 0);
    const auto lines = split_lines(run.output);
    CHECK(lines[0] == "f1,label");
    CHECK(split_csv_row(lines[1]).size() == 2);
}

TEST_CASE("cli import-csv bundles matrices into a dataset") {
    TempDir dir;
    const std::string cli = cli_path();
    const auto csv_dir = dir.path() / "csvs";
    std::filesystem::create_directories(csv_dir);
    std::ofstream(csv_dir / "0_a.csv") << "1,2\n3,4\n";
    std::ofstream(csv_dir / "1_b.csv") << "5,6\n7,8\n";

    const std::string out = dir.file("imported.ten");
    REQUIRE(run_command(cli + " import-csv --dir " + csv_dir.string() + " --out " + out).exit_code == 0);
    const LabeledDataset ds = load_dataset(out);
    REQUIRE(ds.size() == 2);
    CHECK(ds.labels == std::vector<int>{0, 1});
    CHECK(ds.samples[0].shape() == Shape{2, 2});
}
