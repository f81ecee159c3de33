#include <doctest.h>

#include <fstream>

#include "sompca/eval.hpp"
#include "sompca/io.hpp"
#include "sompca/trainer.hpp"

#include "../support/proc.hpp"

using namespace sompca;
using testutil::TempDir;

TEST_CASE("TEN1 datasets round-trip") {
    TempDir dir;
    const LabeledDataset original = data_synth(3, 4, {4, 3, 2}, 2.0, 1.0, 60);
    const std::string path = dir.file("data.ten");
    save_dataset(path, original);
    const LabeledDataset loaded = load_dataset(path);

    REQUIRE(loaded.size() == original.size());
    CHECK(loaded.labels == original.labels);
    for (int i = 0; i < loaded.size(); ++i) {
        CHECK(loaded.samples[static_cast<std::size_t>(i)].shape() == Shape{4, 3, 2});
        CHECK(loaded.samples[static_cast<std::size_t>(i)].values() ==
              original.samples[static_cast<std::size_t>(i)].values());
    }
}

TEST_CASE("TEN1 loader rejects malformed files") {
    TempDir dir;

    SUBCASE("wrong magic") {
        const std::string path = dir.file("bad.ten");
        std::ofstream(path, std::ios::binary) << "NOPE" << std::string(64, '\0');
        CHECK_THROWS_AS(load_dataset(path), FileFormatError);
    }
    SUBCASE("truncated payload") {
        const LabeledDataset ds = data_synth(2, 2, {3}, 1.0, 1.0, 1);
        const std::string path = dir.file("trunc.ten");
        save_dataset(path, ds);
        std::string bytes = testutil::slurp(path);
        bytes.resize(bytes.size() - 5);
        std::ofstream(path, std::ios::binary | std::ios::trunc) << bytes;
        CHECK_THROWS_AS(load_dataset(path), FileFormatError);
    }
    SUBCASE("trailing bytes") {
        const LabeledDataset ds = data_synth(2, 2, {3}, 1.0, 1.0, 1);
        const std::string path = dir.file("extra.ten");
        save_dataset(path, ds);
        std::ofstream(path, std::ios::binary | std::ios::app) << "x";
        CHECK_THROWS_AS(load_dataset(path), FileFormatError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_dataset(dir.file("nope.ten")), FileFormatError);
    }
}

TEST_CASE("model files round-trip bit-exactly") {
    TempDir dir;
    const LabeledDataset ds = data_synth(3, 6, {5, 4, 3}, 2.0, 1.0, 7);
    TrainConfig cfg;
    cfg.variant = Variant::SoMpcaRs;
    cfg.features = 4;
    const TrainResult trained = train(ds.samples, cfg);

    const std::string path = dir.file("model.json");
    save_model(path, trained.model);
    const TvpModel loaded = load_model(path);

    CHECK(loaded.variant == trained.model.variant);
    CHECK(loaded.shape == trained.model.shape);
    CHECK(loaded.nu == trained.model.nu);
    CHECK(loaded.iterations == trained.model.iterations);
    REQUIRE(loaded.num_features() == trained.model.num_features());
    for (int p = 0; p < loaded.num_features(); ++p) {
        CHECK(loaded.emps[static_cast<std::size_t>(p)].scatter ==
              trained.model.emps[static_cast<std::size_t>(p)].scatter);
        for (std::size_t n = 0; n < loaded.emps[static_cast<std::size_t>(p)].vectors.size(); ++n)
            CHECK(loaded.emps[static_cast<std::size_t>(p)].vectors[n] ==
                  trained.model.emps[static_cast<std::size_t>(p)].vectors[n]);
    }

    // projections through the reloaded model are bit-identical
    const Eigen::MatrixXd a = tvp_project_all(ds.samples, trained.model);
    const Eigen::MatrixXd b = tvp_project_all(ds.samples, loaded);
    CHECK(a == b);
}

TEST_CASE("model loader rejects malformed documents") {
    TempDir dir;
    const std::string path = dir.file("model.json");

    SUBCASE("not json") {
        std::ofstream(path) << "not a model";
        CHECK_THROWS_AS(load_model(path), FileFormatError);
    }
    SUBCASE("wrong format tag") {
        std::ofstream(path) << R"({"format":"other","version":1})";
        CHECK_THROWS_AS(load_model(path), FileFormatError);
    }
    SUBCASE("vector length mismatch") {
        std::ofstream(path) << R"({"format":"sompca-model","version":1,"variant":"so-mpca",
            "shape":[2,2],"nu":1,"iterations":20,
            "emps":[{"scatter":1.0,"vectors":[[1.0,0.0],[1.0]]}]})";
        CHECK_THROWS_AS(load_model(path), FileFormatError);
    }
    SUBCASE("non-unit vector") {
        std::ofstream(path) << R"({"format":"sompca-model","version":1,"variant":"so-mpca",
            "shape":[2],"nu":1,"iterations":20,
            "emps":[{"scatter":1.0,"vectors":[[2.0,0.0]]}]})";
        CHECK_THROWS_AS(load_model(path), FileFormatError);
    }
    SUBCASE("nu sentinel must match the variant") {
        std::ofstream(path) << R"({"format":"sompca-model","version":1,"variant":"so-mpca",
            "shape":[2],"nu":0,"iterations":20,
            "emps":[{"scatter":1.0,"vectors":[[1.0,0.0]]}]})";
        CHECK_THROWS_AS(load_model(path), FileFormatError);
    }
    SUBCASE("feature count above the variant bound") {
        std::ofstream(path) << R"({"format":"sompca-model","version":1,"variant":"so-mpca",
            "shape":[2],"nu":1,"iterations":20,"emps":[
            {"scatter":3.0,"vectors":[[1.0,0.0]]},
            {"scatter":2.0,"vectors":[[0.0,1.0]]},
            {"scatter":1.0,"vectors":[[1.0,0.0]]}]})";
        CHECK_THROWS_AS(load_model(path), FileFormatError);
    }
    SUBCASE("constrained-mode vectors must stay orthogonal") {
        std::ofstream(path) << R"({"format":"sompca-model","version":1,"variant":"so-mpca",
            "shape":[2],"nu":1,"iterations":20,"emps":[
            {"scatter":3.0,"vectors":[[1.0,0.0]]},
            {"scatter":2.0,"vectors":[[1.0,0.0]]}]})";
        CHECK_THROWS_AS(load_model(path), FileFormatError);
    }
}

TEST_CASE("csv directory import") {
    TempDir dir;
    const auto csv_dir = dir.path() / "csvs";
    std::filesystem::create_directories(csv_dir);
    std::ofstream(csv_dir / "3_first.csv") << "1.5,2\n3,4\n";
    std::ofstream(csv_dir / "7_second.csv") << "5,6\n7,8.25\n";
    std::ofstream(csv_dir / "unlabeled.csv") << "0,0\n0,1\n";

    const LabeledDataset ds = import_csv_dir(csv_dir.string());
    REQUIRE(ds.size() == 3);
    CHECK(ds.labels == std::vector<int>{3, 7, -1});
    CHECK(ds.samples[0].shape() == Shape{2, 2});
    CHECK(ds.samples[0].values() == std::vector<double>{1.5, 2, 3, 4});
    CHECK(ds.samples[2].values() == std::vector<double>{0, 0, 0, 1});

    SUBCASE("ragged rows are rejected") {
        std::ofstream(csv_dir / "zz_bad.csv") << "1,2\n3\n";
        CHECK_THROWS_AS(import_csv_dir(csv_dir.string()), FileFormatError);
    }
    SUBCASE("mismatched matrix sizes are a shape error") {
        std::ofstream(csv_dir / "zz_wide.csv") << "1,2,3\n4,5,6\n";
        CHECK_THROWS_AS(import_csv_dir(csv_dir.string()), ShapeError);
    }
}
