// sompca: train/project/eval/variance/synth front end over TEN1 datasets.
//
// Exit codes: 0 success, 2 usage or feature-bound errors, 3 malformed input
// files, 4 shape mismatches, 1 unexpected failures.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sompca/errors.hpp"
#include "sompca/eval.hpp"
#include "sompca/io.hpp"
#include "sompca/trainer.hpp"
#include "sompca/tvp.hpp"

namespace {

using namespace sompca;

std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * fraction);
    return buf;
}

// Writes to the --out path, or stdout when none was given.
void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::trunc);
    if (!out)
        throw FileFormatError(out_path + ": cannot open for writing");
    out << text;
    if (!out.good())
        throw FileFormatError(out_path + ": write error");
}

Variant parse_variant(const std::string& name) {
    const auto v = variant_from_name(name);
    if (!v)
        throw ArgumentError("unknown algorithm '" + name + "'");
    return *v;
}

int parse_auto_or_int(const std::string& text, const char* what) {
    if (text == "auto") return kAuto;
    int value = 0;
    try {
        std::size_t used = 0;
        value = std::stoi(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw ArgumentError(std::string(what) + " must be 'auto' or an integer, got '" + text + "'");
    }
    if (value < 1)
        throw ArgumentError(std::string(what) + " must be >= 1");
    return value;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(item, &used);
            if (used != item.size() || v < 1) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ArgumentError(std::string(what) + ": expected comma-separated integers >= 1, got '" +
                                text + "'");
        }
    }
    if (out.empty())
        throw ArgumentError(std::string(what) + " list is empty");
    return out;
}

Shape parse_dims(const std::string& text) {
    Shape shape;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, 'x')) {
        try {
            std::size_t used = 0;
            const int d = std::stoi(item, &used);
            if (used != item.size() || d < 1) throw std::invalid_argument(item);
            shape.push_back(d);
        } catch (const std::exception&) {
            throw ArgumentError("--dims must look like 32x22x10, got '" + text + "'");
        }
    }
    if (shape.empty())
        throw ArgumentError("--dims must name at least one dimension");
    return shape;
}

struct TrainFlags {
    std::string algo = "so-mpca-rs";
    std::string features = "auto";
    int iters = 20;
    std::string nu = "auto";
    double epsilon = 0.0;

    TrainConfig to_config() const {
        TrainConfig cfg;
        cfg.variant = parse_variant(algo);
        cfg.features = features == "auto" ? kAuto : parse_auto_or_int(features, "--features");
        cfg.iterations = iters;
        cfg.nu = nu == "auto" ? kAuto : parse_auto_or_int(nu, "--nu");
        cfg.convergence_epsilon = epsilon;
        return cfg;
    }
};

void add_train_flags(CLI::App* cmd, TrainFlags& flags) {
    cmd->add_option("--algo", flags.algo, "Algorithm: so-mpca-rs, so-mpca, fo-mpca, pca")
        ->default_val(flags.algo);
    cmd->add_option("--iters", flags.iters, "ALS sweeps per feature")->default_val(flags.iters);
    cmd->add_option("--nu", flags.nu, "Constrained mode index, or 'auto' for the largest mode")
        ->default_val(flags.nu);
    cmd->add_option("--epsilon", flags.epsilon, "Early-stop threshold on relative scatter gain (0 = off)")
        ->default_val(flags.epsilon);
}

int cmd_train(const std::string& input, const TrainFlags& flags, const std::string& out) {
    const LabeledDataset data = load_dataset(input);
    const TrainResult result = train(data.samples, flags.to_config());
    save_model(out, result.model);
    std::string csv = "p,sweep,scatter\n";
    for (const auto& entry : result.trace.entries)
        csv += std::to_string(entry.feature) + "," + std::to_string(entry.sweep) + "," +
               fmt_full(entry.scatter) + "\n";
    std::cout << csv;
    return 0;
}

int cmd_project(const std::string& model_path, const std::string& input, const std::string& out) {
    const TvpModel model = load_model(model_path);
    const LabeledDataset data = load_dataset(input);
    const Eigen::MatrixXd feats = tvp_project_all(data.samples, model);
    const std::vector<int> order = sort_features_by_scatter(model);

    std::string csv;
    for (std::size_t j = 0; j < order.size(); ++j) csv += "f" + std::to_string(j + 1) + ",";
    csv += "label\n";
    for (Eigen::Index i = 0; i < feats.rows(); ++i) {
        for (int p : order) csv += fmt_full(feats(i, p)) + ",";
        csv += std::to_string(data.labels[static_cast<std::size_t>(i)]) + "\n";
    }
    emit(out, csv);
    return 0;
}

std::string report_rows(const EvalReport& report, const std::string& algo,
                        const std::string& subset) {
    std::string csv;
    for (std::size_t pi = 0; pi < report.feature_counts.size(); ++pi) {
        for (std::size_t ri = 0; ri < report.ranks.size(); ++ri) {
            const RateCell& cell = report.cells[pi][ri];
            csv += algo + "," + subset + "," + std::to_string(report.feature_counts[pi]) + "," +
                   std::to_string(report.ranks[ri]) + ",";
            if (cell.available)
                csv += fmt_percent(cell.mean) + "," + fmt_percent(cell.stddev);
            else
                csv += "-,-";
            csv += "\n";
        }
    }
    return csv;
}

int cmd_eval(const std::string& train_path, const std::string& test_path,
             const std::string& data_path, int splits, int reps, const TrainFlags& flags,
             const std::string& features, const std::string& ranks, std::uint64_t seed,
             const std::string& out) {
    const bool gallery_mode = !train_path.empty() || !test_path.empty();
    const bool split_mode = !data_path.empty() || splits > 0;
    if (gallery_mode == split_mode)
        throw ArgumentError("use either --train/--test (gallery-probe) or --data/--splits (random splits)");
    if (gallery_mode && (train_path.empty() || test_path.empty()))
        throw ArgumentError("gallery-probe mode needs both --train and --test");
    if (split_mode && (data_path.empty() || splits < 1))
        throw ArgumentError("split mode needs --data and --splits >= 1");

    const std::vector<int> p_list = parse_int_list(features, "--features");
    const std::vector<int> rank_list = parse_int_list(ranks, "--ranks");
    TrainConfig cfg = flags.to_config();
    cfg.features = kAuto; // train the variant's full feature set, then slice
    cfg.seed = seed;

    std::string csv = "algo,subset,P,rank,mean_rate_percent,std_percent\n";
    if (gallery_mode) {
        const LabeledDataset gallery = load_dataset(train_path);
        const LabeledDataset probe = load_dataset(test_path);
        const EvalReport report = run_gallery_probe(gallery, probe, cfg, p_list, rank_list);
        csv += report_rows(report, flags.algo, std::filesystem::path(test_path).stem().string());
    } else {
        const LabeledDataset data = load_dataset(data_path);
        const EvalReport report =
            run_split_protocol(data, cfg, splits, reps, p_list, rank_list, seed);
        csv += report_rows(report, flags.algo, std::to_string(splits));
    }
    emit(out, csv);
    return 0;
}

int cmd_variance(const std::string& model_path, const std::string& input, const std::string& out) {
    const TvpModel model = load_model(model_path);
    const LabeledDataset data = load_dataset(input);
    const VarianceReport report = variance_report(model, data.samples);

    std::string csv = "feature_index,scatter_unsorted,rank_sorted,scatter_sorted\n";
    for (std::size_t p = 0; p < report.scatter.size(); ++p)
        csv += std::to_string(p + 1) + "," + fmt_full(report.scatter[p]) + "," +
               std::to_string(report.order[p] + 1) + "," + fmt_full(report.sorted[p]) + "\n";
    emit(out, csv);
    return 0;
}

int cmd_synth(int classes, int per_class, const std::string& dims, double sep, double noise,
              std::uint64_t seed, const std::string& out) {
    const Shape shape = parse_dims(dims);
    const LabeledDataset data = data_synth(classes, per_class, shape, sep, noise, seed);
    save_dataset(out, data);
    return 0;
}

int cmd_import_csv(const std::string& dir, const std::string& out) {
    const LabeledDataset data = import_csv_dir(dir);
    save_dataset(out, data);
    std::cout << "imported " << data.size() << " samples of shape "
              << shape_to_string(data.samples[0].shape()) << "\n";
    return 0;
}

template <typename Fn>
int run_guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const FeatureBoundError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const FeasibilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const FileFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semi-orthogonal multilinear PCA feature learning"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "sompca 0.1.0");
    app.failure_message(CLI::FailureMessage::help);

    // train
    auto* train_cmd = app.add_subcommand("train", "Learn a projection model from a TEN1 dataset");
    std::string train_input, train_out, train_features = "auto";
    TrainFlags train_flags;
    train_cmd->add_option("--input", train_input, "TEN1 dataset")->required();
    train_cmd->add_option("--features", train_features, "Feature count P, or 'auto' for the bound")
        ->default_val(train_features);
    add_train_flags(train_cmd, train_flags);
    train_cmd->add_option("--out", train_out, "Output model path")->required();

    // project
    auto* project_cmd = app.add_subcommand("project", "Project samples to feature vectors (CSV)");
    std::string project_model, project_input, project_out;
    project_cmd->add_option("--model", project_model, "Model file")->required();
    project_cmd->add_option("--input", project_input, "TEN1 dataset")->required();
    project_cmd->add_option("--out", project_out, "Output CSV (default stdout)");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Nearest-neighbor recognition-rate tables");
    std::string eval_train, eval_test, eval_data, eval_features, eval_ranks = "1", eval_out;
    int eval_splits = 0, eval_reps = 10;
    std::uint64_t eval_seed = 0;
    TrainFlags eval_flags;
    eval_cmd->add_option("--train", eval_train, "Gallery TEN1 dataset (with --test)");
    eval_cmd->add_option("--test", eval_test, "Probe TEN1 dataset (with --train)");
    eval_cmd->add_option("--data", eval_data, "Dataset for random splits (with --splits)");
    eval_cmd->add_option("--splits", eval_splits, "Training samples per class (split mode)");
    eval_cmd->add_option("--reps", eval_reps, "Split repetitions")->default_val(eval_reps);
    eval_cmd->add_option("--features", eval_features, "Comma-separated P values")->required();
    eval_cmd->add_option("--ranks", eval_ranks, "Comma-separated rank depths")->default_val(eval_ranks);
    eval_cmd->add_option("--seed", eval_seed, "Split RNG seed")->default_val(eval_seed);
    add_train_flags(eval_cmd, eval_flags);
    eval_cmd->add_option("--out", eval_out, "Output CSV (default stdout)");

    // variance
    auto* var_cmd = app.add_subcommand("variance", "Per-feature captured scatter (CSV)");
    std::string var_model, var_input, var_out;
    var_cmd->add_option("--model", var_model, "Model file")->required();
    var_cmd->add_option("--input", var_input, "TEN1 dataset")->required();
    var_cmd->add_option("--out", var_out, "Output CSV (default stdout)");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Generate a seeded synthetic TEN1 dataset");
    int synth_classes = 0, synth_per_class = 0;
    std::string synth_dims, synth_out;
    double synth_sep = 1.0, synth_noise = 1.0;
    std::uint64_t synth_seed = 0;
    synth_cmd->add_option("--classes", synth_classes, "Number of classes")->required();
    synth_cmd->add_option("--per-class", synth_per_class, "Samples per class")->required();
    synth_cmd->add_option("--dims", synth_dims, "Tensor shape, e.g. 32x22x10")->required();
    synth_cmd->add_option("--sep", synth_sep, "Class-mean scale")->default_val(synth_sep);
    synth_cmd->add_option("--noise", synth_noise, "Within-class noise sigma")->default_val(synth_noise);
    synth_cmd->add_option("--seed", synth_seed, "RNG seed")->default_val(synth_seed);
    synth_cmd->add_option("--out", synth_out, "Output TEN1 path")->required();

    // import-csv
    auto* import_cmd = app.add_subcommand("import-csv", "Bundle a directory of CSV matrices into TEN1");
    std::string import_dir, import_out;
    import_cmd->add_option("--dir", import_dir, "Directory of .csv matrix files")->required();
    import_cmd->add_option("--out", import_out, "Output TEN1 path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    return run_guarded([&]() -> int {
        if (train_cmd->parsed()) {
            TrainFlags flags = train_flags;
            flags.features = train_features;
            return cmd_train(train_input, flags, train_out);
        }
        if (project_cmd->parsed()) return cmd_project(project_model, project_input, project_out);
        if (eval_cmd->parsed())
            return cmd_eval(eval_train, eval_test, eval_data, eval_splits, eval_reps, eval_flags,
                            eval_features, eval_ranks, eval_seed, eval_out);
        if (var_cmd->parsed()) return cmd_variance(var_model, var_input, var_out);
        if (synth_cmd->parsed())
            return cmd_synth(synth_classes, synth_per_class, synth_dims, synth_sep, synth_noise,
                             synth_seed, synth_out);
        if (import_cmd->parsed()) return cmd_import_csv(import_dir, import_out);
        return 2;
    });
}
