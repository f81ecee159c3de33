#include "sompca/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "sompca/errors.hpp"
#include "sompca/rng.hpp"
#include "sompca/spectral.hpp"

namespace sompca {

std::vector<int> nn_classify(const Eigen::MatrixXd& gallery, const std::vector<int>& labels,
                             const Eigen::VectorXd& query, int k) {
    const int m = static_cast<int>(gallery.rows());
    if (m == 0)
        throw ArgumentError("nearest-neighbor gallery is empty");
    if (static_cast<int>(labels.size()) != m)
        throw ArgumentError("gallery has " + std::to_string(m) + " rows but " +
                            std::to_string(labels.size()) + " labels");
    if (k < 1 || k > m)
        throw ArgumentError("rank depth " + std::to_string(k) + " must be in 1.." +
                            std::to_string(m));
    if (query.size() != gallery.cols())
        throw ShapeError("query length " + std::to_string(query.size()) +
                         " does not match gallery feature count " +
                         std::to_string(gallery.cols()));

    Eigen::VectorXd dist2 = (gallery.rowwise() - query.transpose()).rowwise().squaredNorm();
    std::vector<int> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](int a, int b) {
        if (dist2[a] != dist2[b]) return dist2[a] < dist2[b];
        return a < b;
    });
    std::vector<int> out(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    return out;
}

double recognition_rate(const std::vector<std::vector<int>>& predictions,
                        const std::vector<int>& truths, int rank) {
    if (predictions.size() != truths.size())
        throw ArgumentError("prediction and truth counts differ");
    if (predictions.empty())
        throw ArgumentError("recognition rate requires at least one query");
    if (rank < 1)
        throw ArgumentError("rank must be >= 1");
    int hits = 0;
    for (std::size_t q = 0; q < predictions.size(); ++q) {
        const auto& preds = predictions[q];
        if (static_cast<int>(preds.size()) < rank)
            throw ArgumentError("prediction list shorter than rank " + std::to_string(rank));
        for (int r = 0; r < rank; ++r)
            if (preds[static_cast<std::size_t>(r)] == truths[q]) {
                ++hits;
                break;
            }
    }
    return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

namespace {

// Scatter-sorted feature matrices for a trained model.
Eigen::MatrixXd sorted_features(const std::vector<Tensor>& samples, const TvpModel& model,
                                const std::vector<int>& order) {
    Eigen::MatrixXd raw = tvp_project_all(samples, model);
    Eigen::MatrixXd sorted(raw.rows(), raw.cols());
    for (std::size_t j = 0; j < order.size(); ++j)
        sorted.col(static_cast<Eigen::Index>(j)) = raw.col(order[j]);
    return sorted;
}

// Rank-r rates of a gallery/probe pair over the top-P sorted features.
std::vector<double> classify_rates(const Eigen::MatrixXd& gallery, const std::vector<int>& gallery_labels,
                                   const Eigen::MatrixXd& probe, const std::vector<int>& probe_labels,
                                   int top_p, const std::vector<int>& ranks) {
    const int kmax = *std::max_element(ranks.begin(), ranks.end());
    std::vector<std::vector<int>> predictions;
    predictions.reserve(static_cast<std::size_t>(probe.rows()));
    const Eigen::MatrixXd gal = gallery.leftCols(top_p);
    for (Eigen::Index q = 0; q < probe.rows(); ++q)
        predictions.push_back(
            nn_classify(gal, gallery_labels, probe.row(q).head(top_p).transpose(), kmax));
    std::vector<double> rates;
    rates.reserve(ranks.size());
    for (int r : ranks)
        rates.push_back(recognition_rate(predictions, probe_labels, r));
    return rates;
}

void check_eval_lists(const std::vector<int>& feature_counts, const std::vector<int>& ranks) {
    if (feature_counts.empty())
        throw ArgumentError("feature count list is empty");
    for (int p : feature_counts)
        if (p < 1) throw ArgumentError("feature counts must be >= 1");
    if (ranks.empty())
        throw ArgumentError("rank list is empty");
    for (int r : ranks)
        if (r < 1) throw ArgumentError("ranks must be >= 1");
}

EvalReport make_report(const std::vector<int>& feature_counts, const std::vector<int>& ranks,
                       int repetitions) {
    EvalReport report;
    report.feature_counts = feature_counts;
    report.ranks = ranks;
    report.repetitions = repetitions;
    report.cells.assign(feature_counts.size(), std::vector<RateCell>(ranks.size()));
    return report;
}

void finalize_cells(EvalReport& report) {
    for (auto& row : report.cells)
        for (auto& cell : row) {
            if (cell.per_rep.empty()) continue;
            cell.available = true;
            const double n = static_cast<double>(cell.per_rep.size());
            cell.mean = std::accumulate(cell.per_rep.begin(), cell.per_rep.end(), 0.0) / n;
            double ss = 0.0;
            for (double v : cell.per_rep) ss += (v - cell.mean) * (v - cell.mean);
            cell.stddev = std::sqrt(ss / n);
        }
}

} // namespace

EvalReport run_split_protocol(const LabeledDataset& data, const TrainConfig& cfg,
                              int per_class_train, int repetitions,
                              const std::vector<int>& feature_counts,
                              const std::vector<int>& ranks, std::uint64_t seed) {
    if (data.samples.size() != data.labels.size())
        throw ArgumentError("sample and label counts differ");
    if (per_class_train < 1)
        throw ArgumentError("per-class training count must be >= 1");
    if (repetitions < 1)
        throw ArgumentError("repetition count must be >= 1");
    check_eval_lists(feature_counts, ranks);

    std::map<int, std::vector<int>> by_class;
    for (int i = 0; i < data.size(); ++i) {
        if (data.labels[static_cast<std::size_t>(i)] < 0)
            throw ArgumentError("split protocol requires non-negative labels");
        by_class[data.labels[static_cast<std::size_t>(i)]].push_back(i);
    }
    for (const auto& [label, members] : by_class)
        if (static_cast<int>(members.size()) <= per_class_train)
            throw ArgumentError("class " + std::to_string(label) + " has " +
                                std::to_string(members.size()) + " samples; need more than " +
                                std::to_string(per_class_train) + " for the split");

    EvalReport report = make_report(feature_counts, ranks, repetitions);
    for (int rep = 0; rep < repetitions; ++rep) {
        SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(rep));
        std::vector<Tensor> train_samples;
        std::vector<int> train_labels, test_idx;
        for (const auto& [label, members] : by_class) {
            const std::vector<int> chosen = sample_without_replacement(
                rng, static_cast<int>(members.size()), per_class_train);
            std::vector<bool> picked(members.size(), false);
            for (int c : chosen) picked[static_cast<std::size_t>(c)] = true;
            for (std::size_t j = 0; j < members.size(); ++j) {
                if (picked[j]) {
                    train_samples.push_back(data.samples[static_cast<std::size_t>(members[j])]);
                    train_labels.push_back(label);
                } else {
                    test_idx.push_back(members[j]);
                }
            }
        }
        std::vector<Tensor> test_samples;
        std::vector<int> test_labels;
        for (int i : test_idx) {
            test_samples.push_back(data.samples[static_cast<std::size_t>(i)]);
            test_labels.push_back(data.labels[static_cast<std::size_t>(i)]);
        }

        const TrainResult trained = train(train_samples, cfg);
        const std::vector<int> order = sort_features_by_scatter(trained.model);
        const Eigen::MatrixXd gallery = sorted_features(train_samples, trained.model, order);
        const Eigen::MatrixXd probe = sorted_features(test_samples, trained.model, order);

        for (std::size_t pi = 0; pi < feature_counts.size(); ++pi) {
            const int p = feature_counts[pi];
            if (p > trained.model.num_features()) continue;
            const std::vector<double> rates =
                classify_rates(gallery, train_labels, probe, test_labels, p, ranks);
            for (std::size_t ri = 0; ri < ranks.size(); ++ri)
                report.cells[pi][ri].per_rep.push_back(rates[ri]);
        }
    }
    finalize_cells(report);
    return report;
}

EvalReport run_gallery_probe(const LabeledDataset& gallery, const LabeledDataset& probe,
                             const TrainConfig& cfg, const std::vector<int>& feature_counts,
                             const std::vector<int>& ranks) {
    if (gallery.samples.size() != gallery.labels.size() ||
        probe.samples.size() != probe.labels.size())
        throw ArgumentError("sample and label counts differ");
    if (gallery.samples.empty() || probe.samples.empty())
        throw ArgumentError("gallery and probe sets must be non-empty");
    check_eval_lists(feature_counts, ranks);

    const TrainResult trained = train(gallery.samples, cfg);
    const std::vector<int> order = sort_features_by_scatter(trained.model);
    const Eigen::MatrixXd gal = sorted_features(gallery.samples, trained.model, order);
    const Eigen::MatrixXd prb = sorted_features(probe.samples, trained.model, order);

    EvalReport report = make_report(feature_counts, ranks, 1);
    for (std::size_t pi = 0; pi < feature_counts.size(); ++pi) {
        const int p = feature_counts[pi];
        if (p > trained.model.num_features()) continue;
        const std::vector<double> rates =
            classify_rates(gal, gallery.labels, prb, probe.labels, p, ranks);
        for (std::size_t ri = 0; ri < ranks.size(); ++ri)
            report.cells[pi][ri].per_rep.push_back(rates[ri]);
    }
    finalize_cells(report);
    return report;
}

VarianceReport variance_report(const TvpModel& model, const std::vector<Tensor>& data) {
    if (data.empty())
        throw ArgumentError("variance report requires at least one sample");
    const Eigen::MatrixXd feats = tvp_project_all(data, model);
    VarianceReport report;
    report.scatter.resize(static_cast<std::size_t>(model.num_features()));
    for (int p = 0; p < model.num_features(); ++p)
        report.scatter[static_cast<std::size_t>(p)] = total_scatter(feats.col(p));
    report.order.resize(report.scatter.size());
    std::iota(report.order.begin(), report.order.end(), 0);
    std::stable_sort(report.order.begin(), report.order.end(), [&](int a, int b) {
        return report.scatter[static_cast<std::size_t>(a)] > report.scatter[static_cast<std::size_t>(b)];
    });
    report.sorted.reserve(report.scatter.size());
    for (int i : report.order) report.sorted.push_back(report.scatter[static_cast<std::size_t>(i)]);
    return report;
}

LabeledDataset data_synth(int classes, int per_class, const Shape& shape,
                          double class_separation, double noise_sigma, std::uint64_t seed) {
    if (classes < 1)
        throw ArgumentError("class count must be >= 1");
    if (per_class < 1)
        throw ArgumentError("per-class sample count must be >= 1");
    if (!valid_shape(shape))
        throw ArgumentError("dataset shape must have order >= 1 with all dimensions >= 1");
    if (noise_sigma < 0)
        throw ArgumentError("noise sigma must be >= 0");

    const std::size_t count = element_count(shape);
    SplitMix64 rng(seed);
    LabeledDataset out;
    out.samples.reserve(static_cast<std::size_t>(classes * per_class));
    out.labels.reserve(static_cast<std::size_t>(classes * per_class));

    // All class means are drawn before any sample noise, so two runs with the
    // same seed and class count share identities even when the per-class
    // sample counts differ (e.g. a gallery and its probe set).
    std::vector<std::vector<double>> means(static_cast<std::size_t>(classes),
                                           std::vector<double>(count));
    for (auto& mean : means)
        for (std::size_t i = 0; i < count; ++i)
            mean[i] = class_separation * rng.next_normal();

    for (int c = 0; c < classes; ++c) {
        const auto& mean = means[static_cast<std::size_t>(c)];
        for (int s = 0; s < per_class; ++s) {
            Tensor t(shape);
            double* v = t.data();
            for (std::size_t i = 0; i < count; ++i)
                v[i] = mean[i] + noise_sigma * rng.next_normal();
            out.samples.push_back(std::move(t));
            out.labels.push_back(c);
        }
    }
    return out;
}

} // namespace sompca
