#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "sompca/tensor.hpp"
#include "sompca/trainer.hpp"
#include "sompca/tvp.hpp"

namespace sompca {

// M samples of identical shape with integer class labels. Files may carry -1
// for unlabeled samples; the split protocol requires non-negative labels.
struct LabeledDataset {
    std::vector<Tensor> samples;
    std::vector<int> labels;

    int size() const { return static_cast<int>(samples.size()); }
};

// Labels of the k nearest gallery samples (distinct samples, not distinct
// labels) by Euclidean distance, ascending; ties broken by lower gallery
// index. Gallery rows are samples.
std::vector<int> nn_classify(const Eigen::MatrixXd& gallery, const std::vector<int>& labels,
                             const Eigen::VectorXd& query, int k);

// Fraction of queries whose true label appears among the first `rank`
// predictions.
double recognition_rate(const std::vector<std::vector<int>>& predictions,
                        const std::vector<int>& truths, int rank);

struct RateCell {
    bool available = false;
    double mean = 0.0;
    double stddev = 0.0; // population std over repetitions
    std::vector<double> per_rep;
};

struct EvalReport {
    std::vector<int> feature_counts;
    std::vector<int> ranks;
    std::vector<std::vector<RateCell>> cells; // [feature index][rank index]
    int repetitions = 0;
};

// The random-split protocol: per repetition, draw `per_class_train` samples
// from each class (seeded, reproducible), train on them, sort features by
// scatter, and classify the held-out rest with the top-P features for every
// P in `feature_counts`. Cells whose P exceeds the trained feature count are
// marked unavailable. Repetition r draws from SplitMix64::substream(seed, r).
EvalReport run_split_protocol(const LabeledDataset& data, const TrainConfig& cfg,
                              int per_class_train, int repetitions,
                              const std::vector<int>& feature_counts,
                              const std::vector<int>& ranks, std::uint64_t seed);

// Fixed gallery/probe evaluation: train on the gallery, classify the probe
// set. One repetition, zero std.
EvalReport run_gallery_probe(const LabeledDataset& gallery, const LabeledDataset& probe,
                             const TrainConfig& cfg, const std::vector<int>& feature_counts,
                             const std::vector<int>& ranks);

struct VarianceReport {
    std::vector<double> scatter;  // per feature, training order
    std::vector<int> order;       // 0-based feature indices, descending scatter
    std::vector<double> sorted;   // scatter in descending order
};

// Recomputes each EMP's captured scatter on the given data.
VarianceReport variance_report(const TvpModel& model, const std::vector<Tensor>& data);

// Seeded synthetic dataset: per class a random mean tensor with entries
// scaled by `class_separation`, plus elementwise Gaussian noise of standard
// deviation `noise_sigma` per sample.
LabeledDataset data_synth(int classes, int per_class, const Shape& shape,
                          double class_separation, double noise_sigma, std::uint64_t seed);

} // namespace sompca
