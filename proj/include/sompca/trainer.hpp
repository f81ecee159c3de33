#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "sompca/spectral.hpp"
#include "sompca/tensor.hpp"
#include "sompca/tvp.hpp"

namespace sompca {

inline constexpr int kAuto = 0; // sentinel for features / nu "auto"

struct TrainConfig {
    Variant variant = Variant::SoMpcaRs;
    int features = kAuto;            // P; 0 derives the variant's maximum
    int iterations = 20;             // ALS sweeps K per EMP
    int nu = kAuto;                  // constrained mode; 0 picks the largest
    std::uint64_t seed = 0;          // reserved for data synthesis; training is deterministic
    double convergence_epsilon = 0;  // 0 disables early stopping
};

// Constrained mode: the mode with the highest dimension, ties broken by the
// smallest mode index. 1-based.
int select_nu(const Shape& shape);

// Upper bound on the number of extractable features. Semi-orthogonal
// variants are bounded by the nu-mode dimension, the fully orthogonal
// variant by the lowest mode dimension, and the vector baseline by
// min(prod I_n, M - 1) when the sample count is known.
int max_features(const Shape& shape, Variant variant,
                 std::optional<int> sample_count = std::nullopt);

// The relaxed-start EMP: every mode vector is the normalized uniform vector.
Emp uniform_emp(const Shape& shape);

// Stable descending order of EMP indices by captured scatter (0-based).
std::vector<int> sort_features_by_scatter(const TvpModel& model);

struct TraceEntry {
    int feature; // p, 1-based
    int sweep;   // ALS sweep k, 1-based; 0 marks the fixed relaxed-start EMP
    double scatter;
};

struct TrainTrace {
    std::vector<TraceEntry> entries;
};

// Emitted at every constrained (deflated) eigensolve; lets callers audit the
// eigenproblem residuals on the exact operands used.
struct ConstrainedSolveEvent {
    int feature;
    int sweep;
    int mode;
    Eigen::MatrixXd scatter;
    std::vector<Eigen::VectorXd> basis;
    Eigen::VectorXd vector;
    double value;
};
using SolveObserver = std::function<void(const ConstrainedSolveEvent&)>;

struct TrainResult {
    TvpModel model;
    TrainTrace trace;
};

// Successive, conditional (alternating least squares) derivation of the EMPs.
// EMPs are found one at a time; within each, K sweeps update every mode
// vector as the dominant eigenvector of the partial-projection scatter,
// deflated against previously accepted vectors in the constrained mode(s).
// The vector baseline flattens samples and solves each feature in one sweep.
TrainResult train(const std::vector<Tensor>& samples, const TrainConfig& cfg,
                  const SolveObserver& observer = {});

} // namespace sompca
