#include "sompca/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sompca/errors.hpp"

namespace sompca {

int select_nu(const Shape& shape) {
    if (!valid_shape(shape))
        throw ArgumentError("invalid shape");
    int best = 1;
    for (int n = 2; n <= static_cast<int>(shape.size()); ++n)
        if (shape[static_cast<std::size_t>(n - 1)] > shape[static_cast<std::size_t>(best - 1)])
            best = n;
    return best;
}

namespace {

int clamp_to_int(std::size_t n) {
    return n > static_cast<std::size_t>(std::numeric_limits<int>::max())
               ? std::numeric_limits<int>::max()
               : static_cast<int>(n);
}

int feature_bound(const Shape& shape, Variant variant, int nu, std::optional<int> sample_count) {
    switch (variant) {
    case Variant::SoMpcaRs:
    case Variant::SoMpca:
        return shape[static_cast<std::size_t>(nu - 1)];
    case Variant::FoMpca:
        return *std::min_element(shape.begin(), shape.end());
    case Variant::Pca: {
        const int flat = clamp_to_int(element_count(shape));
        if (sample_count) return std::min(flat, *sample_count - 1);
        return flat;
    }
    }
    throw ArgumentError("unknown variant");
}

} // namespace

int max_features(const Shape& shape, Variant variant, std::optional<int> sample_count) {
    if (!valid_shape(shape))
        throw ArgumentError("invalid shape");
    return feature_bound(shape, variant, select_nu(shape), sample_count);
}

Emp uniform_emp(const Shape& shape) {
    if (!valid_shape(shape))
        throw ArgumentError("invalid shape");
    Emp e;
    e.vectors.reserve(shape.size());
    for (int dim : shape)
        e.vectors.push_back(Eigen::VectorXd::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim))));
    return e;
}

std::vector<int> sort_features_by_scatter(const TvpModel& model) {
    std::vector<int> order(static_cast<std::size_t>(model.num_features()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return model.emps[static_cast<std::size_t>(a)].scatter >
               model.emps[static_cast<std::size_t>(b)].scatter;
    });
    return order;
}

TrainResult train(const std::vector<Tensor>& samples, const TrainConfig& cfg,
                  const SolveObserver& observer) {
    const int m_count = static_cast<int>(samples.size());
    if (m_count < 2)
        throw ArgumentError("training requires at least 2 samples");
    const Shape& input_shape = samples[0].shape();
    for (const auto& s : samples)
        if (s.shape() != input_shape)
            throw ShapeError("training samples must share one shape; found " +
                             shape_to_string(s.shape()) + " and " + shape_to_string(input_shape));
    if (cfg.iterations < 1)
        throw ArgumentError("iteration count must be >= 1");
    if (cfg.convergence_epsilon < 0)
        throw ArgumentError("convergence epsilon must be >= 0");

    const bool is_pca = cfg.variant == Variant::Pca;

    // The vector baseline works on row-major flattenings of the samples.
    std::vector<Tensor> flattened;
    const std::vector<Tensor>* data = &samples;
    Shape shape = input_shape;
    if (is_pca) {
        flattened.reserve(samples.size());
        for (const auto& s : samples) flattened.push_back(s.flattened());
        data = &flattened;
        shape = flattened[0].shape();
    }
    const int order = static_cast<int>(shape.size());

    int nu = 1;
    if (is_pca) {
        if (cfg.nu != kAuto)
            throw ArgumentError("the vector baseline has no mode to constrain");
    } else if (cfg.nu == kAuto) {
        nu = select_nu(shape);
    } else {
        if (cfg.nu < 1 || cfg.nu > order)
            throw ArgumentError("nu must be in 1.." + std::to_string(order));
        nu = cfg.nu;
    }

    const int bound = feature_bound(shape, cfg.variant, nu,
                                    is_pca ? std::optional<int>(m_count) : std::nullopt);
    const int features = cfg.features == kAuto ? bound : cfg.features;
    if (features < 1)
        throw ArgumentError("feature count must be >= 1");
    if (features > bound)
        throw FeatureBoundError("requested " + std::to_string(features) + " features but " +
                                    variant_name(cfg.variant) + " on shape " +
                                    shape_to_string(input_shape) + " allows at most " +
                                    std::to_string(bound),
                                bound);

    // Which modes carry the orthogonality constraint.
    std::vector<bool> constrained(static_cast<std::size_t>(order), false);
    if (cfg.variant == Variant::FoMpca)
        std::fill(constrained.begin(), constrained.end(), true);
    else
        constrained[static_cast<std::size_t>(nu - 1)] = true;

    std::vector<Projector> deflation;
    deflation.reserve(static_cast<std::size_t>(order));
    for (int n = 1; n <= order; ++n)
        deflation.emplace_back(shape[static_cast<std::size_t>(n - 1)]);

    TrainResult result;
    result.model.shape = shape;
    result.model.nu = is_pca ? 0 : nu;
    result.model.variant = cfg.variant;
    result.model.iterations = cfg.iterations;
    result.model.emps.resize(static_cast<std::size_t>(features));

    int first_feature = 1;
    if (cfg.variant == Variant::SoMpcaRs) {
        // Relaxed start: the first EMP is fixed to the uniform vectors and is
        // never optimized, but it does join the nu-mode deflation set.
        Emp& head = result.model.emps[0];
        head = uniform_emp(shape);
        head.scatter = scatter_value(*data, head);
        deflation[static_cast<std::size_t>(nu - 1)].add(head.vectors[static_cast<std::size_t>(nu - 1)]);
        result.trace.entries.push_back({1, 0, head.scatter});
        first_feature = 2;
    }

    // With a single mode the partial projections are the samples themselves,
    // so the scatter matrix is shared across features and one sweep is exact.
    std::optional<ScatterMatrix> shared_scatter;
    if (order == 1) {
        std::vector<Eigen::VectorXd> flat(static_cast<std::size_t>(m_count));
        for (int m = 0; m < m_count; ++m)
            flat[static_cast<std::size_t>(m)] =
                Eigen::Map<const Eigen::VectorXd>((*data)[static_cast<std::size_t>(m)].data(),
                                                  shape[0]);
        shared_scatter = scatter_matrix(flat);
    }
    const int sweeps = order == 1 ? 1 : cfg.iterations;

    std::vector<Eigen::VectorXd> partials(static_cast<std::size_t>(m_count));
    for (int p = first_feature; p <= features; ++p) {
        Emp emp = uniform_emp(shape);
        double nu_scatter = 0.0;
        double prev_scatter = 0.0;
        for (int k = 1; k <= sweeps; ++k) {
            for (int n = 1; n <= order; ++n) {
                const Projector& gamma = deflation[static_cast<std::size_t>(n - 1)];
                EigenPair solved;
                if (order == 1) {
                    solved = constrained_dominant_eigvec(*shared_scatter, gamma);
                    if (observer)
                        observer({p, k, n, shared_scatter->entries(), gamma.basis(),
                                  solved.vector, solved.value});
                } else {
                    for (int m = 0; m < m_count; ++m)
                        partials[static_cast<std::size_t>(m)] =
                            partial_projection((*data)[static_cast<std::size_t>(m)], emp, n);
                    const ScatterMatrix scatter = scatter_matrix(partials);
                    if (constrained[static_cast<std::size_t>(n - 1)]) {
                        solved = constrained_dominant_eigvec(scatter, gamma);
                        if (observer)
                            observer({p, k, n, scatter.entries(), gamma.basis(), solved.vector,
                                      solved.value});
                    } else {
                        solved = dominant_eigvec(scatter);
                    }
                }
                emp.vectors[static_cast<std::size_t>(n - 1)] = std::move(solved.vector);
                if (n == nu) nu_scatter = solved.value;
            }
            result.trace.entries.push_back({p, k, nu_scatter});
            if (cfg.convergence_epsilon > 0 && k >= 2 &&
                nu_scatter - prev_scatter < cfg.convergence_epsilon * std::max(1.0, nu_scatter))
                break;
            prev_scatter = nu_scatter;
        }
        emp.scatter = nu_scatter;
        for (int n = 1; n <= order; ++n)
            if (constrained[static_cast<std::size_t>(n - 1)])
                deflation[static_cast<std::size_t>(n - 1)].add(emp.vectors[static_cast<std::size_t>(n - 1)]);
        result.model.emps[static_cast<std::size_t>(p - 1)] = std::move(emp);
    }

    return result;
}

} // namespace sompca
