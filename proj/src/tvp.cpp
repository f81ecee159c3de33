#include "sompca/tvp.hpp"

#include <string>

namespace sompca {

std::string variant_name(Variant v) {
    switch (v) {
    case Variant::SoMpcaRs: return "so-mpca-rs";
    case Variant::SoMpca: return "so-mpca";
    case Variant::FoMpca: return "fo-mpca";
    case Variant::Pca: return "pca";
    }
    return "unknown";
}

std::optional<Variant> variant_from_name(std::string_view name) {
    if (name == "so-mpca-rs") return Variant::SoMpcaRs;
    if (name == "so-mpca") return Variant::SoMpca;
    if (name == "fo-mpca") return Variant::FoMpca;
    if (name == "pca") return Variant::Pca;
    return std::nullopt;
}

namespace {

void check_emp_shape(const Tensor& t, const Emp& e) {
    if (static_cast<int>(e.vectors.size()) != t.order())
        throw ShapeError("EMP has " + std::to_string(e.vectors.size()) +
                         " mode vectors but tensor has order " + std::to_string(t.order()));
    for (int n = 1; n <= t.order(); ++n) {
        const auto& u = e.vectors[static_cast<std::size_t>(n - 1)];
        if (u.size() != t.dim(n))
            throw ShapeError("EMP vector length " + std::to_string(u.size()) +
                             " does not match dimension " + std::to_string(t.dim(n)) +
                             " of mode " + std::to_string(n));
    }
}

} // namespace

double emp_project(const Tensor& t, const Emp& e) {
    check_emp_shape(t, e);
    Tensor cur = n_mode_product(t, e.vectors[0], 1);
    for (int n = 2; n <= t.order(); ++n)
        cur = n_mode_product(cur, e.vectors[static_cast<std::size_t>(n - 1)], n);
    return cur.data()[0];
}

Eigen::VectorXd partial_projection(const Tensor& t, const Emp& e, int excluded_mode) {
    check_emp_shape(t, e);
    if (excluded_mode < 1 || excluded_mode > t.order())
        throw ShapeError("partial projection: mode " + std::to_string(excluded_mode) +
                         " out of range for order-" + std::to_string(t.order()) + " tensor");
    const int len = t.dim(excluded_mode);
    if (t.order() == 1) {
        return Eigen::Map<const Eigen::VectorXd>(t.data(), len);
    }
    // Contract every mode but the excluded one; what is left is a tensor with
    // a single non-unit dimension, already contiguous in row-major order.
    const Tensor* src = &t;
    Tensor cur({1});
    for (int n = 1; n <= t.order(); ++n) {
        if (n == excluded_mode) continue;
        cur = n_mode_product(*src, e.vectors[static_cast<std::size_t>(n - 1)], n);
        src = &cur;
    }
    return Eigen::Map<const Eigen::VectorXd>(cur.data(), len);
}

namespace {

const Tensor* compatible_sample(const Tensor& t, const TvpModel& m, Tensor& storage) {
    if (t.shape() == m.shape) return &t;
    if (m.order() == 1 && static_cast<std::size_t>(m.shape[0]) == t.size()) {
        storage = t.flattened();
        return &storage;
    }
    throw ShapeError("sample shape " + shape_to_string(t.shape()) +
                     " does not match model shape " + shape_to_string(m.shape));
}

} // namespace

Eigen::VectorXd tvp_project(const Tensor& t, const TvpModel& m) {
    Tensor storage({1});
    const Tensor* sample = compatible_sample(t, m, storage);
    Eigen::VectorXd y(m.num_features());
    for (int p = 0; p < m.num_features(); ++p)
        y[p] = emp_project(*sample, m.emps[static_cast<std::size_t>(p)]);
    return y;
}

Eigen::MatrixXd tvp_project_all(const std::vector<Tensor>& samples, const TvpModel& m) {
    Eigen::MatrixXd feats(static_cast<Eigen::Index>(samples.size()), m.num_features());
    for (std::size_t i = 0; i < samples.size(); ++i)
        feats.row(static_cast<Eigen::Index>(i)) = tvp_project(samples[i], m).transpose();
    return feats;
}

} // namespace sompca
