#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "sompca/errors.hpp"

namespace sompca {

// Mode dimensions (I_1, ..., I_N). Modes are addressed 1-based throughout
// the public API, matching the usual tensor-literature convention.
using Shape = std::vector<int>;

std::size_t element_count(const Shape& shape);
bool valid_shape(const Shape& shape);
std::string shape_to_string(const Shape& shape);

// Dense real tensor of order N >= 1, stored in generalized row-major order
// (last index varies fastest). Treated as immutable once filled; copies are
// cheap enough at the scales this library targets.
class Tensor {
public:
    explicit Tensor(Shape shape);
    Tensor(Shape shape, std::vector<double> data);

    int order() const { return static_cast<int>(shape_.size()); }
    const Shape& shape() const { return shape_; }
    int dim(int mode) const; // 1-based
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    const std::vector<double>& values() const { return data_; }

    // Element access with 0-based indices, one per mode.
    double at(const std::vector<int>& index) const;
    double& at(const std::vector<int>& index);

    // Relabels the row-major buffer under a new shape with the same element
    // count. Flattening a sample for the vector-PCA baseline is reshaped({D}).
    Tensor reshaped(Shape new_shape) const;
    Tensor flattened() const;

private:
    std::size_t offset_of(const std::vector<int>& index) const;

    Shape shape_;
    std::vector<double> data_;
};

// n-mode product t x_n u^T: contracts mode n against u, leaving a tensor
// whose n-th dimension is 1. Entry (i_1,...,1,...,i_N) is
// sum_{i_n} t(i_1,...,i_N) * u(i_n).
Tensor n_mode_product(const Tensor& t, const Eigen::VectorXd& u, int mode);

} // namespace sompca
