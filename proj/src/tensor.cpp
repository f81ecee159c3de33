#include "sompca/tensor.hpp"

#include <sstream>
#include <string>
#include <utility>

namespace sompca {

std::size_t element_count(const Shape& shape) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    return n;
}

bool valid_shape(const Shape& shape) {
    if (shape.empty()) return false;
    for (int d : shape)
        if (d < 1) return false;
    return true;
}

std::string shape_to_string(const Shape& shape) {
    std::ostringstream os;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    return os.str();
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
    if (!valid_shape(shape_))
        throw ArgumentError("tensor shape must have order >= 1 with all dimensions >= 1");
    data_.assign(element_count(shape_), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (!valid_shape(shape_))
        throw ArgumentError("tensor shape must have order >= 1 with all dimensions >= 1");
    if (data_.size() != element_count(shape_))
        throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_to_string(shape_));
}

int Tensor::dim(int mode) const {
    if (mode < 1 || mode > order())
        throw ShapeError("mode " + std::to_string(mode) + " out of range for order-" +
                         std::to_string(order()) + " tensor");
    return shape_[static_cast<std::size_t>(mode - 1)];
}

std::size_t Tensor::offset_of(const std::vector<int>& index) const {
    if (index.size() != shape_.size())
        throw ShapeError("index has " + std::to_string(index.size()) + " entries, expected " +
                         std::to_string(shape_.size()));
    std::size_t off = 0;
    for (std::size_t k = 0; k < shape_.size(); ++k) {
        if (index[k] < 0 || index[k] >= shape_[k])
            throw ArgumentError("tensor index out of range in mode " + std::to_string(k + 1));
        off = off * static_cast<std::size_t>(shape_[k]) + static_cast<std::size_t>(index[k]);
    }
    return off;
}

double Tensor::at(const std::vector<int>& index) const { return data_[offset_of(index)]; }
double& Tensor::at(const std::vector<int>& index) { return data_[offset_of(index)]; }

Tensor Tensor::reshaped(Shape new_shape) const {
    if (!valid_shape(new_shape))
        throw ArgumentError("tensor shape must have order >= 1 with all dimensions >= 1");
    if (element_count(new_shape) != data_.size())
        throw ShapeError("cannot reshape " + shape_to_string(shape_) + " to " +
                         shape_to_string(new_shape) + ": element counts differ");
    return Tensor(std::move(new_shape), data_);
}

Tensor Tensor::flattened() const {
    return reshaped({static_cast<int>(data_.size())});
}

Tensor n_mode_product(const Tensor& t, const Eigen::VectorXd& u, int mode) {
    const int n = t.order();
    if (mode < 1 || mode > n)
        throw ShapeError("n-mode product: mode " + std::to_string(mode) +
                         " out of range for order-" + std::to_string(n) + " tensor");
    const Shape& shape = t.shape();
    const int dim_n = shape[static_cast<std::size_t>(mode - 1)];
    if (u.size() != dim_n)
        throw ShapeError("n-mode product: vector length " + std::to_string(u.size()) +
                         " does not match dimension " + std::to_string(dim_n) + " of mode " +
                         std::to_string(mode));

    std::size_t outer = 1, inner = 1;
    for (int k = 0; k < mode - 1; ++k) outer *= static_cast<std::size_t>(shape[k]);
    for (int k = mode; k < n; ++k) inner *= static_cast<std::size_t>(shape[k]);

    Shape out_shape = shape;
    out_shape[static_cast<std::size_t>(mode - 1)] = 1;
    Tensor out(std::move(out_shape));

    const double* src = t.data();
    double* dst = out.data();
    for (std::size_t o = 0; o < outer; ++o) {
        Eigen::Map<Eigen::VectorXd> acc(dst + o * inner, static_cast<Eigen::Index>(inner));
        for (int j = 0; j < dim_n; ++j) {
            Eigen::Map<const Eigen::VectorXd> slab(
                src + (o * static_cast<std::size_t>(dim_n) + static_cast<std::size_t>(j)) * inner,
                static_cast<Eigen::Index>(inner));
            acc += u[j] * slab;
        }
    }
    return out;
}

} // namespace sompca
