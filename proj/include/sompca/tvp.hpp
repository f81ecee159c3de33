#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sompca/tensor.hpp"

namespace sompca {

enum class Variant {
    SoMpcaRs, // semi-orthogonal, relaxed start
    SoMpca,   // semi-orthogonal
    FoMpca,   // fully orthogonal in every mode
    Pca,      // vector baseline on flattened samples
};

std::string variant_name(Variant v);
std::optional<Variant> variant_from_name(std::string_view name);

// Elementary multilinear projection: one unit vector per mode. Projects a
// tensor to a scalar. `scatter` is the total scatter this EMP captured in
// training; 0 until trained.
struct Emp {
    std::vector<Eigen::VectorXd> vectors;
    double scatter = 0.0;
};

// Tensor-to-vector projection: an ordered sequence of P EMPs plus training
// metadata. For the vector-PCA baseline `shape` is the flattened shape {D}
// and `nu` is the 0 sentinel; otherwise `nu` is the constrained mode (1-based).
struct TvpModel {
    Shape shape;
    std::vector<Emp> emps;
    int nu = 0;
    Variant variant = Variant::SoMpcaRs;
    int iterations = 0;

    int order() const { return static_cast<int>(shape.size()); }
    int num_features() const { return static_cast<int>(emps.size()); }
};

// y = t x_1 u^(1)T ... x_N u^(N)T, applied in ascending mode order.
double emp_project(const Tensor& t, const Emp& e);

// Projects by every mode vector except `excluded_mode`, squeezed to a vector
// of length I_n. emp_project(t, e) == dot(partial_projection(t, e, n), u^(n)).
Eigen::VectorXd partial_projection(const Tensor& t, const Emp& e, int excluded_mode);

// Feature vector of length P; component p is emp_project with the pth EMP.
// Order-1 models (the PCA baseline) also accept tensors with the matching
// element count, projecting their row-major flattening.
Eigen::VectorXd tvp_project(const Tensor& t, const TvpModel& m);

// Rows are samples, columns are features (training order, unsorted).
Eigen::MatrixXd tvp_project_all(const std::vector<Tensor>& samples, const TvpModel& m);

} // namespace sompca
