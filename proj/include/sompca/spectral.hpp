#pragma once

#include <vector>

#include <Eigen/Core>

#include "sompca/tensor.hpp"
#include "sompca/tvp.hpp"

namespace sompca {

// Unnormalized total scatter matrix S = sum_m (y_m - ybar)(y_m - ybar)^T.
// Symmetric positive semi-definite by construction.
class ScatterMatrix {
public:
    explicit ScatterMatrix(Eigen::MatrixXd entries);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Eigen::MatrixXd& entries() const { return entries_; }

private:
    Eigen::MatrixXd entries_;
};

ScatterMatrix scatter_matrix(const std::vector<Eigen::VectorXd>& samples);

// Total scatter of scalar projections: sum_m (y_m - ybar)^2.
double total_scatter(const Eigen::VectorXd& projections);

// Captured scatter S_p of an EMP over tensor samples.
double scatter_value(const std::vector<Tensor>& samples, const Emp& e);
// Scatter captured along a direction within vector samples; equals u^T S u.
double scatter_value(const std::vector<Eigen::VectorXd>& samples, const Eigen::VectorXd& direction);

// Deflation projector Gamma = I - sum_q u_q u_q^T over the previously
// accepted unit vectors. Applied without materializing the dim x dim matrix.
class Projector {
public:
    explicit Projector(int dim);

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(basis_.size()); }
    const std::vector<Eigen::VectorXd>& basis() const { return basis_; }

    // Accepts the next deflation vector; must be unit length and orthogonal
    // to the existing basis within 1e-8.
    void add(Eigen::VectorXd u);

    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;

private:
    int dim_;
    std::vector<Eigen::VectorXd> basis_;
};

Eigen::VectorXd apply_projector(const Projector& g, const Eigen::VectorXd& v);

struct EigenPair {
    Eigen::VectorXd vector;
    double value = 0.0;
};

// Unit eigenvector of the largest eigenvalue. Sign fixed so the component of
// largest magnitude (lowest index on ties) is positive.
EigenPair dominant_eigvec(const ScatterMatrix& s);

// Solves Gamma S u = lambda u for the largest lambda through the symmetric
// surrogate Gamma S Gamma; eigenvectors with nonzero eigenvalue lie in
// range(Gamma) and satisfy the original problem. The returned u is
// re-projected through Gamma and renormalized, and lambda equals u^T S u.
// Rank-deficient scatter falls back to the first canonical basis vector with
// a nonzero projection, with lambda = 0, so callers proceed deterministically.
EigenPair constrained_dominant_eigvec(const ScatterMatrix& s, const Projector& g);

} // namespace sompca
