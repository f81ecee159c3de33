#include "sompca/spectral.hpp"

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

#include "sompca/errors.hpp"

namespace sompca {

ScatterMatrix::ScatterMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() < 1 || entries_.rows() != entries_.cols())
        throw ArgumentError("scatter matrix must be square and non-empty");
    const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
    if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw ArgumentError("scatter matrix must be symmetric");
}

ScatterMatrix scatter_matrix(const std::vector<Eigen::VectorXd>& samples) {
    if (samples.empty())
        throw ArgumentError("scatter matrix requires at least one sample");
    const Eigen::Index d = samples[0].size();
    for (const auto& s : samples)
        if (s.size() != d)
            throw ShapeError("scatter matrix samples must share one dimension");

    Eigen::MatrixXd dev(d, static_cast<Eigen::Index>(samples.size()));
    for (std::size_t m = 0; m < samples.size(); ++m)
        dev.col(static_cast<Eigen::Index>(m)) = samples[m];
    const Eigen::VectorXd mean = dev.rowwise().mean();
    dev.colwise() -= mean;

    // Rank update keeps the result exactly symmetric.
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
    s.selfadjointView<Eigen::Lower>().rankUpdate(dev);
    s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
    return ScatterMatrix(std::move(s));
}

double total_scatter(const Eigen::VectorXd& projections) {
    if (projections.size() < 1)
        throw ArgumentError("total scatter requires at least one projection");
    const double mean = projections.mean();
    return (projections.array() - mean).square().sum();
}

double scatter_value(const std::vector<Tensor>& samples, const Emp& e) {
    if (samples.empty())
        throw ArgumentError("scatter value requires at least one sample");
    Eigen::VectorXd y(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t m = 0; m < samples.size(); ++m)
        y[static_cast<Eigen::Index>(m)] = emp_project(samples[m], e);
    return total_scatter(y);
}

double scatter_value(const std::vector<Eigen::VectorXd>& samples, const Eigen::VectorXd& direction) {
    if (samples.empty())
        throw ArgumentError("scatter value requires at least one sample");
    Eigen::VectorXd y(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t m = 0; m < samples.size(); ++m) {
        if (samples[m].size() != direction.size())
            throw ShapeError("direction length does not match sample dimension");
        y[static_cast<Eigen::Index>(m)] = samples[m].dot(direction);
    }
    return total_scatter(y);
}

Projector::Projector(int dim) : dim_(dim) {
    if (dim < 1) throw ArgumentError("projector dimension must be >= 1");
}

void Projector::add(Eigen::VectorXd u) {
    if (u.size() != dim_)
        throw ShapeError("projector basis vector length " + std::to_string(u.size()) +
                         " does not match dimension " + std::to_string(dim_));
    if (std::abs(u.norm() - 1.0) > 1e-8)
        throw ArgumentError("projector basis vectors must be unit length");
    for (const auto& q : basis_)
        if (std::abs(q.dot(u)) > 1e-8)
            throw ArgumentError("projector basis vectors must be pairwise orthogonal");
    basis_.push_back(std::move(u));
}

Eigen::VectorXd Projector::apply(const Eigen::VectorXd& v) const {
    if (v.size() != dim_)
        throw ShapeError("projector input length " + std::to_string(v.size()) +
                         " does not match dimension " + std::to_string(dim_));
    Eigen::VectorXd out = v;
    for (const auto& q : basis_)
        out -= q.dot(v) * q;
    return out;
}

Eigen::VectorXd apply_projector(const Projector& g, const Eigen::VectorXd& v) {
    return g.apply(v);
}

namespace {

// Largest-magnitude component positive; ties broken by lowest index.
void fix_sign(Eigen::VectorXd& v) {
    int best = 0;
    double mag = std::abs(v[0]);
    for (int i = 1; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > mag) {
            mag = a;
            best = i;
        }
    }
    if (v[best] < 0.0) v = -v;
}

} // namespace

EigenPair dominant_eigvec(const ScatterMatrix& s) {
    return constrained_dominant_eigvec(s, Projector(s.dim()));
}

EigenPair constrained_dominant_eigvec(const ScatterMatrix& s, const Projector& g) {
    const int d = s.dim();
    if (g.dim() != d)
        throw ShapeError("projector dimension does not match scatter dimension");
    const int b = g.size();
    if (b >= d)
        throw FeasibilityError("no feasible direction left: deflation basis of size " +
                               std::to_string(b) + " spans the " + std::to_string(d) +
                               "-dimensional mode; the mode dimension bounds the feature count");

    // Symmetric surrogate B = Gamma S Gamma, assembled without forming Gamma.
    Eigen::MatrixXd surrogate = s.entries();
    if (b > 0) {
        Eigen::MatrixXd basis(d, b);
        for (int q = 0; q < b; ++q) basis.col(q) = g.basis()[static_cast<std::size_t>(q)];
        const Eigen::MatrixXd su = s.entries() * basis;                  // S U
        const Eigen::MatrixXd usu = basis.transpose() * su;              // U^T S U
        surrogate.noalias() -= basis * su.transpose();
        surrogate.noalias() -= su * basis.transpose();
        surrogate.noalias() += basis * usu * basis.transpose();
        surrogate = 0.5 * (surrogate + surrogate.transpose()).eval();
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(surrogate);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("symmetric eigendecomposition failed");
    const double top = solver.eigenvalues()(d - 1);
    const double trace = s.entries().trace();

    if (trace <= 0.0 || top <= 1e-12 * trace) {
        // All remaining variance is numerically zero. Fall back to the first
        // canonical basis vector with a nonzero projection so successive
        // deflation proceeds deterministically.
        for (int j = 0; j < d; ++j) {
            Eigen::VectorXd w = g.apply(Eigen::VectorXd::Unit(d, j));
            const double norm = w.norm();
            if (norm > 1e-8) {
                w /= norm;
                fix_sign(w);
                return {std::move(w), 0.0};
            }
        }
        throw std::runtime_error("deflation basis unexpectedly spans the space");
    }

    Eigen::VectorXd u = solver.eigenvectors().col(d - 1);
    // Re-project and renormalize to suppress orthogonality drift across many
    // deflation steps.
    u = g.apply(u);
    u.normalize();
    fix_sign(u);
    const double lambda = std::max(0.0, u.dot(s.entries() * u));
    return {std::move(u), lambda};
}

} // namespace sompca
