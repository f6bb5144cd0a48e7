// Dense complex linear-algebra substrate: weighted Hermitian eigenproblems,
// non-normal eigendecompositions, diagonalization-based matrix exponentials,
// and quadrature rules. Everything here operates on Eigen dense types.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "staticprop/errors.hpp"

namespace staticprop {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double pi = std::numbers::pi;

// Relative deviation of A from Hermitian symmetry (Frobenius).
inline double hermitian_defect(const ComplexMatrix& a) {
    const double scale = a.norm();
    if (scale == 0.0) return 0.0;
    return (a - a.adjoint()).norm() / scale;
}

// A Hilbert space C^dim with inner product (u|v)_W = u^H W v.
// The weight must be Hermitian positive definite; its principal square
// root and inverse root are cached for reductions to standard problems.
class WeightedSpace {
public:
    explicit WeightedSpace(ComplexMatrix weight) : weight_(std::move(weight)) {
        if (weight_.rows() != weight_.cols() || weight_.rows() < 1)
            throw invalid_field("WeightedSpace: weight must be square and nonempty");
        if (hermitian_defect(weight_) > 1e-12)
            throw not_hermitian_in_weight("WeightedSpace: weight is not Hermitian");
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(weight_);
        if (es.info() != Eigen::Success)
            throw decomposition_failure("WeightedSpace: eigensolver failed on weight");
        min_eig_ = es.eigenvalues().minCoeff();
        if (min_eig_ <= 0.0)
            throw not_positive("WeightedSpace: weight has a nonpositive eigenvalue");
        const RealVector r = es.eigenvalues().cwiseSqrt();
        sqrt_ = es.eigenvectors() * r.asDiagonal() * es.eigenvectors().adjoint();
        inv_sqrt_ = es.eigenvectors() * r.cwiseInverse().asDiagonal() *
                    es.eigenvectors().adjoint();
    }

    static WeightedSpace identity(Index dim) {
        return WeightedSpace(ComplexMatrix::Identity(dim, dim));
    }

    Index dim() const { return weight_.rows(); }
    const ComplexMatrix& weight() const { return weight_; }
    const ComplexMatrix& sqrt() const { return sqrt_; }
    const ComplexMatrix& inv_sqrt() const { return inv_sqrt_; }
    double min_eig() const { return min_eig_; }

    Complex inner(const ComplexVector& u, const ComplexVector& v) const {
        return u.dot(weight_ * v);
    }
    double norm(const ComplexVector& u) const {
        return std::sqrt(std::max(0.0, std::real(inner(u, u))));
    }
    // Operator norm of A as a map on this space.
    double op_norm(const ComplexMatrix& a) const {
        return (sqrt_ * a * inv_sqrt_).jacobiSvd().singularValues()(0);
    }

private:
    ComplexMatrix weight_, sqrt_, inv_sqrt_;
    double min_eig_ = 0.0;
};

// Diagonalization A = V diag(values) V^{-1}.
struct EigenData {
    ComplexVector values;
    ComplexMatrix vectors;          // columns
    ComplexMatrix inverse_vectors;  // V^{-1}

    Index dim() const { return values.size(); }
    double max_abs() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
    double min_abs() const { return values.size() ? values.cwiseAbs().minCoeff() : 0.0; }

    ComplexMatrix reconstruct() const {
        return vectors * values.asDiagonal() * inverse_vectors;
    }
};

namespace detail {

inline void sort_eigendata(EigenData& ed) {
    const Index n = ed.dim();
    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        const Complex x = ed.values(a), y = ed.values(b);
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
    ComplexVector vals(n);
    ComplexMatrix vecs(n, n), inv(n, n);
    for (Index i = 0; i < n; ++i) {
        const Index j = order[static_cast<std::size_t>(i)];
        vals(i) = ed.values(j);
        vecs.col(i) = ed.vectors.col(j);
        inv.row(i) = ed.inverse_vectors.row(j);
    }
    ed.values = std::move(vals);
    ed.vectors = std::move(vecs);
    ed.inverse_vectors = std::move(inv);
}

}  // namespace detail

// Eigendecomposition of a W-Hermitian matrix A, i.e. WA = (WA)^H.
// Reduces to a standard Hermitian problem through the principal square
// root of W; eigenvalues come out real, eigenvectors W-orthonormal.
inline EigenData hermitian_eig_weighted(const ComplexMatrix& a, const WeightedSpace& w,
                                        double herm_tol = 1e-10) {
    if (a.rows() != a.cols() || a.rows() != w.dim())
        throw length_mismatch("hermitian_eig_weighted: dimension mismatch");
    const double defect = hermitian_defect(w.weight() * a);
    if (defect > herm_tol)
        throw not_hermitian_in_weight(
            "hermitian_eig_weighted: W*A deviates from Hermitian by relative " +
            std::to_string(defect));
    ComplexMatrix s = w.sqrt() * a * w.inv_sqrt();
    s = 0.5 * (s + s.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s);
    if (es.info() != Eigen::Success)
        throw decomposition_failure("hermitian_eig_weighted: eigensolver did not converge");
    EigenData ed;
    ed.values = es.eigenvalues().cast<Complex>();
    ed.vectors = w.inv_sqrt() * es.eigenvectors();
    ed.inverse_vectors = es.eigenvectors().adjoint() * w.sqrt();
    const double scale = a.norm();
    if (scale > 0.0 && (a - ed.reconstruct()).norm() > 1e-10 * scale)
        throw decomposition_failure("hermitian_eig_weighted: reconstruction residual too large");
    return ed;
}

// Eigendecomposition of a general (possibly non-normal) square matrix.
// Refuses eigenvector matrices whose condition number exceeds cond_bound.
inline EigenData general_eig(const ComplexMatrix& a, double cond_bound = 1e8) {
    if (a.rows() != a.cols() || a.rows() < 1)
        throw length_mismatch("general_eig: matrix must be square and nonempty");
    Eigen::ComplexEigenSolver<ComplexMatrix> es(a, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success)
        throw decomposition_failure("general_eig: eigensolver did not converge");
    EigenData ed;
    ed.values = es.eigenvalues();
    ed.vectors = es.eigenvectors();
    const auto svd = ed.vectors.jacobiSvd();
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    const double cond = smin > 0.0 ? svd.singularValues()(0) / smin
                                   : std::numeric_limits<double>::infinity();
    if (cond > cond_bound)
        throw ill_conditioned("general_eig: eigenvector condition number " +
                              std::to_string(cond) + " exceeds bound");
    ed.inverse_vectors = ed.vectors.partialPivLu().inverse();
    detail::sort_eigendata(ed);
    const double scale = a.norm();
    if (scale > 0.0 && (a - ed.reconstruct()).norm() > 1e-8 * scale)
        throw decomposition_failure("general_eig: reconstruction residual too large");
    return ed;
}

// e^{-i t A} U through an available diagonalization of A.
inline ComplexMatrix matrix_exp_action(const EigenData& ed, double t, const ComplexMatrix& u) {
    const ComplexVector phases =
        (Complex(0.0, -t) * ed.values.array()).exp().matrix();
    return ed.vectors * (phases.asDiagonal() * (ed.inverse_vectors * u));
}

inline ComplexMatrix matrix_exp_action(const ComplexMatrix& a, double t, const ComplexMatrix& u) {
    return matrix_exp_action(general_eig(a), t, u);
}

// ---------------------------------------------------------------- quadrature

enum class QuadKind { Trapezoid, GaussLegendre };

struct Quadrature {
    RealVector nodes;
    RealVector weights;

    double integrate(const RealVector& samples) const { return weights.dot(samples); }
};

namespace detail {

// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(std::max(y[i], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double d = static_cast<double>(n) * sxx - sx * sx;
    return (static_cast<double>(n) * sxy - sx * sy) / d;
}

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
inline void gauss_legendre_reference(Index n, RealVector& x, RealVector& w) {
    x.resize(n);
    w.resize(n);
    const Index m = (n + 1) / 2;
    for (Index i = 0; i < m; ++i) {
        double z = std::cos(pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (Index j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * static_cast<double>(j) + 1.0) * z * p1 -
                      static_cast<double>(j) * p2) /
                     (static_cast<double>(j) + 1.0);
            }
            pp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x(i) = -z;
        x(n - 1 - i) = z;
        w(i) = 2.0 / ((1.0 - z * z) * pp * pp);
        w(n - 1 - i) = w(i);
    }
}

}  // namespace detail

inline Quadrature quadrature(QuadKind kind, double a, double b, Index n) {
    if (!(a < b)) throw bad_interval("quadrature: requires a < b");
    if (n < 2) throw bad_interval("quadrature: requires n >= 2");
    Quadrature q;
    switch (kind) {
        case QuadKind::Trapezoid: {
            q.nodes = RealVector::LinSpaced(n, a, b);
            const double h = (b - a) / static_cast<double>(n - 1);
            q.weights = RealVector::Constant(n, h);
            q.weights(0) = 0.5 * h;
            q.weights(n - 1) = 0.5 * h;
            break;
        }
        case QuadKind::GaussLegendre: {
            RealVector x, w;
            detail::gauss_legendre_reference(n, x, w);
            const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            q.nodes = (mid + half * x.array()).matrix();
            q.weights = (half * w.array()).matrix();
            break;
        }
    }
    return q;
}

}  // namespace staticprop
