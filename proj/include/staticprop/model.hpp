// Spatial side of the static Klein-Gordon problem: a 1-D lattice for Sigma,
// the weighted measure beta^{1/2} |g_Sigma|^{1/2} dx, the gauge-covariant
// assembly of L, and the positivity checks the rest of the toolkit relies on.
#pragma once

#include <optional>
#include <string>
#include <utility>

#include "staticprop/numerics.hpp"

namespace staticprop {

enum class Boundary { Periodic, Dirichlet };

// Static coefficient fields sampled at the lattice nodes.
struct SpatialModel {
    Index n = 0;
    double dx = 1.0;
    Boundary boundary = Boundary::Periodic;
    RealVector beta;     // positive, bounded with bounded inverse
    RealVector g_sigma;  // positive metric coefficient
    RealVector a;        // magnetic potential (enters through link phases)
    RealVector y;        // scalar potential, >= 0 pointwise
    RealVector v;        // electric potential V = -A_0, bounded real

    double beta_bound() const {  // largest C with C <= beta <= 1/C
        return std::min(beta.minCoeff(), 1.0 / beta.maxCoeff());
    }
    double v_norm() const { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

    // Node weights of the spatial measure, w_j = sqrt(beta_j g_j) dx.
    RealVector measure() const {
        return (beta.array() * g_sigma.array()).sqrt().matrix() * dx;
    }
};

struct SpatialOperator {
    ComplexMatrix matrix;  // n x n, W-Hermitian
    WeightedSpace space;   // weight diag(beta^{1/2} |g_Sigma|^{1/2} dx)
    double lower_bound_c;  // min eigenvalue of L - V^2 in the weighted sense
};

struct AssumptionReport {
    bool beta_bounds = false;
    double beta_constant = 0.0;  // attained C with C <= beta <= 1/C
    bool y_nonnegative = false;
    double y_min = 0.0;
    bool l_hermitian = false;
    double l_hermitian_defect = 0.0;
    bool h_positive = false;        // L - V^2 > 0
    double min_eig_l_minus_v2 = 0.0;
    bool strong_h_positive = false;  // H bounded away from zero
    double h_lower_bound = 0.0;      // derived via the H >= C criterion
    bool dissipativity_ok = false;   // L - 2V^2 >= 0
    double min_eig_l_minus_2v2 = 0.0;

    bool all_ok() const {
        return beta_bounds && y_nonnegative && l_hermitian && h_positive &&
               strong_h_positive && dissipativity_ok;
    }
};

namespace detail {

inline RealVector broadcast(const RealVector& field, Index n, const char* name) {
    if (field.size() == n) return field;
    if (field.size() == 1) return RealVector::Constant(n, field(0));
    // a constant field resizes unambiguously (e.g. refining a preset lattice)
    if (field.size() > 1 && field.minCoeff() == field.maxCoeff())
        return RealVector::Constant(n, field(0));
    throw length_mismatch(std::string(name) + ": expected length " + std::to_string(n) +
                          ", got " + std::to_string(field.size()));
}

}  // namespace detail

// Validates field lengths, positivity of beta and g_Sigma, and Y >= 0.
// Scalar fields broadcast to the lattice size.
inline SpatialModel build_model(SpatialModel m) {
    if (m.n < 1) throw invalid_field("build_model: lattice size must be >= 1");
    if (!(m.dx > 0.0)) throw invalid_field("build_model: dx must be positive");
    m.beta = detail::broadcast(m.beta, m.n, "beta");
    m.g_sigma = detail::broadcast(m.g_sigma, m.n, "gSigma");
    m.a = detail::broadcast(m.a, m.n, "A");
    m.y = detail::broadcast(m.y, m.n, "Y");
    m.v = detail::broadcast(m.v, m.n, "V");
    if (m.beta.minCoeff() <= 0.0) throw invalid_field("build_model: beta must be positive");
    if (m.g_sigma.minCoeff() <= 0.0) throw invalid_field("build_model: gSigma must be positive");
    if (m.y.minCoeff() < 0.0) throw invalid_field("build_model: Y must be nonnegative");
    if (!m.beta.allFinite() || !m.g_sigma.allFinite() || !m.a.allFinite() ||
        !m.y.allFinite() || !m.v.allFinite())
        throw invalid_field("build_model: fields must be finite");
    return m;
}

// Presets documented in the README: M0 single mode (m = 1), M1 free ring,
// M2 = M1 with a constant electric potential.
inline SpatialModel preset_model(const std::string& name) {
    SpatialModel m;
    auto constant = [](double c) { return RealVector::Constant(1, c); };
    if (name == "M0") {
        m.n = 1;
    } else if (name == "M1" || name == "M2") {
        m.n = 8;
    } else {
        throw invalid_field("preset_model: unknown preset '" + name + "'");
    }
    m.dx = 1.0;
    m.boundary = Boundary::Periodic;
    m.beta = constant(1.0);
    m.g_sigma = constant(1.0);
    m.a = constant(0.0);
    m.y = constant(1.0);
    m.v = constant(name == "M2" ? 0.2 : 0.0);
    return build_model(std::move(m));
}

// Assembles L = beta^{1/2} |g|^{-1/2} (D - A) |g|^{1/2} g^{xx} (D - A) beta^{1/2} + beta Y
// with link-variable differences, so that W L is Hermitian by construction.
// Dirichlet couples the end nodes to zero-valued ghosts.
inline SpatialOperator assemble_L(const SpatialModel& m) {
    const Index n = m.n;
    const RealVector w = m.measure();
    const RealVector bsq = m.beta.cwiseSqrt();
    // link coefficient c = sqrt(beta / g_Sigma), averaged at link midpoints
    const RealVector cnode = (m.beta.array() / m.g_sigma.array()).sqrt().matrix();

    ComplexMatrix form = ComplexMatrix::Zero(n, n);
    auto add_link = [&](Index j, Index k, double c, double theta) {
        // quadratic form of the covariant difference (e^{-i theta} phi_k - phi_j)/dx
        const double scale = c / m.dx;  // c * dx / dx^2
        const Complex hop = -scale * std::exp(Complex(0.0, -theta)) * bsq(j) * bsq(k);
        form(j, j) += scale * m.beta(j);
        form(k, k) += scale * m.beta(k);
        form(j, k) += hop;
        form(k, j) += std::conj(hop);
    };
    const Index nlinks = (m.boundary == Boundary::Periodic) ? n : n - 1;
    for (Index l = 0; l < nlinks; ++l) {
        const Index j = l, k = (l + 1) % n;
        add_link(j, k, 0.5 * (cnode(j) + cnode(k)), 0.5 * (m.a(j) + m.a(k)) * m.dx);
    }
    if (m.boundary == Boundary::Dirichlet) {
        // ghost contributions: only the interior diagonal term survives
        form(0, 0) += cnode(0) / m.dx * m.beta(0);
        form(n - 1, n - 1) += cnode(n - 1) / m.dx * m.beta(n - 1);
    }
    for (Index j = 0; j < n; ++j) form(j, j) += m.beta(j) * m.y(j) * w(j);

    ComplexMatrix weight = ComplexMatrix::Zero(n, n);
    weight.diagonal() = w.cast<Complex>();
    WeightedSpace space(std::move(weight));
    ComplexMatrix l = w.cwiseInverse().cast<Complex>().asDiagonal() * form;

    SpatialOperator op{std::move(l), std::move(space), 0.0};
    ComplexMatrix v2 = ComplexMatrix::Zero(n, n);
    v2.diagonal() = m.v.cwiseProduct(m.v).cast<Complex>();
    op.lower_bound_c =
        hermitian_eig_weighted(op.matrix - v2, op.space).values.real().minCoeff();
    return op;
}

namespace detail {

inline double min_eig_weighted(const ComplexMatrix& a, const WeightedSpace& w) {
    return hermitian_eig_weighted(a, w).values.real().minCoeff();
}

inline ComplexMatrix diag_matrix(const RealVector& d) {
    ComplexMatrix m = ComplexMatrix::Zero(d.size(), d.size());
    m.diagonal() = d.cast<Complex>();
    return m;
}

// Largest C in (0, 1) with L - C - (1-C)^{-1} V^2 >= 0, by bisection.
// This is the H >= C criterion of the Hamiltonian positivity proposition.
inline double derived_h_bound(const ComplexMatrix& l, const RealVector& v,
                              const WeightedSpace& w) {
    const ComplexMatrix v2 = diag_matrix(v.cwiseProduct(v));
    auto min_eig = [&](double c) {
        const ComplexMatrix shifted =
            l - c * ComplexMatrix::Identity(l.rows(), l.cols()) - v2 / (1.0 - c);
        return min_eig_weighted(shifted, w);
    };
    double lo = 0.0, hi = 1.0 - 1e-12;
    if (min_eig(1e-12) < 0.0) return 0.0;
    for (int iter = 0; iter < 60; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (min_eig(mid) >= 0.0 ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace detail

// Positivity and regularity witnesses; failures are reported, not thrown.
inline AssumptionReport check_assumptions(const SpatialModel& m, const SpatialOperator& op) {
    AssumptionReport r;
    r.beta_constant = m.beta_bound();
    r.beta_bounds = r.beta_constant > 0.0;
    r.y_min = m.y.minCoeff();
    r.y_nonnegative = r.y_min >= 0.0;
    r.l_hermitian_defect = hermitian_defect(op.space.weight() * op.matrix);
    r.l_hermitian = r.l_hermitian_defect <= 1e-10;

    const ComplexMatrix v2 = detail::diag_matrix(m.v.cwiseProduct(m.v));
    const double scale = std::max(1.0, op.matrix.norm());
    r.min_eig_l_minus_v2 = detail::min_eig_weighted(op.matrix - v2, op.space);
    r.h_positive = r.min_eig_l_minus_v2 > 1e-12 * scale;
    r.min_eig_l_minus_2v2 = detail::min_eig_weighted(op.matrix - 2.0 * v2, op.space);
    r.dissipativity_ok = r.min_eig_l_minus_2v2 >= -1e-12 * scale;
    r.h_lower_bound = r.h_positive ? detail::derived_h_bound(op.matrix, m.v, op.space) : 0.0;
    r.strong_h_positive = r.h_lower_bound > 0.0;
    return r;
}

}  // namespace staticprop
