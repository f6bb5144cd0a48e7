// First-order structures: the block generator B, charge matrix Q, classical
// Hamiltonian H = QB, the energy inner product, frequency projections, and
// the factorized resolvent of B.
#pragma once

#include <utility>

#include "staticprop/model.hpp"
#include "staticprop/numerics.hpp"

namespace staticprop {

// All 2n x 2n blocks of the first-order system, plus the energy geometry.
// The energy Gram matrix is W2 * H where W2 = diag(W, W) carries the spatial
// measure; with unit measure it reduces to H itself.
class BlockSystem {
public:
    Index n = 0;
    ComplexMatrix l;          // n x n spatial operator
    RealVector v;             // diagonal electric potential
    RealVector beta_sqrt;     // diag entries of beta^{1/2}
    ComplexMatrix b, q, h, z; // 2n x 2n blocks
    ComplexMatrix spatial_weight;  // W, n x n diagonal
    double min_eig_h = 0.0;        // weighted min eigenvalue of H

    const WeightedSpace& energy_space() const { return energy_space_.value(); }
    const ComplexMatrix& energy_factor() const { return energy_space().sqrt(); }

    Complex en_inner(const ComplexVector& a, const ComplexVector& bvec) const {
        return energy_space().inner(a, bvec);
    }
    double en_norm(const ComplexVector& a) const { return energy_space().norm(a); }
    double en_op_norm(const ComplexMatrix& m) const { return energy_space().op_norm(m); }

    // Charge form (u | Q v) in the weighted spatial measure.
    Complex charge_form(const ComplexVector& a, const ComplexVector& bvec) const {
        return a.dot(double_weight_ * (q * bvec));
    }
    const ComplexMatrix& double_weight() const { return double_weight_; }

    // Energy-norm of Q as a diagnostic; Q is unbounded on the continuum
    // energy space, so this number has no continuum counterpart.
    double q_energy_norm() const { return en_op_norm(q); }

    void finalize() {
        double_weight_ = ComplexMatrix::Zero(2 * n, 2 * n);
        double_weight_.topLeftCorner(n, n) = spatial_weight;
        double_weight_.bottomRightCorner(n, n) = spatial_weight;
        ComplexMatrix gram = double_weight_ * h;
        gram = 0.5 * (gram + gram.adjoint()).eval();
        energy_space_.emplace(std::move(gram));
    }

private:
    std::optional<WeightedSpace> energy_space_;
    ComplexMatrix double_weight_;
};

// Frequency projections of B and the eigendata behind them. Eigenvectors are
// orthonormal in the energy inner product; `plus` marks positive eigenvalues.
struct SpectralSplit {
    EigenData eig;            // of B, via the energy representation
    Eigen::Array<bool, Eigen::Dynamic, 1> plus;
    ComplexMatrix pi_plus, pi_minus;
    double min_abs_eig = 0.0;

    Index rank_plus() const { return plus.count(); }
    Index rank_minus() const { return plus.size() - plus.count(); }
};

// Builds B = (V 1; L V), Q, H = QB, Z and validates positivity of H.
inline BlockSystem assemble_blocks(const SpatialOperator& op, const SpatialModel& m) {
    const Index n = m.n;
    BlockSystem bs;
    bs.n = n;
    bs.l = op.matrix;
    bs.v = m.v;
    bs.beta_sqrt = m.beta.cwiseSqrt();
    bs.spatial_weight = op.space.weight();

    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const ComplexMatrix vd = detail::diag_matrix(m.v);
    bs.b = ComplexMatrix::Zero(2 * n, 2 * n);
    bs.b.topLeftCorner(n, n) = vd;
    bs.b.topRightCorner(n, n) = id;
    bs.b.bottomLeftCorner(n, n) = bs.l;
    bs.b.bottomRightCorner(n, n) = vd;

    bs.q = ComplexMatrix::Zero(2 * n, 2 * n);
    bs.q.topRightCorner(n, n) = id;
    bs.q.bottomLeftCorner(n, n) = id;

    bs.h = bs.q * bs.b;  // = (L V; V 1) exactly

    bs.z = ComplexMatrix::Zero(2 * n, 2 * n);
    bs.z.bottomLeftCorner(n, n) = id;

    ComplexMatrix w2 = ComplexMatrix::Zero(2 * n, 2 * n);
    w2.topLeftCorner(n, n) = bs.spatial_weight;
    w2.bottomRightCorner(n, n) = bs.spatial_weight;
    {
        WeightedSpace l2_double(w2);
        bs.min_eig_h = hermitian_eig_weighted(bs.h, l2_double).values.real().minCoeff();
    }
    if (bs.min_eig_h <= 1e-12 * bs.h.norm())
        throw not_positive("assemble_blocks: H is not positive definite (min eig " +
                           std::to_string(bs.min_eig_h) + ")");
    bs.finalize();
    return bs;
}

// Diagonalizes B in the energy representation and splits the spectrum at 0.
inline SpectralSplit spectral_split(const BlockSystem& bs) {
    SpectralSplit split;
    split.eig = hermitian_eig_weighted(bs.b, bs.energy_space());
    const Index m = split.eig.dim();
    split.min_abs_eig = split.eig.min_abs();
    if (split.min_abs_eig < 1e-12 * split.eig.max_abs())
        throw kernel_detected("spectral_split: B has a numerically trivial eigenvalue");
    split.plus.resize(m);
    for (Index i = 0; i < m; ++i) split.plus(i) = split.eig.values(i).real() > 0.0;

    ComplexVector dplus = ComplexVector::Zero(m), dminus = ComplexVector::Zero(m);
    for (Index i = 0; i < m; ++i) (split.plus(i) ? dplus : dminus)(i) = 1.0;
    split.pi_plus = split.eig.vectors * dplus.asDiagonal() * split.eig.inverse_vectors;
    split.pi_minus = split.eig.vectors * dminus.asDiagonal() * split.eig.inverse_vectors;
    return split;
}

// Resolvent (B - z)^{-1} through the triangular factorization with middle
// block (L - (V - z)^2)^{-1}.
inline ComplexMatrix resolvent_factorized(const BlockSystem& bs, Complex zeta,
                                          Complex l_shift = Complex(0.0, 0.0)) {
    const Index n = bs.n;
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    ComplexMatrix vmz2 = ComplexMatrix::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
        const Complex d = bs.v(j) - zeta;
        vmz2(j, j) = d * d;
    }
    const ComplexMatrix middle =
        (bs.l - l_shift * id - vmz2).partialPivLu().solve(id);
    ComplexMatrix p = ComplexMatrix::Zero(2 * n, 2 * n);
    p.topLeftCorner(n, n) = id;
    p.bottomRightCorner(n, n) = id;
    for (Index j = 0; j < n; ++j) p(n + j, j) = zeta - bs.v(j);
    ComplexMatrix core = ComplexMatrix::Zero(2 * n, 2 * n);
    core.topRightCorner(n, n) = middle;
    core.bottomLeftCorner(n, n) = id;
    return p * core * p;
}

// Contracted interface with a spectrum-distance guard; `split` supplies the
// eigenvalues used for the guard.
inline ComplexMatrix resolvent_B(const BlockSystem& bs, const SpectralSplit& split,
                                 Complex zeta) {
    const double dist =
        (split.eig.values.array() - zeta).abs().minCoeff();
    if (dist < 1e-10 * split.eig.max_abs())
        throw spectrum_hit("resolvent_B: z is numerically on the spectrum of B");
    return resolvent_factorized(bs, zeta);
}

// Dense-solve oracle for the factorized resolvent.
inline ComplexMatrix resolvent_dense(const BlockSystem& bs, Complex zeta) {
    const Index m = 2 * bs.n;
    const ComplexMatrix shifted = bs.b - zeta * ComplexMatrix::Identity(m, m);
    return shifted.partialPivLu().solve(ComplexMatrix::Identity(m, m));
}

struct ChargePositivityReport {
    double herm_defect_plus = 0.0;   // of the weighted charge form on ran Pi+
    double herm_defect_minus = 0.0;
    double min_eig_plus = 0.0;       // of  (u | Q Pi+ u)
    double min_eig_minus = 0.0;      // of -(u | Q Pi- u)
    double completeness = 0.0;       // || Q Pi+ + Q Pi- - Q ||
    bool ok = false;
};

// Charge-form positivity of the frequency projections: Q Pi+ and -Q Pi-
// are Hermitian PSD with respect to the weighted spatial measure.
inline ChargePositivityReport charge_positivity(const BlockSystem& bs,
                                                const SpectralSplit& split) {
    ChargePositivityReport r;
    const ComplexMatrix& w2 = bs.double_weight();
    auto analyze = [&](const ComplexMatrix& pi, double sign, double& defect, double& mineig) {
        ComplexMatrix form = sign * (w2 * (bs.q * pi));
        const double scale = std::max(1.0, form.norm());
        defect = (form - form.adjoint()).norm() / scale;
        form = 0.5 * (form + form.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(form);
        mineig = es.eigenvalues().minCoeff();
    };
    analyze(split.pi_plus, +1.0, r.herm_defect_plus, r.min_eig_plus);
    analyze(split.pi_minus, -1.0, r.herm_defect_minus, r.min_eig_minus);
    r.completeness =
        (bs.q * (split.pi_plus + split.pi_minus) - bs.q).norm() / bs.q.norm();
    r.ok = r.herm_defect_plus <= 1e-10 && r.herm_defect_minus <= 1e-10 &&
           r.min_eig_plus >= -1e-10 && r.min_eig_minus >= -1e-10 &&
           r.completeness <= 1e-12;
    return r;
}

}  // namespace staticprop
