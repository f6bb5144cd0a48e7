// Limiting absorption machinery: the shifted generator B_z = B - zZ, its
// spectral-gap strip, bisectorial projections by contour quadrature with an
// analytic tail, the dissipativity criterion, the absorption-shifted Feynman
// kernel, the epsilon-sweep, and two independent oracles (non-normal
// eigendecomposition, Fourier synthesis from the resolvent).
#pragma once

#include <random>
#include <vector>

#include "staticprop/propagators.hpp"

namespace staticprop {

// alpha = -|V| + sqrt(C - c + |V|^2): half-width of the resolvent strip of
// B_z guaranteed by L - V^2 >= C, for any 0 < c < C.
inline double spectral_gap(double big_c, double small_c, double v_norm) {
    if (!(small_c > 0.0) || !(small_c < big_c))
        throw bad_constants("spectral_gap: need 0 < c < C");
    return -v_norm + std::sqrt(big_c - small_c + v_norm * v_norm);
}

// B_z = B - z Z with its non-normal eigendecomposition. `plus` groups the
// eigenvalues by the sign of their real part; the gap guarantees none sit on
// the imaginary axis.
struct ShiftedGenerator {
    Complex z{0.0, 0.0};
    ComplexMatrix matrix;
    EigenData eig;
    Eigen::Array<bool, Eigen::Dynamic, 1> plus;

    double min_abs_re() const { return eig.values.real().cwiseAbs().minCoeff(); }
};

inline ShiftedGenerator make_shifted(const BlockSystem& bs, Complex z) {
    ShiftedGenerator sg;
    sg.z = z;
    sg.matrix = bs.b - z * bs.z;
    sg.eig = general_eig(sg.matrix);
    const Index m = sg.eig.dim();
    sg.plus.resize(m);
    const double scale = std::max(1.0, sg.eig.max_abs());
    for (Index i = 0; i < m; ++i) {
        const double re = sg.eig.values(i).real();
        if (std::abs(re) < 1e-10 * scale)
            throw gap_violated("make_shifted: eigenvalue of B_z on the imaginary axis");
        sg.plus(i) = re > 0.0;
    }
    return sg;
}

// ----------------------------------------------------- bisectorial projections

struct BisectorialSplit {
    ComplexMatrix pi_plus, pi_minus;
    std::string method;  // "contour" or "eigen-oracle"
    double idempotency = 0.0;   // ||Pi^2 - Pi||
    double completeness = 0.0;  // ||Pi+ + Pi- - 1||
    double commutator = 0.0;    // ||[Pi, B_z]|| / ||B_z||
};

namespace detail {

inline void split_diagnostics(BisectorialSplit& s, const ComplexMatrix& bz) {
    const Index m = bz.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(m, m);
    s.idempotency = std::max((s.pi_plus * s.pi_plus - s.pi_plus).norm(),
                             (s.pi_minus * s.pi_minus - s.pi_minus).norm());
    s.completeness = (s.pi_plus + s.pi_minus - id).norm();
    s.commutator = (s.pi_plus * bz - bz * s.pi_plus).norm() / bz.norm();
}

}  // namespace detail

inline BisectorialSplit oracle_projections(const ShiftedGenerator& sg) {
    BisectorialSplit s;
    s.method = "eigen-oracle";
    const Index m = sg.eig.dim();
    ComplexVector dp = ComplexVector::Zero(m), dm = ComplexVector::Zero(m);
    for (Index i = 0; i < m; ++i) (sg.plus(i) ? dp : dm)(i) = 1.0;
    s.pi_plus = sg.eig.vectors * dp.asDiagonal() * sg.eig.inverse_vectors;
    s.pi_minus = sg.eig.vectors * dm.asDiagonal() * sg.eig.inverse_vectors;
    detail::split_diagnostics(s, sg.matrix);
    return s;
}

// Pi_z^(+-) = 1/2 (1 +- (1/pi i) int_{-i tau}^{i tau} (B_z - zeta)^{-1} dzeta),
// with dyadically graded Gauss-Legendre panels toward zeta = 0 and the
// truncated tail added in closed form through the arctan series
// 2i sum_k (-1)^k (B_z/tau)^{2k+1} / (2k+1).
inline BisectorialSplit contour_projections(const BlockSystem& bs, const ShiftedGenerator& sg,
                                            double tau = 0.0, Index n_quad = 2000) {
    BisectorialSplit s;
    s.method = "contour";
    const Index m = sg.matrix.rows();
    const double scale = sg.eig.max_abs();
    if (tau <= 0.0) tau = 50.0 * scale;
    const double inner = std::max(1e-3, 0.5 * sg.min_abs_re());

    std::vector<std::pair<double, double>> panels;  // on [0, tau]
    {
        std::vector<double> edges{tau};
        while (edges.back() > inner) edges.push_back(edges.back() / 2.0);
        edges.push_back(0.0);
        for (std::size_t i = edges.size() - 1; i > 0; --i)
            panels.emplace_back(edges[i], edges[i - 1]);
    }
    const Index per_panel =
        std::max<Index>(4, n_quad / (2 * static_cast<Index>(panels.size())));

    // nodes mirrored over both half-axes
    ComplexMatrix acc = ComplexMatrix::Zero(m, m);
    std::vector<ComplexMatrix> partial(panels.size());
    parallel_for_index(panels.size(), [&](std::size_t pi_) {
        const Quadrature q = quadrature(QuadKind::GaussLegendre, panels[pi_].first,
                                        panels[pi_].second, per_panel);
        ComplexMatrix local = ComplexMatrix::Zero(m, m);
        for (Index j = 0; j < q.nodes.size(); ++j) {
            for (double side : {1.0, -1.0}) {
                const Complex zeta(0.0, side * q.nodes(j));
                const double dist = (sg.eig.values.array() - zeta).abs().minCoeff();
                if (dist < 1e-8)
                    throw gap_violated("contour_projections: node too close to spec(B_z)");
                // d zeta = i d lambda on the upward-oriented imaginary axis
                local += (q.weights(j) * Complex(0.0, 1.0)) *
                         resolvent_factorized(bs, zeta, sg.z);
            }
        }
        partial[pi_] = std::move(local);
    });
    for (const auto& p : partial) acc += p;

    // analytic tail of the truncated contour
    const ComplexMatrix x = sg.matrix / tau;
    const ComplexMatrix x2 = x * x;
    ComplexMatrix tail = x;
    ComplexMatrix pow = x;
    double sign = -1.0;
    for (int k = 1; k <= 3; ++k) {
        pow = pow * x2;
        tail += (sign / (2.0 * k + 1.0)) * pow;
        sign = -sign;
    }
    acc += Complex(0.0, 2.0) * tail;

    const ComplexMatrix id = ComplexMatrix::Identity(m, m);
    const ComplexMatrix integral = acc / Complex(0.0, pi);
    s.pi_plus = 0.5 * (id + integral);
    s.pi_minus = 0.5 * (id - integral);
    detail::split_diagnostics(s, sg.matrix);
    return s;
}

// ---------------------------------------------------------------- dissipativity

struct DissipativityReport {
    double min_eig_display = 0.0;  // of the block matrix (L + 2V^2, 2V; 2V, 1)
    bool display_psd = false;
    double min_eig_l_minus_2v2 = 0.0;
    double worst_im_plus = 0.0;   // max Im (u | B_z u)_en over u in ran Pi_z^+, Im z > 0
    double worst_im_minus = 0.0;  // max of -Im (u | B_z u)_en over ran Pi_z^-
    bool ok = false;
};

// Checks the quadratic-form display behind maximal dissipativity and verifies
// the sign condition -+ Im (u | B_z u)_en >= 0 on ran Pi_z^(+-) for random u.
inline DissipativityReport dissipativity_check(const BlockSystem& bs,
                                               Complex z = Complex(0.0, 0.1),
                                               int n_samples = 100, unsigned seed = 0x5eed) {
    if (!(z.imag() > 0.0))
        throw validation_error("dissipativity_check: requires Im z > 0");
    DissipativityReport r;
    const Index n = bs.n;
    const ComplexMatrix vd = detail::diag_matrix(bs.v);
    ComplexMatrix display = ComplexMatrix::Zero(2 * n, 2 * n);
    display.topLeftCorner(n, n) = bs.l + 2.0 * vd * vd;
    display.topRightCorner(n, n) = 2.0 * vd;
    display.bottomLeftCorner(n, n) = 2.0 * vd;
    display.bottomRightCorner(n, n) = ComplexMatrix::Identity(n, n);
    {
        WeightedSpace l2_double(bs.double_weight());
        r.min_eig_display =
            hermitian_eig_weighted(display, l2_double).values.real().minCoeff();
        const ComplexMatrix lm2v2 = bs.l - 2.0 * vd * vd;
        WeightedSpace l2(bs.spatial_weight);
        r.min_eig_l_minus_2v2 =
            hermitian_eig_weighted(lm2v2, l2).values.real().minCoeff();
    }
    r.display_psd = r.min_eig_display >= -1e-12;

    const ShiftedGenerator sg = make_shifted(bs, z);
    const BisectorialSplit split = oracle_projections(sg);
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = 0; k < n_samples; ++k) {
        ComplexVector w(2 * n);
        for (Index j = 0; j < 2 * n; ++j) w(j) = Complex(gauss(rng), gauss(rng));
        const ComplexVector up = split.pi_plus * w;
        const ComplexVector um = split.pi_minus * w;
        const double np = bs.en_norm(up), nm = bs.en_norm(um);
        if (np > 1e-12)
            r.worst_im_plus = std::max(
                r.worst_im_plus, std::imag(bs.en_inner(up, sg.matrix * up)) / (np * np));
        if (nm > 1e-12)
            r.worst_im_minus = std::max(
                r.worst_im_minus, -std::imag(bs.en_inner(um, sg.matrix * um)) / (nm * nm));
    }
    r.ok = r.display_psd && r.worst_im_plus <= 1e-10 && r.worst_im_minus <= 1e-10;
    return r;
}

// -------------------------------------------------------- shifted Feynman kernel

// E_z^F with the branch fixed by contractivity: the forward semigroup runs on
// the spectral half whose modes decay for the given sign of Im z. For
// Im z >= 0 that is the right half-plane group (and z = 0 recovers E^F);
// for Im z < 0 the roles of the halves swap and the z -> 0 limit is the
// anti-Feynman kernel.
inline PropagatorKernel feynman_kernel_z(const BlockSystem& bs, const ShiftedGenerator& sg,
                                         const std::vector<double>& check_times = {
                                             -5.0, -2.0, -0.5, 0.5, 2.0, 5.0}) {
    PropagatorKernel k;
    k.kind = PropagatorKind::Feynman;
    k.n = bs.n;
    k.values = sg.eig.values;
    k.vectors = sg.eig.vectors;
    k.inverse_vectors = sg.eig.inverse_vectors;
    const Index m = sg.eig.dim();
    k.coeff_fwd = ComplexVector::Zero(m);
    k.coeff_bwd = ComplexVector::Zero(m);
    const bool plus_forward = sg.z.imag() >= 0.0;
    for (Index i = 0; i < m; ++i) {
        if (sg.plus(i) == plus_forward)
            k.coeff_fwd(i) = 1.0;
        else
            k.coeff_bwd(i) = -1.0;
    }
    for (double t : check_times) {
        const double nrm = bs.en_op_norm(k(t));
        if (nrm > 1.0 + 1e-10)
            throw contraction_violated("feynman_kernel_z: ||E_z^F(" + std::to_string(t) +
                                       ")||_en = " + std::to_string(nrm));
    }
    return k;
}

// ------------------------------------------------------------------- LAP sweep

struct LapRow {
    double epsilon = 0.0;
    double t = 0.0;
    double error = 0.0;
    double bound = 0.0;  // |t| eps ||u||
    double ratio = 0.0;
};

struct LapTable {
    std::vector<LapRow> rows;          // epsilon-major, time-minor order
    std::vector<double> times;
    std::vector<double> slopes;        // log-log slope in eps, one per time
    double max_ratio = 0.0;
    bool bound_ok = false;
    bool slopes_ok = false;
};

// Error table for E^F = s-lim E_{i eps}^F on a fixed energy-normalized vector:
// the bound |t z| ||u||_en must hold at every sample and the error must be
// first order in eps.
inline LapTable lap_sweep(const BlockSystem& bs, const SpectralSplit& split,
                          const std::vector<double>& epsilons, const std::vector<double>& times,
                          ComplexVector u, bool throw_on_violation = true) {
    if (epsilons.empty()) throw validation_error("lap_sweep: needs at least one epsilon");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0))
            throw validation_error("lap_sweep: epsilons must be positive");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            throw validation_error("lap_sweep: epsilons must be strictly descending");
    }
    const double un = bs.en_norm(u);
    if (un <= 0.0) throw validation_error("lap_sweep: u must be nonzero");
    u /= un;

    LapTable table;
    table.times = times;
    const PropagatorKernel ef = make_kernel(PropagatorKind::Feynman, bs, split);
    std::vector<ComplexVector> ref(times.size());
    for (std::size_t j = 0; j < times.size(); ++j) ref[j] = ef(times[j]) * u;

    table.rows.resize(epsilons.size() * times.size());
    parallel_for_index(epsilons.size(), [&](std::size_t i) {
        const double eps = epsilons[i];
        const ShiftedGenerator sg = make_shifted(bs, Complex(0.0, eps));
        const PropagatorKernel kz = feynman_kernel_z(bs, sg);
        for (std::size_t j = 0; j < times.size(); ++j) {
            const double t = times[j];
            LapRow row;
            row.epsilon = eps;
            row.t = t;
            row.error = bs.en_norm(kz(t) * u - ref[j]);
            row.bound = std::abs(t) * eps;
            row.ratio = row.error / row.bound;
            table.rows[i * times.size() + j] = row;
        }
    });
    for (const auto& row : table.rows) table.max_ratio = std::max(table.max_ratio, row.ratio);
    table.bound_ok = table.max_ratio <= 1.0 + 1e-6;

    table.slopes.resize(times.size());
    table.slopes_ok = true;
    for (std::size_t j = 0; j < times.size(); ++j) {
        std::vector<double> errs;
        for (std::size_t i = 0; i < epsilons.size(); ++i)
            errs.push_back(table.rows[i * times.size() + j].error);
        table.slopes[j] = detail::loglog_slope(epsilons, errs);
        if (std::abs(table.slopes[j] - 1.0) > 0.1) table.slopes_ok = false;
    }
    if (throw_on_violation && !table.bound_ok)
        throw bound_violated("lap_sweep: error exceeded |t z| ||u||_en, max ratio " +
                             std::to_string(table.max_ratio));
    return table;
}

// -------------------------------------------------------------- Fourier oracle

// Reconstructs E_z^F(t) from the resolvent through
//   E(t) = (1/2pi) int e^{-i w t} (-i)(B_z - w)^{-1} dw,
// with the identity-component 1/w behaviour subtracted analytically
// (i w/(w^2+1) transforms to sgn(t) e^{-|t|}/2) so the truncation tail decays
// like 1/w^2. The resolvents come from the factorized form, independent of
// the eigendecomposition used by the semigroup kernel.
inline std::vector<ComplexMatrix> fourier_reconstruct(const BlockSystem& bs,
                                                      const ShiftedGenerator& sg,
                                                      const std::vector<double>& times,
                                                      double omega_max = 100.0,
                                                      Index n_omega = 1 << 14) {
    const double axis_dist = sg.eig.values.imag().cwiseAbs().minCoeff();
    if (axis_dist < 10.0 * (omega_max / static_cast<double>(n_omega)))
        throw spectrum_near_contour("fourier_reconstruct: spec(B_z) too close to the real axis");
    const Index m = sg.matrix.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(m, m);

    const Index n_panels = 64;
    const Index per_panel = std::max<Index>(2, n_omega / n_panels);
    std::vector<ComplexMatrix> acc(times.size(), ComplexMatrix::Zero(m, m));
    std::vector<std::vector<ComplexMatrix>> partial(
        static_cast<std::size_t>(n_panels),
        std::vector<ComplexMatrix>(times.size(), ComplexMatrix::Zero(m, m)));
    parallel_for_index(static_cast<std::size_t>(n_panels), [&](std::size_t p) {
        const double a = -omega_max + 2.0 * omega_max * static_cast<double>(p) / n_panels;
        const double b = -omega_max + 2.0 * omega_max * static_cast<double>(p + 1) / n_panels;
        const Quadrature q = quadrature(QuadKind::GaussLegendre, a, b, per_panel);
        for (Index j = 0; j < q.nodes.size(); ++j) {
            const double w = q.nodes(j);
            const ComplexMatrix integrand =
                Complex(0.0, -1.0) * resolvent_factorized(bs, Complex(w, 0.0), sg.z) -
                (Complex(0.0, 1.0) * w / (w * w + 1.0)) * id;
            for (std::size_t ti = 0; ti < times.size(); ++ti)
                partial[p][ti] += (q.weights(j) * std::exp(Complex(0.0, -w * times[ti]))) *
                                  integrand;
        }
    });
    for (std::size_t p = 0; p < partial.size(); ++p)
        for (std::size_t ti = 0; ti < times.size(); ++ti) acc[ti] += partial[p][ti];

    std::vector<ComplexMatrix> out(times.size());
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        const double t = times[ti];
        const double sgn = (t > 0.0) ? 1.0 : (t < 0.0 ? -1.0 : 0.0);
        out[ti] = (sgn * std::exp(-std::abs(t)) / 2.0) * id + acc[ti] / (2.0 * pi);
    }
    return out;
}

// Agreement between the Fourier synthesis and the semigroup kernel.
inline double fourier_oracle_error(const BlockSystem& bs, const ShiftedGenerator& sg,
                                   const std::vector<double>& times, double omega_max = 100.0,
                                   Index n_omega = 1 << 14) {
    const PropagatorKernel kz = feynman_kernel_z(bs, sg);
    const auto rec = fourier_reconstruct(bs, sg, times, omega_max, n_omega);
    double worst = 0.0;
    for (std::size_t ti = 0; ti < times.size(); ++ti)
        worst = std::max(worst, (rec[ti] - kz(times[ti])).cwiseAbs().maxCoeff());
    return worst;
}

// ---------------------------------------------------------- resolvent residual

// Quadrature residual of (Ktilde - z)(Gtilde_z^F f) = f for the scalar
// reduction of the shifted Feynman kernel.
inline double resolvent_residual(const BlockSystem& bs, Complex z, const TestFunction& f,
                                 const TimeGrid& grid, int sigma = 1) {
    const ShiftedGenerator sg = make_shifted(bs, z);
    const PropagatorKernel kz = feynman_kernel_z(bs, sg);
    const ScalarPropagator gz = scalar_reduce(kz, bs, sigma);
    return inverse_residual_G(gz, bs, f, grid, z);
}

}  // namespace staticprop
