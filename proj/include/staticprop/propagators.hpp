// The seven distinguished propagator kernels of the first-order system, their
// scalar reductions, the identity web, inverse/bisolution residual contracts,
// and frequency positivity. Kernels are closed-form evaluators built from one
// eigendecomposition; convolutions use panel-based Gauss-Legendre quadrature
// with evaluation at panel boundaries so Heaviside cuts never land inside a
// panel.
#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "staticprop/block_system.hpp"
#include "staticprop/parallel.hpp"

namespace staticprop {

enum class PropagatorKind {
    PauliJordan,
    Retarded,
    Advanced,
    PositiveFrequency,
    NegativeFrequency,
    Feynman,
    AntiFeynman,
};

inline bool is_inverse(PropagatorKind k) {
    switch (k) {
        case PropagatorKind::Retarded:
        case PropagatorKind::Advanced:
        case PropagatorKind::Feynman:
        case PropagatorKind::AntiFeynman:
            return true;
        default:
            return false;
    }
}
inline bool is_bisolution(PropagatorKind k) { return !is_inverse(k); }
inline bool is_frequency_kind(PropagatorKind k) {
    return k == PropagatorKind::PositiveFrequency || k == PropagatorKind::NegativeFrequency;
}

inline const char* kind_tag(PropagatorKind k) {
    switch (k) {
        case PropagatorKind::PauliJordan: return "pj";
        case PropagatorKind::Retarded: return "ret";
        case PropagatorKind::Advanced: return "adv";
        case PropagatorKind::PositiveFrequency: return "pos";
        case PropagatorKind::NegativeFrequency: return "neg";
        case PropagatorKind::Feynman: return "feyn";
        case PropagatorKind::AntiFeynman: return "antifeyn";
    }
    return "?";
}

inline const std::vector<PropagatorKind>& all_kinds() {
    static const std::vector<PropagatorKind> kinds = {
        PropagatorKind::PauliJordan,       PropagatorKind::Retarded,
        PropagatorKind::Advanced,          PropagatorKind::PositiveFrequency,
        PropagatorKind::NegativeFrequency, PropagatorKind::Feynman,
        PropagatorKind::AntiFeynman,
    };
    return kinds;
}

// ------------------------------------------------------------------ TimeGrid

// Gauss-Legendre panels on [-T, T]. Panel boundaries double as the sample
// times of convolved trajectories; `s` is the Japanese-bracket exponent of
// the weighted grid norm.
struct TimeGrid {
    double half_width = 0.0;  // T
    double s = 1.0;
    int nodes_per_unit = 16;
    std::vector<double> boundaries;  // panel edges, ascending; includes 0
    RealVector nodes;                // all panel nodes
    RealVector weights;

    static TimeGrid make(double half_width, double s = 1.0, int nodes_per_unit = 16) {
        if (!(half_width > 0.0)) throw validation_error("TimeGrid: T must be positive");
        if (!(s > 0.5)) throw validation_error("TimeGrid: weight exponent s must exceed 1/2");
        if (nodes_per_unit < 2) throw validation_error("TimeGrid: need at least 2 nodes per unit");
        TimeGrid g;
        g.half_width = half_width;
        g.s = s;
        g.nodes_per_unit = nodes_per_unit;
        const int half_panels = std::max(1, static_cast<int>(std::ceil(half_width)));
        const double width = half_width / half_panels;
        const Index per_panel =
            std::max<Index>(2, static_cast<Index>(std::lround(nodes_per_unit * width)));
        const int total_panels = 2 * half_panels;
        g.boundaries.resize(static_cast<std::size_t>(total_panels) + 1);
        for (int p = 0; p <= total_panels; ++p)
            g.boundaries[static_cast<std::size_t>(p)] = -half_width + width * p;
        g.boundaries[static_cast<std::size_t>(half_panels)] = 0.0;
        g.nodes.resize(per_panel * total_panels);
        g.weights.resize(per_panel * total_panels);
        for (int p = 0; p < total_panels; ++p) {
            const Quadrature q =
                quadrature(QuadKind::GaussLegendre, g.boundaries[static_cast<std::size_t>(p)],
                           g.boundaries[static_cast<std::size_t>(p) + 1], per_panel);
            g.nodes.segment(p * per_panel, per_panel) = q.nodes;
            g.weights.segment(p * per_panel, per_panel) = q.weights;
        }
        return g;
    }

    // (1 + t^2)^{-s} weights at the sample times, with trapezoid measure.
    double bracket_weight(double t) const { return std::pow(1.0 + t * t, -s); }
};

// Norm sqrt(sum_j tau_j <t_j>^{-2s} |v_j|^2) over trajectory samples, with a
// caller-supplied spatial norm.
inline double weighted_grid_norm(const TimeGrid& grid,
                                 const std::vector<ComplexVector>& samples,
                                 const std::function<double(const ComplexVector&)>& norm) {
    double acc = 0.0;
    const auto& b = grid.boundaries;
    for (std::size_t j = 0; j < samples.size(); ++j) {
        double tau;
        if (j == 0)
            tau = 0.5 * (b[1] - b[0]);
        else if (j + 1 == samples.size())
            tau = 0.5 * (b[j] - b[j - 1]);
        else
            tau = 0.5 * (b[j + 1] - b[j - 1]);
        const double w = grid.bracket_weight(b[j]);
        const double nj = norm(samples[j]);
        acc += tau * w * w * nj * nj;
    }
    return std::sqrt(acc);
}

// -------------------------------------------------------------- TestFunction

enum class ProfileKind { Bump, GaussianTruncated };

// Smooth compactly supported time profile with closed-form derivatives,
// multiplying a fixed spatial (or doubled) amplitude vector.
struct TimeProfile {
    ProfileKind kind = ProfileKind::Bump;
    double center = 0.0;
    double width = 1.0;  // support half-width (bump) or sigma (gaussian)

    double support_radius() const {
        return kind == ProfileKind::Bump ? width : 7.0 * width;
    }

    double value(double t) const {
        const double xi = (t - center) / width;
        if (kind == ProfileKind::Bump) {
            if (std::abs(xi) >= 1.0) return 0.0;
            return std::exp(1.0 - 1.0 / (1.0 - xi * xi));
        }
        if (std::abs(xi) >= 7.0) return 0.0;
        return std::exp(-0.5 * xi * xi);
    }

    double d1(double t) const {
        const double xi = (t - center) / width;
        if (kind == ProfileKind::Bump) {
            if (std::abs(xi) >= 1.0) return 0.0;
            const double om = 1.0 - xi * xi;
            return value(t) * (-2.0 * xi / (om * om)) / width;
        }
        if (std::abs(xi) >= 7.0) return 0.0;
        return -xi * value(t) / width;
    }

    double d2(double t) const {
        const double xi = (t - center) / width;
        if (kind == ProfileKind::Bump) {
            if (std::abs(xi) >= 1.0) return 0.0;
            const double om = 1.0 - xi * xi;
            const double g1 = -2.0 * xi / (om * om);
            const double g2 = -2.0 / (om * om) - 8.0 * xi * xi / (om * om * om);
            return value(t) * (g1 * g1 + g2) / (width * width);
        }
        if (std::abs(xi) >= 7.0) return 0.0;
        return (xi * xi - 1.0) * value(t) / (width * width);
    }
};

struct TestFunction {
    ComplexVector amplitude;  // length n (scalar level) or 2n (first-order level)
    TimeProfile profile;

    ComplexVector at(double t) const { return profile.value(t) * amplitude; }
};

// Rebuilds a grid with extra panel edges graded dyadically toward the
// profile's support boundary. The bump is smooth but not analytic there, so
// uniform panels lose the spectral rate; shrinking panels toward the flat
// edges restores it. Original panel edges are kept, so trajectory sample
// times are unchanged and Heaviside cuts still fall on panel boundaries.
inline TimeGrid refine_for_profile(const TimeGrid& grid, const TimeProfile& profile) {
    std::vector<double> edges = grid.boundaries;
    const double r = profile.support_radius();
    auto push = [&](double t) {
        if (t > -grid.half_width && t < grid.half_width) edges.push_back(t);
    };
    push(profile.center);
    for (double side : {-1.0, 1.0}) {
        push(profile.center + side * r);
        for (int k = 1; k <= 12; ++k)
            push(profile.center + side * (r - r * std::pow(2.0, -k)));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [&](double a, double b) { return b - a < 1e-12; }),
                edges.end());

    TimeGrid out;
    out.half_width = grid.half_width;
    out.s = grid.s;
    out.nodes_per_unit = grid.nodes_per_unit;
    out.boundaries = std::move(edges);
    std::vector<double> nodes, weights;
    for (std::size_t p = 0; p + 1 < out.boundaries.size(); ++p) {
        const double a = out.boundaries[p], b = out.boundaries[p + 1];
        const Index m = std::max<Index>(
            16, static_cast<Index>(std::lround(grid.nodes_per_unit * (b - a))));
        const Quadrature q = quadrature(QuadKind::GaussLegendre, a, b, m);
        for (Index j = 0; j < m; ++j) {
            nodes.push_back(q.nodes(j));
            weights.push_back(q.weights(j));
        }
    }
    out.nodes = Eigen::Map<RealVector>(nodes.data(), static_cast<Index>(nodes.size()));
    out.weights = Eigen::Map<RealVector>(weights.data(), static_cast<Index>(weights.size()));
    return out;
}

inline void require_supported(const TestFunction& f, const TimeGrid& grid) {
    const double r = f.profile.support_radius();
    if (f.profile.center - r <= -grid.half_width || f.profile.center + r >= grid.half_width)
        throw validation_error("test function support must lie inside (-T, T)");
}

// ---------------------------------------------------------- kernel evaluator

// Closed-form kernel  t >= 0: V diag(cf .* e^{-i t lam}) V^{-1}
//                     t <  0: V diag(cb .* e^{-i t lam}) V^{-1}
// The per-mode coefficient vectors encode the Heaviside/projection structure
// of all seven kinds, including absorption-shifted and Wick-rotated variants.
// Inverse kinds are right-continuous at t = 0.
struct PropagatorKernel {
    PropagatorKind kind = PropagatorKind::PauliJordan;
    Index n = 0;  // spatial size; matrices are 2n x 2n
    ComplexVector values;
    ComplexMatrix vectors, inverse_vectors;
    ComplexVector coeff_fwd, coeff_bwd;

    Index dim() const { return values.size(); }
    double max_abs_eig() const { return values.cwiseAbs().maxCoeff(); }

    ComplexVector diag(double t, int deriv = 0) const {
        const ComplexVector& c = (t >= 0.0) ? coeff_fwd : coeff_bwd;
        ComplexVector d =
            (c.array() * (Complex(0.0, -t) * values.array()).exp()).matrix();
        for (int k = 0; k < deriv; ++k)
            d = (d.array() * (Complex(0.0, -1.0) * values.array())).matrix();
        return d;
    }

    // E(t), or its analytic time derivative of the given order away from 0
    ComplexMatrix operator()(double t, int deriv = 0) const {
        return vectors * diag(t, deriv).asDiagonal() * inverse_vectors;
    }

    // E(0+) - E(0-)
    ComplexMatrix jump() const {
        return vectors * (coeff_fwd - coeff_bwd).asDiagonal() * inverse_vectors;
    }
};

namespace detail {

inline void kind_coefficients(PropagatorKind kind,
                              const Eigen::Array<bool, Eigen::Dynamic, 1>& plus,
                              ComplexVector& cf, ComplexVector& cb) {
    const Index m = plus.size();
    cf = ComplexVector::Zero(m);
    cb = ComplexVector::Zero(m);
    for (Index i = 0; i < m; ++i) {
        const bool p = plus(i);
        switch (kind) {
            case PropagatorKind::PauliJordan: cf(i) = 1.0; cb(i) = 1.0; break;
            case PropagatorKind::Retarded: cf(i) = 1.0; break;
            case PropagatorKind::Advanced: cb(i) = -1.0; break;
            case PropagatorKind::PositiveFrequency:
                if (p) { cf(i) = 1.0; cb(i) = 1.0; }
                break;
            case PropagatorKind::NegativeFrequency:
                if (!p) { cf(i) = -1.0; cb(i) = -1.0; }
                break;
            case PropagatorKind::Feynman:
                if (p) cf(i) = 1.0; else cb(i) = -1.0;
                break;
            case PropagatorKind::AntiFeynman:
                if (!p) cf(i) = 1.0; else cb(i) = -1.0;
                break;
        }
    }
}

}  // namespace detail

inline PropagatorKernel make_kernel(PropagatorKind kind, const BlockSystem& bs,
                                    const SpectralSplit& split) {
    PropagatorKernel k;
    k.kind = kind;
    k.n = bs.n;
    k.values = split.eig.values;
    k.vectors = split.eig.vectors;
    k.inverse_vectors = split.eig.inverse_vectors;
    detail::kind_coefficients(kind, split.plus, k.coeff_fwd, k.coeff_bwd);
    return k;
}

inline std::map<PropagatorKind, PropagatorKernel> make_all_kernels(
    const BlockSystem& bs, const SpectralSplit& split) {
    std::map<PropagatorKind, PropagatorKernel> ks;
    for (PropagatorKind kind : all_kinds()) ks.emplace(kind, make_kernel(kind, bs, split));
    return ks;
}

// ------------------------------------------------------------------ convolve

inline void require_grid_resolves(const PropagatorKernel& k, const TestFunction& f,
                                  const TimeGrid& grid) {
    require_supported(f, grid);
    const double needed = std::max(
        {16.0, 2.0 * k.max_abs_eig(), 12.0 / f.profile.width});
    if (static_cast<double>(grid.nodes_per_unit) < needed)
        throw grid_too_coarse("convolve: grid has " + std::to_string(grid.nodes_per_unit) +
                              " nodes per unit, needs >= " + std::to_string(needed));
}

namespace detail {

// Core quadrature: sum_q w_q D(t_i - s_q) phi_q in the eigenbasis, where
// phi_q are mode-space samples. Evaluation times must be panel boundaries of
// `quad` so the Heaviside factor is constant on every panel.
inline std::vector<ComplexVector> convolve_modes(const PropagatorKernel& k,
                                                 const std::vector<ComplexVector>& phi,
                                                 const TimeGrid& quad,
                                                 const std::vector<double>& eval_times,
                                                 int deriv) {
    const Index m = k.dim();
    std::vector<ComplexVector> out(eval_times.size());
    parallel_for_index(eval_times.size(), [&](std::size_t i) {
        const double t = eval_times[i];
        ComplexVector acc = ComplexVector::Zero(m);
        for (Index q = 0; q < quad.nodes.size(); ++q) {
            const auto& ph = phi[static_cast<std::size_t>(q)];
            if (ph.size() == 0) continue;
            acc += quad.weights(q) * k.diag(t - quad.nodes(q), deriv).cwiseProduct(ph);
        }
        out[i] = k.vectors * acc;
    });
    return out;
}

inline std::vector<ComplexVector> profile_modes(const PropagatorKernel& k,
                                                const TestFunction& f, const TimeGrid& quad) {
    const ComplexVector base = k.inverse_vectors * f.amplitude;
    std::vector<ComplexVector> phi(static_cast<std::size_t>(quad.nodes.size()));
    for (Index q = 0; q < quad.nodes.size(); ++q) {
        const double p = f.profile.value(quad.nodes(q));
        if (p != 0.0) phi[static_cast<std::size_t>(q)] = p * base;
    }
    return phi;
}

}  // namespace detail

// (E f)(t) = int E(t - s) f(s) ds at the requested sample times. `deriv`
// applies the analytic kernel derivative; the t = s jump term is NOT
// included here.
inline std::vector<ComplexVector> convolve_kernel(const PropagatorKernel& k,
                                                  const TestFunction& f, const TimeGrid& quad,
                                                  const std::vector<double>& eval_times,
                                                  int deriv = 0) {
    return detail::convolve_modes(k, detail::profile_modes(k, f, quad), quad, eval_times,
                                  deriv);
}

// Convolution of a kernel with explicit per-node samples g(s_q).
inline std::vector<ComplexVector> convolve_samples(const PropagatorKernel& k,
                                                   const std::vector<ComplexVector>& g,
                                                   const TimeGrid& quad,
                                                   const std::vector<double>& eval_times) {
    std::vector<ComplexVector> phi(g.size());
    for (std::size_t q = 0; q < g.size(); ++q) phi[q] = k.inverse_vectors * g[q];
    return detail::convolve_modes(k, phi, quad, eval_times, 0);
}

inline std::vector<ComplexVector> convolve(const PropagatorKernel& k, const TestFunction& f,
                                           const TimeGrid& grid) {
    require_grid_resolves(k, f, grid);
    const TimeGrid quad = refine_for_profile(grid, f.profile);
    return convolve_kernel(k, f, quad, grid.boundaries);
}

// ------------------------------------------------------------- scalar reduce

// Reduction of a first-order kernel to a scalar Klein-Gordon propagator:
//   G(t) = factor * beta^{1/2} [E(t)]_{12-block} beta^{1/2},
// where factor = sigma*i for inverses and the Pauli-Jordan kernel, and 1 for
// the frequency bisolutions. sigma is pinned to +1 by the single-mode
// requirement K G_ret f = f.
struct ScalarPropagator {
    PropagatorKind kind = PropagatorKind::Retarded;
    int sigma = 1;
    Complex factor{1.0, 0.0};
    Index n = 0;
    ComplexVector values;
    ComplexMatrix top;    // beta^{1/2} * top rows of V        (n x 2n)
    ComplexMatrix right;  // right cols of V^{-1} * beta^{1/2} (2n x n)
    ComplexVector coeff_fwd, coeff_bwd;

    ComplexVector diag(double t, int deriv = 0) const {
        const ComplexVector& c = (t >= 0.0) ? coeff_fwd : coeff_bwd;
        ComplexVector d =
            (c.array() * (Complex(0.0, -t) * values.array()).exp()).matrix();
        for (int k = 0; k < deriv; ++k)
            d = (d.array() * (Complex(0.0, -1.0) * values.array())).matrix();
        return d;
    }
    ComplexMatrix operator()(double t, int deriv = 0) const {
        return factor * (top * diag(t, deriv).asDiagonal() * right);
    }
    // jump of the `deriv`-th kernel derivative at t = 0
    ComplexMatrix jump(int deriv = 0) const {
        ComplexVector d = coeff_fwd - coeff_bwd;
        for (int k = 0; k < deriv; ++k)
            d = (d.array() * (Complex(0.0, -1.0) * values.array())).matrix();
        return factor * (top * d.asDiagonal() * right);
    }
};

inline ScalarPropagator scalar_reduce(const PropagatorKernel& k, const BlockSystem& bs,
                                      int sigma = 1) {
    ScalarPropagator g;
    g.kind = k.kind;
    g.sigma = sigma;
    g.factor = is_frequency_kind(k.kind) ? Complex(1.0, 0.0)
                                         : Complex(0.0, static_cast<double>(sigma));
    g.n = bs.n;
    g.values = k.values;
    g.top = bs.beta_sqrt.cast<Complex>().asDiagonal() * k.vectors.topRows(bs.n);
    g.right = k.inverse_vectors.rightCols(bs.n) *
              bs.beta_sqrt.cast<Complex>().asDiagonal();
    g.coeff_fwd = k.coeff_fwd;
    g.coeff_bwd = k.coeff_bwd;
    return g;
}

// ------------------------------------------------------------- identity web

struct IdentityCheck {
    std::string name;
    double residual = 0.0;  // relative to the largest term
    double tolerance = 1e-10;
    bool pass() const { return residual <= tolerance; }
};

struct IdentityReport {
    std::vector<IdentityCheck> checks;
    double max_residual = 0.0;
    int sigma = 1;
    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass()) return false;
        return true;
    }
};

namespace detail {

inline double relative_residual(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
    const double scale = std::max({lhs.norm(), rhs.norm(), 1e-300});
    return (lhs - rhs).norm() / scale;
}

}  // namespace detail

// Verifies the full E-level and G-level relation web at the sample times,
// plus the jump relations and support properties.
inline IdentityReport identity_suite(const BlockSystem& bs, const SpectralSplit& split,
                                     const std::vector<double>& times, int sigma = 1) {
    using PK = PropagatorKind;
    const auto ks = make_all_kernels(bs, split);
    std::map<PK, ScalarPropagator> gs;
    for (const auto& [kind, k] : ks) gs.emplace(kind, scalar_reduce(k, bs, sigma));
    const Complex i1(0.0, 1.0);

    struct Rel {
        std::string name;
        std::function<ComplexMatrix(double)> lhs, rhs;
    };
    std::vector<Rel> rels;
    auto E = [&](PK k) { return &ks.at(k); };
    auto G = [&](PK k) { return &gs.at(k); };
    rels.push_back({"E: F = adv + pos",
                    [=](double t) -> ComplexMatrix { return (*E(PK::Feynman))(t); },
                    [=](double t) -> ComplexMatrix { return (*E(PK::Advanced))(t) + (*E(PK::PositiveFrequency))(t); }});
    rels.push_back({"E: F = ret + neg",
                    [=](double t) -> ComplexMatrix { return (*E(PK::Feynman))(t); },
                    [=](double t) -> ComplexMatrix { return (*E(PK::Retarded))(t) + (*E(PK::NegativeFrequency))(t); }});
    rels.push_back({"E: F + antiF = ret + adv",
                    [=](double t) -> ComplexMatrix { return (*E(PK::Feynman))(t) + (*E(PK::AntiFeynman))(t); },
                    [=](double t) -> ComplexMatrix { return (*E(PK::Retarded))(t) + (*E(PK::Advanced))(t); }});
    rels.push_back({"E: pos - neg = pj",
                    [=](double t) -> ComplexMatrix { return (*E(PK::PositiveFrequency))(t) - (*E(PK::NegativeFrequency))(t); },
                    [=](double t) -> ComplexMatrix { return (*E(PK::PauliJordan))(t); }});
    rels.push_back({"E: antiF = ret - pos",
                    [=](double t) -> ComplexMatrix { return (*E(PK::AntiFeynman))(t); },
                    [=](double t) -> ComplexMatrix { return (*E(PK::Retarded))(t) - (*E(PK::PositiveFrequency))(t); }});
    rels.push_back({"E: antiF = adv - neg",
                    [=](double t) -> ComplexMatrix { return (*E(PK::AntiFeynman))(t); },
                    [=](double t) -> ComplexMatrix { return (*E(PK::Advanced))(t) - (*E(PK::NegativeFrequency))(t); }});
    rels.push_back({"E: F - antiF = pos + neg",
                    [=](double t) -> ComplexMatrix { return (*E(PK::Feynman))(t) - (*E(PK::AntiFeynman))(t); },
                    [=](double t) -> ComplexMatrix { return (*E(PK::PositiveFrequency))(t) + (*E(PK::NegativeFrequency))(t); }});
    rels.push_back({"E: pj = ret - adv",
                    [=](double t) -> ComplexMatrix { return (*E(PK::PauliJordan))(t); },
                    [=](double t) -> ComplexMatrix { return (*E(PK::Retarded))(t) - (*E(PK::Advanced))(t); }});
    rels.push_back({"G: F = adv + i pos",
                    [=](double t) -> ComplexMatrix { return (*G(PK::Feynman))(t); },
                    [=](double t) -> ComplexMatrix { return (*G(PK::Advanced))(t) + i1 * (*G(PK::PositiveFrequency))(t); }});
    rels.push_back({"G: F = ret + i neg",
                    [=](double t) -> ComplexMatrix { return (*G(PK::Feynman))(t); },
                    [=](double t) -> ComplexMatrix { return (*G(PK::Retarded))(t) + i1 * (*G(PK::NegativeFrequency))(t); }});
    rels.push_back({"G: F + antiF = ret + adv",
                    [=](double t) -> ComplexMatrix { return (*G(PK::Feynman))(t) + (*G(PK::AntiFeynman))(t); },
                    [=](double t) -> ComplexMatrix { return (*G(PK::Retarded))(t) + (*G(PK::Advanced))(t); }});
    rels.push_back({"G: pos - neg = -i pj",
                    [=](double t) -> ComplexMatrix { return (*G(PK::PositiveFrequency))(t) - (*G(PK::NegativeFrequency))(t); },
                    [=](double t) -> ComplexMatrix { return -i1 * (*G(PK::PauliJordan))(t); }});
    rels.push_back({"G: antiF = ret - i pos",
                    [=](double t) -> ComplexMatrix { return (*G(PK::AntiFeynman))(t); },
                    [=](double t) -> ComplexMatrix { return (*G(PK::Retarded))(t) - i1 * (*G(PK::PositiveFrequency))(t); }});
    rels.push_back({"G: antiF = adv - i neg",
                    [=](double t) -> ComplexMatrix { return (*G(PK::AntiFeynman))(t); },
                    [=](double t) -> ComplexMatrix { return (*G(PK::Advanced))(t) - i1 * (*G(PK::NegativeFrequency))(t); }});
    rels.push_back({"G: F - antiF = i pos + i neg",
                    [=](double t) -> ComplexMatrix { return (*G(PK::Feynman))(t) - (*G(PK::AntiFeynman))(t); },
                    [=](double t) -> ComplexMatrix {
                        return i1 * ((*G(PK::PositiveFrequency))(t) + (*G(PK::NegativeFrequency))(t));
                    }});

    IdentityReport report;
    report.sigma = sigma;
    std::vector<IdentityCheck> relChecks(rels.size());
    parallel_for_index(rels.size(), [&](std::size_t ri) {
        double worst = 0.0;
        for (double t : times)
            worst = std::max(worst, detail::relative_residual(rels[ri].lhs(t), rels[ri].rhs(t)));
        relChecks[ri] = IdentityCheck{rels[ri].name, worst, 1e-10};
    });
    report.checks = std::move(relChecks);

    // jump relations: inverses jump by the identity at t = 0, bisolutions are
    // continuous; E^PJ(0) = 1
    const Index m2 = 2 * bs.n;
    const ComplexMatrix id = ComplexMatrix::Identity(m2, m2);
    for (PK kind : all_kinds()) {
        const ComplexMatrix j = ks.at(kind).jump();
        const double r = is_inverse(kind) ? (j - id).norm() / id.norm() : j.norm() / id.norm();
        report.checks.push_back(
            {std::string("jump: ") + kind_tag(kind), r, 1e-12});
    }
    report.checks.push_back({"pj(0) = 1",
                             ((ks.at(PK::PauliJordan))(0.0) - id).norm() / id.norm(), 1e-12});
    // support: ret vanishes for t < 0, adv for t >= 0 (right-continuous at 0)
    double supp = 0.0;
    for (double t : {-3.0, -0.25, 0.25, 3.0}) {
        if (t < 0) supp = std::max(supp, (ks.at(PK::Retarded))(t).norm());
        if (t >= 0) supp = std::max(supp, (ks.at(PK::Advanced))(t).norm());
    }
    supp = std::max(supp, (ks.at(PK::Advanced))(0.0).norm());
    report.checks.push_back({"support: ret/adv causal", supp, 0.0});

    for (const auto& c : report.checks) report.max_residual = std::max(report.max_residual, c.residual);
    return report;
}

// --------------------------------------------- inverse / bisolution contracts

namespace detail {

inline std::vector<ComplexVector> sample_nodes(const TimeGrid& grid,
                                               const std::function<ComplexVector(double)>& f) {
    std::vector<ComplexVector> out(static_cast<std::size_t>(grid.nodes.size()));
    for (Index q = 0; q < grid.nodes.size(); ++q)
        out[static_cast<std::size_t>(q)] = f(grid.nodes(q));
    return out;
}

}  // namespace detail

// Residual of the first-order contract (d_t + iB) E f = f (inverse) or 0
// (bisolution), in the weighted grid norm. Checks both compositions of the
// defining property: E applied to (d_t + iB)f with the profile derivative
// taken analytically, and the operator applied to the convolved trajectory
// with the kernel derivative plus the unit jump at t = s.
inline double inverse_residual_E(const PropagatorKernel& k, const BlockSystem& bs,
                                 const TestFunction& f, const TimeGrid& grid) {
    require_grid_resolves(k, f, grid);
    if (f.amplitude.size() != 2 * bs.n)
        throw length_mismatch("inverse_residual_E: amplitude must have length 2n");
    const bool inv = is_inverse(k.kind);
    const TimeGrid quad = refine_for_profile(grid, f.profile);
    const auto& eval = quad.boundaries;
    auto en = [&](const ComplexVector& u) { return bs.en_norm(u); };

    // composition 1: E (d_t + iB) f
    const ComplexVector iba = Complex(0.0, 1.0) * (bs.b * f.amplitude);
    const auto g = detail::sample_nodes(quad, [&](double s) -> ComplexVector {
        return f.profile.d1(s) * f.amplitude + f.profile.value(s) * iba;
    });
    auto traj1 = convolve_samples(k, g, quad, eval);
    for (std::size_t j = 0; j < traj1.size(); ++j) {
        if (inv) traj1[j] -= f.at(eval[j]);
    }
    const double r1 = weighted_grid_norm(quad, traj1, en);

    // composition 2: (d_t + iB) (E f)
    const auto u = convolve_kernel(k, f, quad, eval);
    const auto du = convolve_kernel(k, f, quad, eval, 1);
    const ComplexMatrix jump = k.jump();
    std::vector<ComplexVector> res(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double t = eval[j];
        res[j] = du[j] + jump * f.at(t) + Complex(0.0, 1.0) * (bs.b * u[j]);
        if (inv) res[j] -= f.at(t);
    }
    const double r2 = weighted_grid_norm(quad, res, en);
    return std::max(r1, r2);
}

// Residual of the scalar contract K G f = f (inverse) or 0 (bisolution),
// optionally with a spectral shift: (K - z) G_z f = f. The shift acts on the
// beta-reduced operator, i.e. the check is (Ktilde - z) applied to
// beta^{-1/2} (G f) against beta^{1/2} f sampling, which for beta = 1 is K - z
// itself.
inline double inverse_residual_G(const ScalarPropagator& g, const BlockSystem& bs,
                                 const TestFunction& f, const TimeGrid& grid,
                                 Complex shift = Complex(0.0, 0.0)) {
    if (f.amplitude.size() != bs.n)
        throw length_mismatch("inverse_residual_G: amplitude must have length n");
    require_supported(f, grid);
    const TimeGrid quad = refine_for_profile(grid, f.profile);
    const auto& eval = quad.boundaries;
    const bool inv = is_inverse(g.kind);
    const RealVector binv = bs.beta_sqrt.cwiseInverse();
    auto wnorm = [&](const ComplexVector& x) {
        return std::sqrt(std::max(0.0, std::real(x.dot(bs.spatial_weight * x))));
    };
    const ComplexMatrix m =
        bs.l - detail::diag_matrix(bs.v.cwiseProduct(bs.v)) -
        shift * ComplexMatrix::Identity(bs.n, bs.n);

    // K f with analytic profile derivatives
    const ComplexVector bvec = binv.cast<Complex>().asDiagonal() * f.amplitude;
    const ComplexVector mb = m * bvec;
    const ComplexVector vb =
        Complex(0.0, 2.0) * (bs.v.cast<Complex>().asDiagonal() * bvec);
    auto kf = [&](double s) -> ComplexVector {
        return binv.cast<Complex>().asDiagonal() *
               (f.profile.d2(s) * bvec + f.profile.d1(s) * vb + f.profile.value(s) * mb)
                   .eval();
    };

    // composition 1: G (K f)
    const std::size_t nt = eval.size();
    std::vector<ComplexVector> traj1(nt);
    {
        std::vector<ComplexVector> phi(static_cast<std::size_t>(quad.nodes.size()));
        for (Index q = 0; q < quad.nodes.size(); ++q)
            phi[static_cast<std::size_t>(q)] = g.right * kf(quad.nodes(q));
        parallel_for_index(nt, [&](std::size_t i) {
            const double t = eval[i];
            ComplexVector acc = ComplexVector::Zero(2 * bs.n);
            for (Index q = 0; q < quad.nodes.size(); ++q)
                acc += quad.weights(q) *
                       g.diag(t - quad.nodes(q)).cwiseProduct(phi[static_cast<std::size_t>(q)]);
            traj1[i] = g.factor * (g.top * acc);
            if (inv) traj1[i] -= f.at(t);
        });
    }
    const double r1 = weighted_grid_norm(quad, traj1, wnorm);

    // composition 2: K (G f) with kernel derivatives and jump terms
    auto conv = [&](int deriv) {
        std::vector<ComplexVector> out(nt);
        const ComplexVector rphi = g.right * f.amplitude;
        parallel_for_index(nt, [&](std::size_t i) {
            const double t = eval[i];
            ComplexVector acc = ComplexVector::Zero(2 * bs.n);
            for (Index q = 0; q < quad.nodes.size(); ++q) {
                const double p = f.profile.value(quad.nodes(q));
                if (p == 0.0) continue;
                acc += (quad.weights(q) * p) * g.diag(t - quad.nodes(q), deriv);
            }
            out[i] = g.factor * (g.top * acc.cwiseProduct(rphi));
        });
        return out;
    };
    const auto u0 = conv(0);
    const auto u1 = conv(1);
    const auto u2 = conv(2);
    const ComplexMatrix j0 = g.jump(0);
    const ComplexMatrix j1 = g.jump(1);
    std::vector<ComplexVector> res(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        const double t = eval[i];
        const ComplexVector du = u1[i] + j0 * f.at(t);
        const ComplexVector ddu = u2[i] + j1 * f.at(t) + j0 * (f.profile.d1(t) * f.amplitude);
        const ComplexVector vv = binv.cast<Complex>().asDiagonal() * u0[i];
        const ComplexVector vp = binv.cast<Complex>().asDiagonal() * du;
        const ComplexVector vpp = binv.cast<Complex>().asDiagonal() * ddu;
        res[i] = binv.cast<Complex>().asDiagonal() *
                 (vpp + Complex(0.0, 2.0) * (bs.v.cast<Complex>().asDiagonal() * vp) + m * vv)
                     .eval();
        if (inv) res[i] -= f.at(t);
    }
    const double r2 = weighted_grid_norm(quad, res, wnorm);
    return std::max(r1, r2);
}

// ------------------------------------------------------ frequency positivity

// Double-quadrature value of (f | G^(pm) f) over the spacetime measure.
// Evaluated mode by mode; the result is real and nonnegative up to rounding.
inline Complex frequency_positivity(const ScalarPropagator& g, const BlockSystem& bs,
                                    const TestFunction& f, const TimeGrid& grid) {
    if (!is_frequency_kind(g.kind))
        throw validation_error("frequency_positivity: kind must be a frequency bisolution");
    if (f.amplitude.size() != bs.n)
        throw length_mismatch("frequency_positivity: amplitude must have length n");
    require_supported(f, grid);
    const TimeGrid quad = refine_for_profile(grid, f.profile);
    const Index m = g.values.size();
    const Eigen::RowVectorXcd lrow =
        (bs.spatial_weight * f.amplitude).adjoint() * g.top;  // 1 x 2n
    const ComplexVector rcol = g.right * f.amplitude;         // 2n x 1
    Complex total(0.0, 0.0);
    for (Index mm = 0; mm < m; ++mm) {
        const Complex c = g.coeff_fwd(mm);
        if (c == Complex(0.0, 0.0)) continue;
        Complex s(0.0, 0.0);
        for (Index q = 0; q < quad.nodes.size(); ++q) {
            const double p = f.profile.value(quad.nodes(q));
            if (p == 0.0) continue;
            s += quad.weights(q) * p *
                 std::exp(Complex(0.0, -quad.nodes(q)) * g.values(mm));
        }
        total += c * lrow(mm) * rcol(mm) * std::norm(s);
    }
    return g.factor * total;
}

}  // namespace staticprop
