// Shared fixtures and independent oracles for the test suite. The ring
// oracles come from the discrete Fourier diagonalization of the periodic
// lattice and never touch the library's eigensolver path.
#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "staticprop/staticprop.hpp"

namespace sp = staticprop;

struct Setup {
    sp::SpatialModel model;
    sp::SpatialOperator op;
    sp::BlockSystem bs;
    sp::SpectralSplit split;
};

inline Setup make_setup(const std::string& preset) {
    sp::SpatialModel model = sp::preset_model(preset);
    sp::SpatialOperator op = sp::assemble_L(model);
    sp::BlockSystem bs = sp::assemble_blocks(op, model);
    sp::SpectralSplit split = sp::spectral_split(bs);
    return Setup{std::move(model), std::move(op), std::move(bs), std::move(split)};
}

// Fourier oracle for the free ring: eigenvalues of L for constant unit
// coefficients are Y + (2 - 2 cos(2 pi k / n - A dx)) / dx^2.
inline std::vector<double> ring_spectrum(int n, double dx = 1.0, double y = 1.0,
                                         double a = 0.0) {
    std::vector<double> mu(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double phase = 2.0 * sp::pi * k / n - a * dx;
        mu[static_cast<std::size_t>(k)] = y + (2.0 - 2.0 * std::cos(phase)) / (dx * dx);
    }
    std::sort(mu.begin(), mu.end());
    return mu;
}

// Per-mode oracle for spec(B) at constant V: {V + sqrt(mu), V - sqrt(mu)}.
inline std::vector<double> block_spectrum(const std::vector<double>& mu, double v) {
    std::vector<double> lam;
    for (double m : mu) {
        lam.push_back(v - std::sqrt(m));
        lam.push_back(v + std::sqrt(m));
    }
    std::sort(lam.begin(), lam.end());
    return lam;
}

inline std::vector<double> sorted_real(const sp::ComplexVector& values) {
    std::vector<double> out(static_cast<std::size_t>(values.size()));
    for (sp::Index i = 0; i < values.size(); ++i) out[static_cast<std::size_t>(i)] = values(i).real();
    std::sort(out.begin(), out.end());
    return out;
}

inline sp::ComplexVector random_complex_vector(sp::Index dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    sp::ComplexVector u(dim);
    for (sp::Index j = 0; j < dim; ++j) u(j) = sp::Complex(gauss(rng), gauss(rng));
    return u;
}

inline double max_abs_diff(const sp::ComplexMatrix& a, const sp::ComplexMatrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}
