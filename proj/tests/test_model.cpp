#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace staticprop;

TEST_CASE("presets") {
    SECTION("M0 is the single mode with L = [1]") {
        const Setup s = make_setup("M0");
        REQUIRE(s.model.n == 1);
        REQUIRE(std::abs(s.op.matrix(0, 0) - Complex(1.0, 0.0)) <= 1e-14);
        REQUIRE(s.model.v(0) == 0.0);
    }
    SECTION("M1 spectrum matches the Fourier oracle with multiplicities") {
        const Setup s = make_setup("M1");
        const auto ed = hermitian_eig_weighted(s.op.matrix, s.op.space);
        const auto got = sorted_real(ed.values);
        const auto want = ring_spectrum(8);  // {1, 3-sqrt2, 3-sqrt2, 3, 3, 3+sqrt2, 3+sqrt2, 5}
        for (std::size_t i = 0; i < want.size(); ++i)
            REQUIRE(got[i] == Catch::Approx(want[i]).margin(1e-12));
        REQUIRE(want[1] == Catch::Approx(3.0 - std::sqrt(2.0)).margin(1e-15));
    }
    SECTION("M2 differs from M1 only in V") {
        const Setup s1 = make_setup("M1"), s2 = make_setup("M2");
        REQUIRE(max_abs_diff(s1.op.matrix, s2.op.matrix) <= 1e-15);
        REQUIRE(s2.model.v(0) == Catch::Approx(0.2));
    }
    SECTION("unknown preset") {
        REQUIRE_THROWS_AS(preset_model("M7"), invalid_field);
    }
}

TEST_CASE("build_model validation") {
    SpatialModel m = preset_model("M1");
    SECTION("nonpositive beta") {
        m.beta(3) = 0.0;
        REQUIRE_THROWS_AS(build_model(m), invalid_field);
    }
    SECTION("negative Y") {
        m.y(0) = -0.5;
        REQUIRE_THROWS_AS(build_model(m), invalid_field);
    }
    SECTION("length mismatch") {
        m.a = RealVector::LinSpaced(5, 0.0, 1.0);
        REQUIRE_THROWS_AS(build_model(m), length_mismatch);
    }
}

TEST_CASE("constant magnetic potential shifts the Fourier symbol") {
    SpatialModel m = preset_model("M1");
    const double a = 0.3;
    m.a = RealVector::Constant(8, a);
    const auto op = assemble_L(build_model(m));
    const auto got = sorted_real(hermitian_eig_weighted(op.matrix, op.space).values);
    const auto want = ring_spectrum(8, 1.0, 1.0, a);
    for (std::size_t i = 0; i < want.size(); ++i)
        REQUIRE(got[i] == Catch::Approx(want[i]).margin(1e-12));
}

TEST_CASE("inhomogeneous coefficients keep W L exactly Hermitian") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> pos(0.5, 2.0), any(-1.0, 1.0);
    SpatialModel m;
    m.n = 11;
    m.dx = 0.35;
    m.boundary = Boundary::Periodic;
    m.beta.resize(11);
    m.g_sigma.resize(11);
    m.a.resize(11);
    m.y.resize(11);
    m.v.resize(11);
    for (Index j = 0; j < 11; ++j) {
        m.beta(j) = pos(rng);
        m.g_sigma(j) = pos(rng);
        m.a(j) = any(rng);
        m.y(j) = pos(rng);
        m.v(j) = 0.2 * any(rng);
    }
    for (auto boundary : {Boundary::Periodic, Boundary::Dirichlet}) {
        m.boundary = boundary;
        const auto op = assemble_L(build_model(m));
        const ComplexMatrix wl = op.space.weight() * op.matrix;
        REQUIRE(hermitian_defect(wl) <= 1e-14);
    }
}

TEST_CASE("dirichlet couplings on a two-node chain") {
    SpatialModel m;
    m.n = 2;
    m.dx = 1.0;
    m.boundary = Boundary::Dirichlet;
    m.beta = RealVector::Constant(1, 1.0);
    m.g_sigma = RealVector::Constant(1, 1.0);
    m.a = RealVector::Constant(1, 0.0);
    m.y = RealVector::Constant(1, 0.0);
    m.v = RealVector::Constant(1, 0.0);
    const auto op = assemble_L(build_model(m));
    ComplexMatrix want(2, 2);
    want << 2, -1, -1, 2;
    REQUIRE(max_abs_diff(op.matrix, want) <= 1e-14);
}

TEST_CASE("assumption report on the presets") {
    SECTION("M1: unit lower bounds") {
        const Setup s = make_setup("M1");
        const auto r = check_assumptions(s.model, s.op);
        REQUIRE(r.min_eig_l_minus_v2 == Catch::Approx(1.0).margin(1e-10));
        REQUIRE(r.min_eig_l_minus_2v2 == Catch::Approx(1.0).margin(1e-10));
        REQUIRE(r.dissipativity_ok);
        REQUIRE(r.all_ok());
        REQUIRE(r.h_lower_bound == Catch::Approx(1.0).margin(1e-6));
    }
    SECTION("M2: constant shift of the M1 spectrum") {
        const Setup s = make_setup("M2");
        const auto r = check_assumptions(s.model, s.op);
        REQUIRE(r.min_eig_l_minus_v2 == Catch::Approx(0.96).margin(1e-10));
        REQUIRE(r.min_eig_l_minus_2v2 == Catch::Approx(0.92).margin(1e-10));
        // derived H bound: min eig H = 0.8 for the slowest mode
        REQUIRE(r.h_lower_bound == Catch::Approx(0.8).margin(1e-6));
        REQUIRE(r.all_ok());
    }
    SECTION("M1 with Y = 0: the constant mode kills positivity") {
        SpatialModel m = preset_model("M1");
        m.y = RealVector::Constant(8, 0.0);
        m = build_model(m);
        const auto op = assemble_L(m);
        const auto r = check_assumptions(m, op);
        REQUIRE(std::abs(r.min_eig_l_minus_v2) <= 1e-12);
        REQUIRE_FALSE(r.h_positive);
    }
}

TEST_CASE("refinement of M1 converges at second order") {
    // continuum ring of circumference 8: lowest nonconstant eigenvalue 1 + (2 pi / 8)^2
    const double continuum = 1.0 + std::pow(2.0 * pi / 8.0, 2);
    std::vector<double> hs, errs;
    for (int n : {8, 16, 32}) {
        SpatialModel m = preset_model("M1");
        m.n = n;
        m.dx = 8.0 / n;
        m = build_model(m);
        const auto op = assemble_L(m);
        const auto got = sorted_real(hermitian_eig_weighted(op.matrix, op.space).values);
        hs.push_back(m.dx);
        errs.push_back(std::abs(got[1] - continuum));
    }
    const double slope = detail::loglog_slope(hs, errs);
    REQUIRE(slope == Catch::Approx(2.0).margin(0.2));
}
