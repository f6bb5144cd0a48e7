// Acceptance suite: one pass/fail line per criterion, exit 1 if any fails.
// Every tolerance is pinned here; nothing is deferred to configuration.
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <vector>

#include "helpers.hpp"

using namespace staticprop;
using PK = PropagatorKind;

namespace {

int g_failures = 0;

void criterion(int id, const std::string& label, const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool pass = false;
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %2d [%s] %s%s%s\n", id, pass ? "PASS" : "FAIL", label.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) ++g_failures;
}

std::vector<double> random_times(std::size_t count, double half, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-half, half);
    std::vector<double> ts(count);
    for (auto& t : ts) t = dist(rng);
    return ts;
}

}  // namespace

int main() {
    const std::vector<std::string> presets = {"M0", "M1", "M2"};

    criterion(1, "structure: L W-Hermitian, H = QB, HB Hermitian, spec(B) real, 0 not in spec(B)",
              [&](std::string& detail) {
                  bool ok = true;
                  double worst = 0.0;
                  for (const auto& p : presets) {
                      const Setup s = make_setup(p);
                      const double ldef = hermitian_defect(s.op.space.weight() * s.op.matrix);
                      ok = ok && ldef <= 1e-10;
                      ok = ok && (s.bs.q * s.bs.b - s.bs.h).norm() == 0.0;
                      const double hbdef = hermitian_defect(s.bs.h * s.bs.b);
                      ok = ok && hbdef <= 1e-10;
                      ok = ok && s.split.eig.values.imag().cwiseAbs().maxCoeff() <= 1e-12;
                      ok = ok && s.split.min_abs_eig > 1e-12 * s.split.eig.max_abs();
                      worst = std::max({worst, ldef, hbdef});
                  }
                  detail = "max Hermiticity defect " + format_double(worst);
                  return ok;
              });

    criterion(2, "Hamiltonian positivity criterion, C in {0.1, 0.5, 0.9} on M1, M2",
              [&](std::string& detail) {
                  bool ok = true;
                  int agree = 0;
                  for (const auto& p : {std::string("M1"), std::string("M2")}) {
                      const Setup s = make_setup(p);
                      WeightedSpace l2d(s.bs.double_weight());
                      for (double c : {0.1, 0.5, 0.9}) {
                          const Index m = 2 * s.bs.n;
                          const bool lhs =
                              hermitian_eig_weighted(
                                  s.bs.h - c * ComplexMatrix::Identity(m, m), l2d)
                                  .values.real()
                                  .minCoeff() > 0.0;
                          const ComplexMatrix crit =
                              s.bs.l - c * ComplexMatrix::Identity(s.bs.n, s.bs.n) -
                              detail::diag_matrix(s.model.v.cwiseProduct(s.model.v)) /
                                  (1.0 - c);
                          const bool rhs = hermitian_eig_weighted(crit, s.op.space)
                                               .values.real()
                                               .minCoeff() > 0.0;
                          ok = ok && (lhs == rhs);
                          agree += (lhs == rhs);
                      }
                  }
                  detail = std::to_string(agree) + "/6 boolean agreements";
                  return ok;
              });

    criterion(3, "factorized resolvent equals dense solve at 20 off-spectrum points",
              [&](std::string& detail) {
                  bool ok = true;
                  double worst = 0.0;
                  std::mt19937 rng(7);
                  std::uniform_real_distribution<double> box(-3.0, 3.0);
                  for (const auto& p : presets) {
                      const Setup s = make_setup(p);
                      int found = 0;
                      while (found < 20) {
                          const Complex z(box(rng), box(rng));
                          if ((s.split.eig.values.array() - z).abs().minCoeff() < 0.1) continue;
                          ++found;
                          const ComplexMatrix rf = resolvent_B(s.bs, s.split, z);
                          const ComplexMatrix rd = resolvent_dense(s.bs, z);
                          const double rel = (rf - rd).norm() / rd.norm();
                          worst = std::max(worst, rel);
                          ok = ok && rel <= 1e-10;
                      }
                  }
                  detail = "max relative difference " + format_double(worst);
                  return ok;
              });

    criterion(4, "identity web at 32 random times in [-10, 10] on all presets",
              [&](std::string& detail) {
                  bool ok = true;
                  double worst = 0.0;
                  const auto times = random_times(32, 10.0, 1234);
                  for (const auto& p : presets) {
                      const Setup s = make_setup(p);
                      const auto rep = identity_suite(s.bs, s.split, times);
                      ok = ok && rep.pass();
                      worst = std::max(worst, rep.max_residual);
                  }
                  detail = "max residual " + format_double(worst);
                  return ok;
              });

    criterion(5, "inverse/bisolution contracts <= 1e-6 for all seven kinds; sigma = +1 closed forms",
              [&](std::string& detail) {
                  bool ok = true;
                  double worst = 0.0;
                  const TimeGrid grid = TimeGrid::make(6.0);
                  for (const auto& p : presets) {
                      const Setup s = make_setup(p);
                      const TestFunction f2{random_complex_vector(2 * s.bs.n, 5),
                                            TimeProfile{ProfileKind::Bump, 0.2, 1.1}};
                      const TestFunction f1{random_complex_vector(s.bs.n, 6),
                                            TimeProfile{ProfileKind::Bump, -0.3, 1.3}};
                      for (PK kind : all_kinds()) {
                          const auto k = make_kernel(kind, s.bs, s.split);
                          const double re = inverse_residual_E(k, s.bs, f2, grid);
                          const double rg =
                              inverse_residual_G(scalar_reduce(k, s.bs), s.bs, f1, grid);
                          worst = std::max({worst, re, rg});
                          ok = ok && re <= 1e-6 && rg <= 1e-6;
                      }
                  }
                  // single-mode closed forms with the calibrated sign
                  const Setup m0 = make_setup("M0");
                  const auto gret =
                      scalar_reduce(make_kernel(PK::Retarded, m0.bs, m0.split), m0.bs);
                  const auto gf = scalar_reduce(make_kernel(PK::Feynman, m0.bs, m0.split), m0.bs);
                  for (double t : {-2.0, -0.5, 0.5, 1.0, 3.0}) {
                      const Complex ret_want = t >= 0.0 ? Complex(std::sin(t), 0.0) : 0.0;
                      const Complex f_want =
                          Complex(0, 1) * std::exp(Complex(0, -std::abs(t))) / 2.0;
                      ok = ok && std::abs(gret(t)(0, 0) - ret_want) <= 1e-8;
                      ok = ok && std::abs(gf(t)(0, 0) - f_want) <= 1e-8;
                  }
                  detail = "max quadrature residual " + format_double(worst);
                  return ok;
              });

    criterion(6, "positivity: Q Pi+ PSD and (f | G^(pm) f) >= -1e-8 for 20 random bumps",
              [&](std::string& detail) {
                  bool ok = true;
                  double min_val = 0.0;
                  const TimeGrid grid = TimeGrid::make(6.0);
                  for (const auto& p : {std::string("M1"), std::string("M2")}) {
                      const Setup s = make_setup(p);
                      const auto cp = charge_positivity(s.bs, s.split);
                      ok = ok && cp.min_eig_plus >= -1e-10 && cp.min_eig_minus >= -1e-10;
                      const auto gp = scalar_reduce(
                          make_kernel(PK::PositiveFrequency, s.bs, s.split), s.bs);
                      const auto gm = scalar_reduce(
                          make_kernel(PK::NegativeFrequency, s.bs, s.split), s.bs);
                      for (unsigned seed = 0; seed < 20; ++seed) {
                          const TestFunction f{random_complex_vector(s.bs.n, 100 + seed),
                                               TimeProfile{ProfileKind::Bump, 0.1, 1.4}};
                          for (const auto* g : {&gp, &gm}) {
                              const Complex v = frequency_positivity(*g, s.bs, f, grid);
                              min_val = std::min(min_val, v.real());
                              ok = ok && v.real() >= -1e-8 && std::abs(v.imag()) <= 1e-8;
                          }
                      }
                  }
                  detail = "min quadratic form value " + format_double(min_val);
                  return ok;
              });

    criterion(7, "spectral gap: |Re spec(B_z)| >= alpha for z in i{0, +-0.1, +-1}",
              [&](std::string& detail) {
                  bool ok = true;
                  const Setup m1 = make_setup("M1");
                  const Setup m2 = make_setup("M2");
                  ok = ok && std::abs(spectral_gap(1.0, 0.5, 0.0) - 0.7071) <= 1e-4;
                  ok = ok && std::abs(spectral_gap(0.96, 0.5, 0.2) - 0.5071) <= 1e-4;
                  int violations = 0;
                  for (const Setup* s : {&m1, &m2}) {
                      const double big_c = s->op.lower_bound_c;
                      for (double zi : {0.0, 0.1, -0.1, 1.0, -1.0}) {
                          const auto sg = make_shifted(s->bs, Complex(0.0, zi));
                          for (double c : {big_c / 4.0, big_c / 2.0})
                              if (sg.min_abs_re() < spectral_gap(big_c, c, s->model.v_norm()))
                                  ++violations;
                      }
                  }
                  ok = ok && violations == 0;
                  detail = std::to_string(violations) + " violations";
                  return ok;
              });

    criterion(8, "bisectorial projections: contour vs oracle <= 1e-6, algebra <= 1e-8, bisection exact",
              [&](std::string& detail) {
                  bool ok = true;
                  double worst = 0.0;
                  for (const auto& p : {std::string("M1"), std::string("M2")}) {
                      const Setup s = make_setup(p);
                      for (double zi : {0.1, 1.0, -0.1}) {
                          const auto sg = make_shifted(s.bs, Complex(0.0, zi));
                          const auto oracle = oracle_projections(sg);
                          const auto contour = contour_projections(s.bs, sg);
                          const double diff = (oracle.pi_plus - contour.pi_plus).norm();
                          worst = std::max(worst, diff);
                          ok = ok && diff <= 1e-6;
                          ok = ok && contour.idempotency <= 1e-8 &&
                               contour.completeness <= 1e-8 && contour.commutator <= 1e-8;
                          for (Index i = 0; i < sg.eig.dim(); ++i)
                              ok = ok && ((sg.eig.values(i).real() >= 0.0) == sg.plus(i));
                      }
                  }
                  detail = "max contour-vs-oracle " + format_double(worst);
                  return ok;
              });

    criterion(9, "LAP: error <= |t z| ||u||, slope 1 +- 0.1, resolvent residual <= 1e-6, fourier <= 1e-3",
              [&](std::string& detail) {
                  bool ok = true;
                  double worst_ratio = 0.0;
                  const std::vector<double> eps = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
                  const std::vector<double> times = {-3.0, -2.0, -1.0, -0.5,
                                                     0.5,  1.0,  2.0,  3.0, 5.0};
                  for (const auto& p : presets) {
                      const Setup s = make_setup(p);
                      const ComplexVector u = random_complex_vector(2 * s.bs.n, 9);
                      const auto table =
                          lap_sweep(s.bs, s.split, eps, times, u, /*throw=*/false);
                      worst_ratio = std::max(worst_ratio, table.max_ratio);
                      ok = ok && table.bound_ok && table.slopes_ok;
                  }
                  const TimeGrid grid = TimeGrid::make(6.0);
                  {
                      const Setup m1 = make_setup("M1");
                      const TestFunction f{random_complex_vector(8, 10),
                                           TimeProfile{ProfileKind::Bump, 0.0, 1.0}};
                      ok = ok &&
                           resolvent_residual(m1.bs, Complex(0.0, -0.05), f, grid) <= 1e-6;
                      // the M1 modes at z = -0.2i sit inside the near-axis
                      // guard band; -0.4i keeps all of Im spec(B_z) clear
                      const auto sg = make_shifted(m1.bs, Complex(0.0, -0.4));
                      ok = ok && fourier_oracle_error(m1.bs, sg, {0.5, 1.0, 2.0, -1.0}) <= 1e-3;
                  }
                  {
                      const Setup m0 = make_setup("M0");
                      const TestFunction f{ComplexVector::Ones(1),
                                           TimeProfile{ProfileKind::Bump, 0.0, 1.0}};
                      ok = ok && resolvent_residual(m0.bs, Complex(0.0, 0.0), f, grid) <= 1e-6;
                      const auto sg = make_shifted(m0.bs, Complex(0.0, -0.2));
                      ok = ok && fourier_oracle_error(m0.bs, sg, {1.0}) <= 1e-3;
                  }
                  detail = "max LAP ratio " + format_double(worst_ratio);
                  return ok;
              });

    criterion(10, "wick: contraction, Riemannian decay e^{-|t|}, slope 1, anti-group witness",
              [&](std::string& detail) {
                  bool ok = true;
                  const std::vector<double> times = {-5.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 5.0};
                  const Setup m1 = make_setup("M1");
                  double antigroup = 0.0;
                  for (double theta : {0.0, 0.1, 0.25 * pi, 0.5 * pi, pi}) {
                      const auto r = contraction_check(m1.bs, m1.split, theta, times);
                      ok = ok && r.max_allowed_norm <= 1.0 + 1e-12;
                      if (theta == 0.25 * pi) antigroup = r.antigroup_norm;
                  }
                  ok = ok && antigroup > 1.0;
                  const auto kr = feynman_kernel_theta(m1.bs, m1.split, 0.5 * pi);
                  for (double t : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0})
                      ok = ok &&
                           std::abs(m1.bs.en_op_norm(kr(t)) - std::exp(-std::abs(t))) <= 1e-8;
                  for (const auto& p : presets) {
                      const Setup s = make_setup(p);
                      const ComplexVector u = random_complex_vector(2 * s.bs.n, 12);
                      const auto table = wick_sweep(s.bs, s.split, {1e-1, 1e-2, 1e-3},
                                                    {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}, u);
                      ok = ok && table.slopes_ok;
                  }
                  detail = "anti-group norm at theta = pi/4, t = -1: " + format_double(antigroup);
                  return ok;
              });

    criterion(11, "discretization sanity: refinement slope 2 +- 0.2 for the lowest nonconstant mode",
              [&](std::string& detail) {
                  const double continuum = 1.0 + std::pow(2.0 * pi / 8.0, 2);
                  std::vector<double> hs, errs;
                  for (int n : {8, 16, 32}) {
                      SpatialModel m = preset_model("M1");
                      m.n = n;
                      m.dx = 8.0 / n;
                      m = build_model(m);
                      const auto op = assemble_L(m);
                      const auto vals =
                          sorted_real(hermitian_eig_weighted(op.matrix, op.space).values);
                      hs.push_back(m.dx);
                      errs.push_back(std::abs(vals[1] - continuum));
                  }
                  const double slope = detail::loglog_slope(hs, errs);
                  detail = "slope " + format_double(slope);
                  return std::abs(slope - 2.0) <= 0.2;
              });

    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all 11 criteria passed\n");
    return 0;
}
