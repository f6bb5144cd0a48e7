// Experiment orchestration behind the CLI: builds the configured model, runs
// the requested verification suite, emits CSV artifacts and a summary, and
// maps outcomes to the exit-code contract (0 pass, 1 assertion failed,
// 2 configuration or I/O error).
#pragma once

#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "staticprop/absorption.hpp"
#include "staticprop/config.hpp"
#include "staticprop/csv.hpp"
#include "staticprop/wick.hpp"

namespace staticprop {

namespace detail {

struct Workspace {
    RunConfig cfg;
    std::filesystem::path out;
    SpatialModel model;
    std::optional<SpatialOperator> op_storage;
    std::ostringstream summary;
    bool ok = true;

    const SpatialOperator& op() const { return *op_storage; }

    void check(bool pass, const std::string& label) {
        summary << (pass ? "[PASS] " : "[FAIL] ") << label << "\n";
        ok = ok && pass;
    }
    void note(const std::string& line) { summary << line << "\n"; }
    std::string path(const std::string& file) const { return (out / file).string(); }
};

inline std::vector<double> random_times(std::size_t count, double half_range, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-half_range, half_range);
    std::vector<double> ts(count);
    for (auto& t : ts) t = dist(rng);
    return ts;
}

inline ComplexVector random_state(Index dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexVector u(dim);
    for (Index j = 0; j < dim; ++j) u(j) = Complex(gauss(rng), gauss(rng));
    return u;
}

inline TestFunction bump_function(const ComplexVector& amplitude, double center = 0.0,
                                  double width = 1.0) {
    return TestFunction{amplitude, TimeProfile{ProfileKind::Bump, center, width}};
}

// ------------------------------------------------------------------ commands

inline void cmd_check(Workspace& ws) {
    const AssumptionReport r = check_assumptions(ws.model, ws.op());
    CsvWriter csv(ws.path("check.csv"),
                  {"assumption", "pass", "witness"});
    auto row = [&](const char* name, bool pass, double witness) {
        csv.write_row({name, pass ? "1" : "0", format_double(witness)});
    };
    row("beta_bounds", r.beta_bounds, r.beta_constant);
    row("y_nonnegative", r.y_nonnegative, r.y_min);
    row("l_hermitian", r.l_hermitian, r.l_hermitian_defect);
    row("h_positive", r.h_positive, r.min_eig_l_minus_v2);
    row("strong_h_positive", r.strong_h_positive, r.h_lower_bound);
    row("dissipativity", r.dissipativity_ok, r.min_eig_l_minus_2v2);
    ws.check(r.beta_bounds, "beta bounded away from 0 and infinity, C = " +
                                format_double(r.beta_constant));
    ws.check(r.y_nonnegative, "Y >= 0, min = " + format_double(r.y_min));
    ws.check(r.l_hermitian,
             "L Hermitian in the weighted space, defect = " + format_double(r.l_hermitian_defect));
    ws.check(r.h_positive, "L - V^2 > 0, min eig = " + format_double(r.min_eig_l_minus_v2));
    ws.check(r.strong_h_positive, "H bounded away from 0, C = " + format_double(r.h_lower_bound));
    ws.check(r.dissipativity_ok,
             "L - 2V^2 >= 0, min eig = " + format_double(r.min_eig_l_minus_2v2));
}

inline void cmd_spectrum(Workspace& ws) {
    const BlockSystem bs = assemble_blocks(ws.op(), ws.model);
    const SpectralSplit split = spectral_split(bs);
    {
        const EigenData led = hermitian_eig_weighted(bs.l, WeightedSpace(bs.spatial_weight));
        CsvWriter csv(ws.path("spectrum_L.csv"), {"index", "value"});
        for (Index i = 0; i < led.dim(); ++i)
            csv.write_row({std::to_string(i), format_double(led.values(i).real())});
    }
    {
        CsvWriter csv(ws.path("spectrum_B.csv"), {"index", "value"});
        for (Index i = 0; i < split.eig.dim(); ++i)
            csv.write_row({std::to_string(i), format_double(split.eig.values(i).real())});
    }
    ws.note("rank Pi+ = " + std::to_string(split.rank_plus()) +
            ", rank Pi- = " + std::to_string(split.rank_minus()));
    ws.note("min |eig B| = " + format_double(split.min_abs_eig));
    ws.note("energy norm of Q (finite-dimensional diagnostic only) = " +
            format_double(bs.q_energy_norm()));
    ws.check(split.min_abs_eig > 0.0, "0 not in spec(B)");
}

inline void cmd_kernels(Workspace& ws) {
    const BlockSystem bs = assemble_blocks(ws.op(), ws.model);
    const SpectralSplit split = spectral_split(bs);
    const TimeGrid grid = TimeGrid::make(ws.cfg.half_width, ws.cfg.s, ws.cfg.nodes_per_unit);
    for (PropagatorKind kind : all_kinds()) {
        const PropagatorKernel k = make_kernel(kind, bs, split);
        CsvWriter csv(ws.path(std::string("kernel_") + kind_tag(kind) + ".csv"),
                      {"t", "row", "col", "re", "im"});
        for (double t : grid.boundaries) {
            const ComplexMatrix e = k(t);
            for (Index r = 0; r < e.rows(); ++r)
                for (Index c = 0; c < e.cols(); ++c)
                    csv.write_row({format_double(t), std::to_string(r), std::to_string(c),
                                   format_double(e(r, c).real()), format_double(e(r, c).imag())});
        }
    }
    ws.note("kernel CSVs written for " + std::to_string(all_kinds().size()) + " kinds");
}

inline void cmd_identities(Workspace& ws) {
    const BlockSystem bs = assemble_blocks(ws.op(), ws.model);
    const SpectralSplit split = spectral_split(bs);
    const auto times = random_times(32, 10.0, 0x1de27u);
    const IdentityReport rep = identity_suite(bs, split, times);
    CsvWriter csv(ws.path("identities.csv"), {"identity", "residual", "tolerance", "pass"});
    for (const auto& c : rep.checks)
        csv.write_row({c.name, format_double(c.residual), format_double(c.tolerance),
                       c.pass() ? "1" : "0"});
    ws.note("sign calibration sigma = +" + std::to_string(rep.sigma) +
            " (pinned by K G_ret f = f on the single mode)");
    ws.check(rep.pass(), "identity web, max residual = " + format_double(rep.max_residual));

    // inverse / bisolution residual contracts with a bump test function
    const TimeGrid grid = TimeGrid::make(ws.cfg.half_width, ws.cfg.s, ws.cfg.nodes_per_unit);
    CsvWriter rcsv(ws.path("residuals.csv"), {"kind", "level", "residual"});
    const ComplexVector amp2 = random_state(2 * bs.n, 0xa11ceu);
    const ComplexVector amp1 = random_state(bs.n, 0xb0bu);
    bool all_ok = true;
    for (PropagatorKind kind : all_kinds()) {
        const PropagatorKernel k = make_kernel(kind, bs, split);
        const double re = inverse_residual_E(k, bs, bump_function(amp2), grid);
        const ScalarPropagator g = scalar_reduce(k, bs);
        const double rg = inverse_residual_G(g, bs, bump_function(amp1), grid);
        rcsv.write_row({kind_tag(kind), "E", format_double(re)});
        rcsv.write_row({kind_tag(kind), "G", format_double(rg)});
        all_ok = all_ok && re <= ws.cfg.tol_quad && rg <= ws.cfg.tol_quad;
    }
    ws.check(all_ok, "inverse/bisolution residual contracts <= " + format_double(ws.cfg.tol_quad));

    // frequency positivity on random bumps
    double worst = 0.0;
    bool real_ok = true;
    for (unsigned seed = 1; seed <= 5; ++seed) {
        const TestFunction f = bump_function(random_state(bs.n, seed), 0.0, 1.5);
        for (PropagatorKind kind :
             {PropagatorKind::PositiveFrequency, PropagatorKind::NegativeFrequency}) {
            const ScalarPropagator g = scalar_reduce(make_kernel(kind, bs, split), bs);
            const Complex val = frequency_positivity(g, bs, f, grid);
            worst = std::min(worst, val.real());
            real_ok = real_ok && std::abs(val.imag()) <= 1e-8;
        }
    }
    ws.check(worst >= -1e-8 && real_ok,
             "(f | G^(pm) f) real and >= 0, min value = " + format_double(worst));

    const ChargePositivityReport cp = charge_positivity(bs, split);
    ws.check(cp.ok, "charge positivity of Q Pi^(pm), min eigs " +
                        format_double(cp.min_eig_plus) + " / " + format_double(cp.min_eig_minus));
}

inline void cmd_lap(Workspace& ws) {
    const BlockSystem bs = assemble_blocks(ws.op(), ws.model);
    const SpectralSplit split = spectral_split(bs);
    const ComplexVector u = random_state(2 * bs.n, 0x1a9u);

    LapTable table = lap_sweep(bs, split, ws.cfg.epsilons, ws.cfg.lap_times, u,
                               /*throw_on_violation=*/false);
    {
        CsvWriter csv(ws.path("lap.csv"), {"epsilon", "t", "error", "bound", "ratio"});
        for (const auto& row : table.rows)
            csv.write_row({format_double(row.epsilon), format_double(row.t),
                           format_double(row.error), format_double(row.bound),
                           format_double(row.ratio)});
    }
    ws.note("branch convention: z = +i eps kernels use the right-half-plane "
            "group forward in time (fixed by the error bound)");
    ws.check(table.bound_ok,
             "LAP bound |t z| ||u||, max ratio = " + format_double(table.max_ratio));
    ws.check(table.slopes_ok, "LAP log-log slope 1 +- 0.1 at every sampled t");

    // bisectorial projection diagnostics, contour vs oracle
    CsvWriter pcsv(ws.path("projections.csv"),
                   {"z", "method", "idempotency", "completeness", "commutator"});
    bool proj_ok = true;
    for (const Complex z : {Complex(0.0, 0.0), Complex(0.0, 0.1), Complex(0.0, 1.0),
                            Complex(0.0, -0.1)}) {
        const ShiftedGenerator sg = make_shifted(bs, z);
        const BisectorialSplit oracle = oracle_projections(sg);
        const BisectorialSplit contour = contour_projections(bs, sg);
        for (const auto* s : {&oracle, &contour})
            pcsv.write_row({format_complex(z), s->method, format_double(s->idempotency),
                            format_double(s->completeness), format_double(s->commutator)});
        const double diff = (oracle.pi_plus - contour.pi_plus).norm();
        proj_ok = proj_ok && diff <= 1e-6 && contour.idempotency <= 1e-8 &&
                  contour.completeness <= 1e-8 && contour.commutator <= 1e-8;
    }
    ws.check(proj_ok, "contour projections match the eigen-oracle <= 1e-6");

    const DissipativityReport dr = dissipativity_check(bs);
    ws.check(dr.ok, "dissipativity: display matrix min eig = " +
                        format_double(dr.min_eig_display) + ", worst Im = " +
                        format_double(std::max(dr.worst_im_plus, dr.worst_im_minus)));

    // the slowest-decaying mode of B_z has Im ~ |z| / (2 max|eig B|); keep it
    // outside the near-axis guard band of the Fourier synthesis
    const double zi = std::max(0.4, 0.16 * split.eig.max_abs());
    const ShiftedGenerator sg = make_shifted(bs, Complex(0.0, -zi));
    const double four = fourier_oracle_error(bs, sg, {0.5, 1.0, 2.0, -1.0});
    ws.check(four <= 1e-3, "fourier oracle agreement = " + format_double(four));

    const TimeGrid grid = TimeGrid::make(ws.cfg.half_width, ws.cfg.s, ws.cfg.nodes_per_unit);
    const TestFunction f = bump_function(random_state(bs.n, 0xfeedu));
    bool res_ok = true;
    for (const Complex z : {Complex(0.0, -0.05), Complex(0.0, 0.0)}) {
        const double r = resolvent_residual(bs, z, f, grid);
        res_ok = res_ok && r <= ws.cfg.tol_quad;
    }
    ws.check(res_ok, "(Ktilde - z) Gtilde_z^F f = f within quadrature tolerance");
}

inline void cmd_wick(Workspace& ws) {
    const BlockSystem bs = assemble_blocks(ws.op(), ws.model);
    const SpectralSplit split = spectral_split(bs);
    const std::vector<double> check_angles = {0.0, 0.1, 0.25 * pi, 0.5 * pi, pi};
    bool contraction_ok = true;
    double antigroup = 0.0;
    for (double theta : check_angles) {
        const WickContractionReport r = contraction_check(bs, split, theta, ws.cfg.wick_times);
        contraction_ok = contraction_ok && r.contraction_ok;
        if (theta == 0.25 * pi) antigroup = r.antigroup_norm;
    }
    ws.check(contraction_ok, "rotated semigroups contractive on the correct half-lines");
    ws.check(antigroup > 1.0, "anti-group obstruction witnessed: ||e^{+i B_theta} Pi+||_en = " +
                                  format_double(antigroup) + " at theta = pi/4");

    const ComplexVector u = random_state(2 * bs.n, 0x71c5u);
    const WickTable table = wick_sweep(bs, split, ws.cfg.thetas, ws.cfg.wick_times, u);
    CsvWriter csv(ws.path("wick.csv"), {"theta", "t", "error", "fittedK", "slope"});
    for (std::size_t i = 0; i < ws.cfg.thetas.size(); ++i)
        for (std::size_t j = 0; j < table.times.size(); ++j) {
            const auto& row = table.rows[i * table.times.size() + j];
            csv.write_row({format_double(row.theta), format_double(row.t),
                           format_double(row.error), format_double(row.fitted_k),
                           format_double(table.slopes[j])});
        }
    ws.check(table.slopes_ok, "wick log-log slope 1 +- 0.1 at every sampled t");
    ws.note("fitted K (error / |t| theta ||B||) max = " + format_double(table.max_fitted_k) +
            "; the constant is fitted, only the slope is asserted");
}

}  // namespace detail

inline int run(const std::string& command, const RunConfig& cfg, std::ostream& log) {
    detail::Workspace ws;
    ws.cfg = cfg;
    try {
        ws.out = cfg.out_dir;
        std::filesystem::create_directories(ws.out);
        ws.model = model_from_config(cfg);
        ws.op_storage.emplace(assemble_L(ws.model));
    } catch (const std::exception& e) {
        log << "configuration error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (command == "check") {
            detail::cmd_check(ws);
        } else if (command == "spectrum") {
            detail::cmd_spectrum(ws);
        } else if (command == "kernels") {
            detail::cmd_kernels(ws);
        } else if (command == "identities") {
            detail::cmd_identities(ws);
        } else if (command == "lap") {
            detail::cmd_lap(ws);
        } else if (command == "wick") {
            detail::cmd_wick(ws);
        } else if (command == "report") {
            detail::cmd_check(ws);
            detail::cmd_spectrum(ws);
            detail::cmd_kernels(ws);
            detail::cmd_identities(ws);
            detail::cmd_lap(ws);
            detail::cmd_wick(ws);
        } else {
            log << "unknown command '" << command << "'\n";
            return 2;
        }
    } catch (const parse_error& e) {
        log << "error: " << e.what() << "\n";
        return 2;
    } catch (const validation_error& e) {
        log << "error: " << e.what() << "\n";
        return 2;
    } catch (const error& e) {
        // numerical contract violations surface as assertion failures
        ws.summary << "[FAIL] " << e.what() << "\n";
        ws.ok = false;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 2;
    }

    const std::string text = ws.summary.str();
    log << text;
    try {
        std::ofstream sfile(ws.path("summary.txt"));
        sfile << "command: " << command << "\nmodel: " << cfg.model << "\n" << text;
    } catch (...) {
        return 2;
    }
    return ws.ok ? 0 : 1;
}

inline int run(const std::string& command, const std::string& config_text, std::ostream& log) {
    try {
        return run(command, parse_config(config_text), log);
    } catch (const std::exception& e) {
        log << "configuration error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace staticprop
