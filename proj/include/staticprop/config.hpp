// Flat key = value experiment configuration: one assignment per line,
// '#' comments, comma-separated arrays. Unknown keys are rejected so typos
// cannot silently fall back to defaults.
#pragma once

#include <charconv>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "staticprop/errors.hpp"
#include "staticprop/model.hpp"

namespace staticprop {

struct RunConfig {
    std::string model = "M1";
    // optional field overrides applied on top of the preset (or, with
    // model = custom, defining the lattice outright)
    std::map<std::string, std::vector<double>> field_overrides;  // beta,gSigma,A,Y,V
    Index n_override = -1;
    double dx_override = -1.0;
    std::string boundary;  // "periodic" | "dirichlet" | empty = preset default

    double half_width = 8.0;  // T
    double s = 1.0;
    int nodes_per_unit = 16;
    std::vector<double> epsilons = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    std::vector<double> thetas = {1e-1, 1e-2, 1e-3};
    std::vector<double> lap_times = {-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0, 5.0};
    std::vector<double> wick_times = {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
    double tol_quad = 1e-6;
    std::string out_dir = "out";
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_number(const std::string& text, int line_no) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0')
        throw parse_error("line " + std::to_string(line_no) + ": cannot parse number '" + t + "'");
    return v;
}

inline std::vector<double> parse_list(const std::string& text, int line_no) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(item, line_no));
    if (out.empty())
        throw parse_error("line " + std::to_string(line_no) + ": empty list");
    return out;
}

inline void require_descending_positive(const std::vector<double>& v, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0))
            throw validation_error(std::string(what) + " must be strictly positive");
        if (i > 0 && !(v[i] < v[i - 1]))
            throw validation_error(std::string(what) + " must be strictly descending");
    }
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
    static const std::set<std::string> known = {
        "model", "n",   "dx",       "boundary", "beta",     "gSigma",   "A",
        "Y",     "V",   "T",        "s",        "nodesPerUnit", "epsilons", "thetas",
        "lapTimes", "wickTimes", "tolQuad", "out"};
    RunConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw parse_error("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (!known.count(key))
            throw parse_error("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        if (key == "model") {
            cfg.model = value;
        } else if (key == "n") {
            cfg.n_override = static_cast<Index>(detail::parse_number(value, line_no));
        } else if (key == "dx") {
            cfg.dx_override = detail::parse_number(value, line_no);
        } else if (key == "boundary") {
            if (value != "periodic" && value != "dirichlet")
                throw validation_error("boundary must be 'periodic' or 'dirichlet'");
            cfg.boundary = value;
        } else if (key == "beta" || key == "gSigma" || key == "A" || key == "Y" || key == "V") {
            cfg.field_overrides[key] = detail::parse_list(value, line_no);
        } else if (key == "T") {
            cfg.half_width = detail::parse_number(value, line_no);
        } else if (key == "s") {
            cfg.s = detail::parse_number(value, line_no);
        } else if (key == "nodesPerUnit") {
            cfg.nodes_per_unit = static_cast<int>(detail::parse_number(value, line_no));
        } else if (key == "epsilons") {
            cfg.epsilons = detail::parse_list(value, line_no);
        } else if (key == "thetas") {
            cfg.thetas = detail::parse_list(value, line_no);
        } else if (key == "lapTimes") {
            cfg.lap_times = detail::parse_list(value, line_no);
        } else if (key == "wickTimes") {
            cfg.wick_times = detail::parse_list(value, line_no);
        } else if (key == "tolQuad") {
            cfg.tol_quad = detail::parse_number(value, line_no);
        } else if (key == "out") {
            cfg.out_dir = value;
        }
    }
    // invariants
    if (!(cfg.s > 0.5)) throw validation_error("s must exceed 1/2");
    if (!(cfg.half_width > 0.0)) throw validation_error("T must be positive");
    if (cfg.nodes_per_unit < 2) throw validation_error("nodesPerUnit must be at least 2");
    if (!(cfg.tol_quad > 0.0)) throw validation_error("tolQuad must be positive");
    detail::require_descending_positive(cfg.epsilons, "epsilons");
    detail::require_descending_positive(cfg.thetas, "thetas");
    for (double th : cfg.thetas)
        if (!(th <= 0.5 * pi)) throw validation_error("thetas must lie in (0, pi/2]");
    return cfg;
}

// Materializes the lattice model a config describes: preset plus overrides,
// or a fully custom model.
inline SpatialModel model_from_config(const RunConfig& cfg) {
    SpatialModel m;
    if (cfg.model == "custom") {
        if (cfg.n_override < 1)
            throw validation_error("custom model requires n");
        m.n = cfg.n_override;
        m.dx = cfg.dx_override > 0.0 ? cfg.dx_override : 1.0;
        m.beta = RealVector::Constant(1, 1.0);
        m.g_sigma = RealVector::Constant(1, 1.0);
        m.a = RealVector::Constant(1, 0.0);
        m.y = RealVector::Constant(1, 0.0);
        m.v = RealVector::Constant(1, 0.0);
    } else {
        m = preset_model(cfg.model);
        if (cfg.n_override > 0) m.n = cfg.n_override;
        if (cfg.dx_override > 0.0) m.dx = cfg.dx_override;
    }
    if (!cfg.boundary.empty())
        m.boundary = cfg.boundary == "dirichlet" ? Boundary::Dirichlet : Boundary::Periodic;
    auto apply = [&](const char* key, RealVector& field) {
        const auto it = cfg.field_overrides.find(key);
        if (it == cfg.field_overrides.end()) return;
        field = Eigen::Map<const RealVector>(it->second.data(),
                                             static_cast<Index>(it->second.size()));
    };
    apply("beta", m.beta);
    apply("gSigma", m.g_sigma);
    apply("A", m.a);
    apply("Y", m.y);
    apply("V", m.v);
    return build_model(std::move(m));
}

}  // namespace staticprop
