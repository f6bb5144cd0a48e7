// staticprop <command> --config <path> [--out <dir>]
//
// Commands: check, spectrum, kernels, identities, lap, wick, report.
// Exit codes: 0 all assertions pass, 1 an assertion or bound failed,
// 2 configuration or I/O error.
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "staticprop/staticprop.hpp"

int main(int argc, char** argv) {
    CLI::App app{"static Klein-Gordon propagator toolkit"};
    std::string command, config_path, out_dir;
    app.add_option("command", command, "check|spectrum|kernels|identities|lap|wick|report")
        ->required();
    app.add_option("--config", config_path, "path to a key = value config file")->required();
    app.add_option("--out", out_dir, "output directory (overrides the config's 'out')");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "cannot read config file: " << config_path << "\n";
        return 2;
    }
    std::ostringstream text;
    text << in.rdbuf();

    staticprop::RunConfig cfg;
    try {
        cfg = staticprop::parse_config(text.str());
    } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    return staticprop::run(command, cfg, std::cout);
}
