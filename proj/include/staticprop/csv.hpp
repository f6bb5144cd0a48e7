// CSV emission with reproducible float formatting: shortest round-trip
// representation, at most 17 significant digits, identical across runs.
#pragma once

#include <charconv>
#include <fstream>
#include <string>
#include <vector>

#include "staticprop/errors.hpp"
#include "staticprop/numerics.hpp"

namespace staticprop {

inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline std::string format_complex(Complex z) {
    std::string s = format_double(z.real());
    s += (z.imag() < 0.0 || std::signbit(z.imag())) ? "-" : "+";
    s += format_double(std::abs(z.imag()));
    s += "i";
    return s;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) {
        out_.open(path);
        if (!out_) throw error("cannot open output file: " + path);
        write_row(header);
    }

    void write_row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

}  // namespace staticprop
