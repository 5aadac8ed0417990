// io.hpp — binary superoperator dumps and deterministic CSV output.

#pragma once

#include "lskin/fock.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace lskin {

static_assert(std::endian::native == std::endian::little,
              "superoperator dumps are defined little-endian; big-endian hosts are unsupported");

// Dump layout (all little-endian):
//   bytes 0..7   magic "LSKSOP01"
//   u32          d, the sector dimension (matrix is d^2 x d^2)
//   u32          vectorization tag; 1 = column-stacking
//   then         d^2 * d^2 complex128 entries, row-major, (re, im) doubles
inline constexpr char kSuperopMagic[8] = {'L', 'S', 'K', 'S', 'O', 'P', '0', '1'};
inline constexpr std::uint32_t kColumnStackingTag = 1;

inline void write_superoperator(const std::string& path, const Matrix& superop, std::uint32_t d) {
    if (superop.rows() != superop.cols() ||
        superop.rows() != static_cast<Eigen::Index>(d) * static_cast<Eigen::Index>(d)) {
        throw std::invalid_argument("write_superoperator: matrix is not d^2 x d^2");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_superoperator: cannot open " + path);
    out.write(kSuperopMagic, sizeof(kSuperopMagic));
    out.write(reinterpret_cast<const char*>(&d), sizeof(d));
    out.write(reinterpret_cast<const char*>(&kColumnStackingTag), sizeof(kColumnStackingTag));
    for (Eigen::Index i = 0; i < superop.rows(); ++i) {
        for (Eigen::Index j = 0; j < superop.cols(); ++j) {
            const double re = superop(i, j).real();
            const double im = superop(i, j).imag();
            out.write(reinterpret_cast<const char*>(&re), sizeof(re));
            out.write(reinterpret_cast<const char*>(&im), sizeof(im));
        }
    }
    if (!out) throw std::runtime_error("write_superoperator: write failed for " + path);
}

struct SuperoperatorDump {
    std::uint32_t d{0};
    Matrix matrix;
};

inline SuperoperatorDump read_superoperator(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_superoperator: cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kSuperopMagic, sizeof(magic)) != 0) {
        throw std::runtime_error("read_superoperator: bad magic in " + path);
    }
    std::uint32_t d = 0, tag = 0;
    in.read(reinterpret_cast<char*>(&d), sizeof(d));
    in.read(reinterpret_cast<char*>(&tag), sizeof(tag));
    if (!in || tag != kColumnStackingTag) {
        throw std::runtime_error("read_superoperator: unknown vectorization tag in " + path);
    }
    const Eigen::Index n = static_cast<Eigen::Index>(d) * static_cast<Eigen::Index>(d);
    SuperoperatorDump dump;
    dump.d = d;
    dump.matrix.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            double re = 0.0, im = 0.0;
            in.read(reinterpret_cast<char*>(&re), sizeof(re));
            in.read(reinterpret_cast<char*>(&im), sizeof(im));
            dump.matrix(i, j) = Complex(re, im);
        }
    }
    if (!in) throw std::runtime_error("read_superoperator: truncated file " + path);
    return dump;
}

// Input/target series exchange format: one "step,s,y" row per step, for
// cross-checking against external implementations.
inline void write_series_csv(const std::string& path, const std::vector<double>& inputs,
                             const std::vector<double>& targets) {
    if (inputs.size() != targets.size()) {
        throw std::invalid_argument("write_series_csv: inputs and targets differ in length");
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("write_series_csv: cannot open " + path);
    out << "step,s,y\n";
    char buf[96];
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", k, inputs[k], targets[k]);
        out << buf;
    }
}

struct SeriesData {
    std::vector<double> inputs;
    std::vector<double> targets;
};

inline SeriesData read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_series_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "step,s,y") {
        throw std::runtime_error("read_series_csv: expected header \"step,s,y\" in " + path);
    }
    SeriesData data;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::size_t step = 0;
        double s = 0.0, y = 0.0;
        if (std::sscanf(line.c_str(), "%zu,%lf,%lf", &step, &s, &y) != 3) {
            throw std::runtime_error("read_series_csv: malformed row \"" + line + "\"");
        }
        if (step != data.inputs.size()) {
            throw std::runtime_error("read_series_csv: non-contiguous step index in " + path);
        }
        data.inputs.push_back(s);
        data.targets.push_back(y);
    }
    return data;
}

// CSV writer with replay-stable float formatting (%.17g round-trips doubles).
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::trunc) {
        if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    }

    void comment(const std::string& line) { out_ << "# " << line << "\n"; }

    void header(const std::vector<std::string>& names) { write_row(names); }

    static std::string field(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }
    static std::string field(int v) { return std::to_string(v); }
    static std::string field(std::uint64_t v) { return std::to_string(v); }
    static std::string field(const std::string& v) { return v; }
    static std::string field(const char* v) { return v; }

    template <typename... Fields>
    void row(const Fields&... fields) {
        write_row({field(fields)...});
    }

private:
    void write_row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    std::ofstream out_;
};

}  // namespace lskin
