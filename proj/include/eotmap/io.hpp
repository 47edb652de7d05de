#ifndef EOTMAP_IO_HPP
#define EOTMAP_IO_HPP

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

// Plain delimited text matrices. Numbers are written with 17 significant
// digits so that a read-back is exact and reruns produce identical bytes.

namespace eotmap::io {

struct MatrixFile {
    std::string path;
    char delimiter = ',';
    bool header = false;
};

inline std::string format_number(double v) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(len));
}

inline double parse_number(std::string_view field, const std::string& where) {
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
        field.remove_prefix(1);
    }
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
        field.remove_suffix(1);
    }
    if (!field.empty() && field.front() == '+') {
        field.remove_prefix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        throw InputError(where + ": cannot parse '" + std::string(field) + "' as a number");
    }
    if (!std::isfinite(v)) {
        throw InputError(where + ": non-finite value");
    }
    return v;
}

/// Reads a rectangular matrix of finite reals. Blank lines are skipped.
inline Eigen::MatrixXd read_matrix(const MatrixFile& file) {
    std::ifstream in(file.path);
    if (!in) {
        throw InputError("cannot open " + file.path);
    }
    std::vector<double> values;
    Index cols = -1;
    Index rows = 0;
    std::string line;
    std::size_t line_no = 0;
    bool skip_header = file.header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        if (skip_header) {
            skip_header = false;
            continue;
        }
        const std::string where = file.path + ":" + std::to_string(line_no);
        Index count = 0;
        std::string_view rest(line);
        while (true) {
            const auto pos = rest.find(file.delimiter);
            values.push_back(parse_number(rest.substr(0, pos), where));
            ++count;
            if (pos == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(pos + 1);
        }
        if (cols >= 0 && count != cols) {
            throw InputError(where + ": expected " + std::to_string(cols) + " fields, found " + std::to_string(count));
        }
        cols = count;
        ++rows;
    }
    if (rows == 0) {
        throw InputError(file.path + ": no data rows");
    }
    Eigen::MatrixXd out(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            out(i, j) = values[static_cast<std::size_t>(i * cols + j)];
        }
    }
    return out;
}

inline Eigen::MatrixXd read_matrix(const std::string& path) { return read_matrix(MatrixFile{path}); }

inline std::string to_csv(const Eigen::MatrixXd& M, char delimiter = ',') {
    std::ostringstream out;
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index j = 0; j < M.cols(); ++j) {
            if (j > 0) {
                out << delimiter;
            }
            out << format_number(M(i, j));
        }
        out << '\n';
    }
    return out.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InputError("cannot write " + path);
    }
    out << text;
    if (!out) {
        throw InputError("write failed for " + path);
    }
}

inline void write_matrix(const std::string& path, const Eigen::MatrixXd& M, char delimiter = ',') {
    write_text(path, to_csv(M, delimiter));
}

}  // namespace eotmap::io

#endif  // EOTMAP_IO_HPP
