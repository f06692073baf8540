#include "stls/csv_io.hpp"

#include "stls/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace stls::io {

namespace {

double parse_double(const std::string& text) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ContractError("csv: cannot parse number '" + text + "'");
    }
    while (used < text.size() && (text[used] == ' ' || text[used] == '\r')) ++used;
    if (used != text.size()) throw ContractError("csv: trailing characters in '" + text + "'");
    return value;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ContractError("cannot open '" + path + "' for writing");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractError("cannot open '" + path + "' for reading");
    return in;
}

} // namespace

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

void write_matrix(std::ostream& out, const Matrix& M) {
    out << M.rows() << ',' << M.cols() << '\n';
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (j) out << ',';
            out << format_double(M(i, j));
        }
        out << '\n';
    }
}

void write_matrix(const std::string& path, const Matrix& M) {
    auto out = open_out(path);
    write_matrix(out, M);
}

Matrix read_matrix(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ContractError("csv: missing 'rows,cols' header");
    const auto header = split(line, ',');
    if (header.size() != 2) throw ContractError("csv: header must be 'rows,cols'");
    const auto rows = static_cast<Eigen::Index>(parse_double(header[0]));
    const auto cols = static_cast<Eigen::Index>(parse_double(header[1]));
    if (rows < 1 || cols < 1) throw ContractError("csv: dimensions must be positive");

    Matrix M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) throw ContractError("csv: fewer data rows than declared");
        const auto fields = split(line, ',');
        if (static_cast<Eigen::Index>(fields.size()) != cols) {
            throw ContractError("csv: row " + std::to_string(i) + " has the wrong number of fields");
        }
        for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = parse_double(fields[static_cast<std::size_t>(j)]);
    }
    return M;
}

Matrix read_matrix(const std::string& path) {
    auto in = open_in(path);
    return read_matrix(in);
}

void write_permutation(std::ostream& out, const Permutation& pi) {
    for (auto v : pi.map()) out << v << '\n';
}

void write_permutation(const std::string& path, const Permutation& pi) {
    auto out = open_out(path);
    write_permutation(out, pi);
}

Permutation read_permutation(std::istream& in) {
    std::vector<std::size_t> map;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t value = 0;
        const auto res = std::from_chars(line.data(), line.data() + line.size(), value);
        if (res.ec != std::errc{} || res.ptr != line.data() + line.size()) {
            throw ContractError("permutation file: bad index '" + line + "'");
        }
        map.push_back(value);
    }
    return Permutation(std::move(map));
}

Permutation read_permutation(const std::string& path) {
    auto in = open_in(path);
    return read_permutation(in);
}

} // namespace stls::io
