#include "gmreg/csv.hpp"

#include "gmreg/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace gmreg {
namespace {

std::vector<std::vector<double>> read_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            // from_chars instead of stod: stod throws out_of_range on
            // subnormals, which legitimately occur in wide-kernel tails
            std::size_t b = 0, e = field.size();
            while (b < e && (field[b] == ' ' || field[b] == '\t')) ++b;
            while (e > b && (field[e - 1] == ' ' || field[e - 1] == '\t')) --e;
            double v = 0;
            const char* first = field.data() + b;
            const char* last = field.data() + e;
            if (first != last && *first == '+') ++first;
            auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc{} || ptr != last)
                throw IoError(path + ":" + std::to_string(lineno) +
                              ": unparseable field '" + field + "'");
            if (!std::isfinite(v))
                throw IoError(path + ":" + std::to_string(lineno) +
                              ": non-finite value rejected");
            row.push_back(v);
        }
        if (row.empty())
            throw IoError(path + ":" + std::to_string(lineno) + ": empty row");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError(path + ": no data rows");
    for (const auto& r : rows)
        if (r.size() != rows[0].size())
            throw IoError(path + ": ragged rows (" +
                          std::to_string(rows[0].size()) + " vs " +
                          std::to_string(r.size()) + " fields)");
    return rows;
}

void write_rows(const std::string& path, const Matrix& a) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out.precision(17);
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            if (j) out << ',';
            out << a(i, j);
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed on " + path);
}

}  // namespace

Matrix read_matrix_csv(const std::string& path) {
    auto rows = read_rows(path);
    Matrix a(static_cast<Index>(rows.size()),
             static_cast<Index>(rows[0].size()));
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return a;
}

Vector read_vector_csv(const std::string& path) {
    Matrix a = read_matrix_csv(path);
    if (a.cols() != 1)
        throw IoError(path + ": expected a single column, found " +
                      std::to_string(a.cols()));
    return a.col(0);
}

void write_matrix_csv(const std::string& path, const Matrix& a) {
    require_finite(a, "matrix for " + path);
    write_rows(path, a);
}

void write_vector_csv(const std::string& path, const Vector& v) {
    require_finite(v, "vector for " + path);
    write_rows(path, v);
}

}  // namespace gmreg
