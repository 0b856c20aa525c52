#pragma once

#include "gmreg/linalg.hpp"

#include <string>

namespace gmreg {

// Plain CSV: one row per line, comma-separated decimal fields, no header.
// Vectors are single-column files.  Readers reject NaN/Inf and ragged
// rows; writers emit round-trippable precision (17 significant digits).

Matrix read_matrix_csv(const std::string& path);
Vector read_vector_csv(const std::string& path);

void write_matrix_csv(const std::string& path, const Matrix& a);
void write_vector_csv(const std::string& path, const Vector& v);

}  // namespace gmreg
