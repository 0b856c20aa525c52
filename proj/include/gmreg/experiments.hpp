#pragma once

#include "gmreg/geomfix.hpp"
#include "gmreg/lcurve.hpp"
#include "gmreg/problem.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gmreg {

// Noise-to-zero convergence study: for each scale s, draw noise rescaled to
// exactly delta = s * ||F x_true||, set eps = delta, solve by the closed
// form, and record the relative error with its decomposition.  A zero scale
// is handled as eps = 1e-14 (exact data).
struct ConvergenceRow {
    double delta = 0.0;
    double eps = 0.0;
    double relative_error = 0.0;
    ErrorDecomposition decomposition;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    double spearman = 0.0;    // rank correlation of (delta, relative_error)
    bool factor10_ok = false; // last error <= first error / 10
};

std::vector<double> default_delta_scales();  // 1e-1 ... 1e-6

ConvergenceTable run_convergence_study(const Matrix& F, const Vector& x_true,
                                       const std::vector<double>& delta_scales,
                                       std::uint64_t seed);

// Spearman rank correlation (Pearson on midranks).
double spearman(const std::vector<double>& a, const std::vector<double>& b);

// Full synthetic benchmark: simulate, sweep L-curves for Tikhonov and the
// fixed-point method, solve at both corners, record relative-error-vs-
// parameter curves, verification reports, and a convergence table; writes
// CSV/SVG artifacts plus report.json under out_dir and returns the report
// as a JSON string.  Deterministic for a fixed config.
std::string run_benchmark(const SimulationConfig& cfg,
                          const std::string& out_dir, double decades,
                          Index points);

// Structural check of a benchmark report: returns human-readable problems,
// empty when the report has every required field with sane values.
std::vector<std::string> validate_benchmark_report(const std::string& json_text);

}  // namespace gmreg
