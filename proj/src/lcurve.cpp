#include "gmreg/lcurve.hpp"

#include "gmreg/csv.hpp"
#include "gmreg/errors.hpp"
#include "gmreg/geomfix.hpp"
#include "gmreg/regularizers.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace gmreg {

using nlohmann::json;

SweepMethod sweep_method_from_name(const std::string& name) {
    if (name == "tikhonov") return SweepMethod::tikhonov;
    if (name == "geom" || name == "geom_fixed_point") return SweepMethod::geom;
    throw DomainError("unknown sweep method '" + name + "'");
}

std::string sweep_method_name(SweepMethod m) {
    return m == SweepMethod::tikhonov ? "tikhonov" : "geom";
}

namespace {

// Corner of (log10 r, log10 s): the interior point with the sharpest convex
// turn between consecutive chords.  Guards against the two discrete
// pathologies: near-coincident points (rounding zigzag on flat stretches gets
// arbitrarily sharp) are collapsed first, and the turn angle is used instead
// of Menger curvature because curvature through unevenly spaced points scales
// like 1/segment, drowning a genuine long-armed corner in short wiggles.
// Convexity (cross > 0 walking toward larger parameters) rejects the mirror
// bend at the top of a norm cliff.  Endpoints excluded, ties toward the
// larger parameter, zero norms floored relative to the curve's own scale.
Index corner_impl(const Vector& residuals, const Vector& solutions,
                  std::vector<std::string>* warnings) {
    const Index n = residuals.size();
    const double rfloor = std::max(residuals.maxCoeff() * 1e-16, 1e-300);
    const double sfloor = std::max(solutions.maxCoeff() * 1e-16, 1e-300);
    Vector lr(n), ls(n);
    for (Index i = 0; i < n; ++i) {
        lr(i) = std::log10(std::max(residuals(i), rfloor));
        ls(i) = std::log10(std::max(solutions(i), sfloor));
    }

    // Collapse runs closer than a milli-decade; each run is represented by
    // its last member so ties keep leaning toward the larger parameter.
    std::vector<Index> keep{0};
    for (Index i = 1; i < n; ++i) {
        const Index j = keep.back();
        if (std::hypot(lr(i) - lr(j), ls(i) - ls(j)) < 1e-3)
            keep.back() = i;
        else
            keep.push_back(i);
    }

    double best = -1.0;
    Index best_i = -1;
    double fallback_best = -1.0;
    Index fallback_i = n - 2;
    for (std::size_t a = 1; a + 1 < keep.size(); ++a) {
        const Index i0 = keep[a - 1], i1 = keep[a], i2 = keep[a + 1];
        const double ax = lr(i1) - lr(i0), ay = ls(i1) - ls(i0);
        const double bx = lr(i2) - lr(i1), by = ls(i2) - ls(i1);
        const double cross = ax * by - ay * bx;
        const double turn = std::atan2(std::abs(cross), ax * bx + ay * by);
        if (turn >= fallback_best) {  // >= pushes ties toward larger parameter
            fallback_best = turn;
            fallback_i = i1;
        }
        if (cross <= 0) continue;
        if (turn >= best) {
            best = turn;
            best_i = i1;
        }
    }
    if (best_i < 0) {  // no convex bend at all: take the sharpest turn of any sign
        best = fallback_best;
        best_i = fallback_i;
    }
    if (best < 1e-6 && warnings)
        warnings->push_back("no discernible corner: sharpest turn " +
                            std::to_string(best) + " rad");
    return best_i;
}

void check_curve(const LCurve& c) {
    const Index n = c.params.size();
    if (c.residual_norms.size() != n || c.solution_norms.size() != n)
        throw DomainError("lcurve: column lengths disagree");
    if (n < 3) throw DomainError("lcurve: need at least 3 points");
    for (Index i = 1; i < n; ++i)
        if (!(c.params(i) > c.params(i - 1)))
            throw DomainError("lcurve: params not strictly increasing");
}

}  // namespace

LCurve lcurve_generate(const SingularSystem& S, const Vector& y,
                       SweepMethod method, double decades, Index points) {
    if (points < 3) throw DomainError("lcurve_generate: need at least 3 points");
    if (!(decades > 0)) throw DomainError("lcurve_generate: decades must be positive");
    if (y.size() != S.data_dim())
        throw ShapeError("lcurve_generate: y has length " +
                         std::to_string(y.size()) + ", expected " +
                         std::to_string(S.data_dim()));
    if (y.norm() == 0)
        throw DomainError("lcurve_generate: degenerate problem, y = 0");

    double lo, hi;
    if (method == SweepMethod::tikhonov) {
        // log-centered on sigma_max * sigma_min, the middle of the
        // spectral range of sigma^2
        const double center = S.sigma(0) * S.sigma(S.rank() - 1);
        lo = center * std::pow(10.0, -decades / 2);
        hi = center * std::pow(10.0, decades / 2);
    } else {
        const Vector c = S.U.transpose() * y;
        const double eps_max = c.cwiseAbs().maxCoeff() / 2.0;
        if (eps_max == 0)
            throw DomainError(
                "lcurve_generate: degenerate problem, y orthogonal to the "
                "operator range");
        lo = eps_max * std::pow(10.0, -decades);
        hi = eps_max;
    }

    LCurve curve;
    curve.params.resize(points);
    curve.residual_norms.resize(points);
    curve.solution_norms.resize(points);
    const double step = std::log10(hi / lo) / static_cast<double>(points - 1);
    for (Index j = 0; j < points; ++j) {
        const double param = lo * std::pow(10.0, step * static_cast<double>(j));
        curve.params(j) = param;
        if (method == SweepMethod::tikhonov) {
            SolutionEstimate est = tikhonov_solve(S, y, param);
            curve.residual_norms(j) = est.discrepancy;
            curve.solution_norms(j) = est.x.norm();
        } else {
            FixedPointResult fp = closed_form_fixed_point(S, y, param);
            curve.residual_norms(j) = fp.estimate.discrepancy;
            curve.solution_norms(j) = fp.estimate.x.norm();
        }
    }

    if (method == SweepMethod::tikhonov) {
        // exact spectral-filter property, so a violation is a code bug
        for (Index j = 1; j < points; ++j) {
            const double r0 = curve.residual_norms(j - 1);
            const double s0 = curve.solution_norms(j - 1);
            if (curve.residual_norms(j) < r0 - 1e-12 * (1.0 + r0) ||
                curve.solution_norms(j) > s0 + 1e-12 * (1.0 + s0))
                throw std::logic_error(
                    "lcurve_generate: Tikhonov monotonicity violated at grid "
                    "point " +
                    std::to_string(j));
        }
    }

    curve.corner_index =
        corner_impl(curve.residual_norms, curve.solution_norms, &curve.warnings);
    return curve;
}

Index lcurve_corner(const LCurve& curve) {
    check_curve(curve);
    if (curve.params.size() < 5)
        throw DomainError("lcurve_corner: need at least 5 points for the "
                          "curvature stencil");
    return corner_impl(curve.residual_norms, curve.solution_norms, nullptr);
}

void save_lcurve(const LCurve& curve, const std::string& csv_path,
                 const std::string& json_path) {
    check_curve(curve);
    Matrix table(curve.params.size(), 3);
    table.col(0) = curve.params;
    table.col(1) = curve.residual_norms;
    table.col(2) = curve.solution_norms;
    write_matrix_csv(csv_path, table);

    json j;
    j["columns"] = {"param", "residual_norm", "solution_norm"};
    j["corner_index"] = curve.corner_index;
    j["corner_param"] = curve.params(curve.corner_index);
    j["warnings"] = curve.warnings;
    std::ofstream out(json_path);
    if (!out) throw IoError("cannot write " + json_path);
    out << j.dump(2) << '\n';
}

LCurve load_lcurve(const std::string& csv_path, const std::string& json_path) {
    Matrix table = read_matrix_csv(csv_path);
    if (table.cols() != 3)
        throw IoError(csv_path + ": expected 3 columns, found " +
                      std::to_string(table.cols()));
    LCurve curve;
    curve.params = table.col(0);
    curve.residual_norms = table.col(1);
    curve.solution_norms = table.col(2);

    std::ifstream in(json_path);
    if (!in) throw IoError("cannot open " + json_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError(json_path + ": " + std::string(e.what()));
    }
    curve.corner_index = j.at("corner_index").get<Index>();
    if (j.contains("warnings"))
        curve.warnings = j["warnings"].get<std::vector<std::string>>();
    check_curve(curve);
    if (curve.corner_index < 0 || curve.corner_index >= curve.params.size())
        throw IoError(json_path + ": corner_index out of range");
    return curve;
}

}  // namespace gmreg
