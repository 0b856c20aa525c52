#pragma once

#include "gmreg/linalg.hpp"

#include <string>
#include <vector>

namespace gmreg {

enum class SweepMethod { tikhonov, geom };

SweepMethod sweep_method_from_name(const std::string& name);
std::string sweep_method_name(SweepMethod m);

struct LCurve {
    Vector params;          // strictly increasing, positive, log-spaced
    Vector residual_norms;  // ||y - F x_param||
    Vector solution_norms;  // ||x_param||
    Index corner_index = 0;
    std::vector<std::string> warnings;
};

// Sweeps `points` log-spaced parameter values over `decades` decades and
// records (residual norm, solution norm) per value.  The Tikhonov grid is
// log-centered at sigma_max * sigma_min; the geom grid ends at
// max|u_i'y| / 2 (above which the kept set is empty).  Tikhonov curves are
// checked for the exact filter monotonicity: residuals non-decreasing and
// solution norms non-increasing in gamma.  Throws DomainError for y = 0,
// points < 3, or decades <= 0.
LCurve lcurve_generate(const SingularSystem& S, const Vector& y,
                       SweepMethod method, double decades, Index points);

// Index of maximum Menger (three-point circumscribed circle) curvature of
// (log residual, log solution norm); endpoints excluded, ties broken toward
// the larger parameter, norms floored at 1e-300 before taking logs.
// Requires at least 5 points.
Index lcurve_corner(const LCurve& curve);

// CSV rows param,residual_norm,solution_norm plus a JSON sidecar with
// corner_index, corner_param, and warnings.
void save_lcurve(const LCurve& curve, const std::string& csv_path,
                 const std::string& json_path);
LCurve load_lcurve(const std::string& csv_path, const std::string& json_path);

}  // namespace gmreg
