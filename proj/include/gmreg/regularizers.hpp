#pragma once

#include "gmreg/linalg.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gmreg {

enum class Method { pinv, tikhonov, tsvd, map, geom_fixed_point };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct SolutionEstimate {
    Vector x;
    Method method = Method::pinv;
    double param = 0.0;  // gamma, eps, or truncation level as applicable
    double discrepancy = 0.0;
    std::optional<std::vector<Index>> kept_indices;
};

// Assembles x = V a for coefficients a in the right-singular basis, with
// the discrepancy computed through the cancellation-free orthogonal split
// ||y - F x||^2 = ||y - U U'y||^2 + ||U'y - sigma .* a||^2.
SolutionEstimate filter_estimate(const SingularSystem& S, const Vector& y,
                                 const Vector& vbasis_coeffs, Method method,
                                 double param);

SolutionEstimate pinv_solve(const SingularSystem& S, const Vector& y);

// x = sum_i sigma_i (u_i'y) / (sigma_i^2 + gamma) v_i, the spectral form of
// (F'F + gamma I)^{-1} F'y.  gamma >= 0.
SolutionEstimate tikhonov_solve(const SingularSystem& S, const Vector& y,
                                double gamma);

// x = sum_i sigma_i (u_i'y) / (sigma_i^2 + eps2 / cx_eigs_i) v_i with the
// i-th term 0 when cx_eigs_i = 0 (zero prior variance kills the mode).
// cx_eigs are the prior covariance eigenvalues in the v_i basis.
SolutionEstimate map_estimate(const SingularSystem& S, const Vector& y,
                              double eps2, const Vector& cx_eigs);

// Partial sum over the k largest singular triples, 1 <= k <= rank.
SolutionEstimate tsvd_solve(const SingularSystem& S, const Vector& y,
                            Index k);

// Finds gamma > 0 with ||y - F x_gamma|| = delta to 1e-8 relative, using
// bisection on log10(gamma) over [-30, 30] plus secant refinement; the
// residual is strictly increasing in gamma, which the solver asserts.
// Throws NoRootError (stating the feasible range) unless
// ||y - F pinv(y)|| < delta < ||y||.
std::pair<double, SolutionEstimate> discrepancy_principle_gamma(
    const SingularSystem& S, const Vector& y, double delta);

// JSON serialization: method, param, discrepancy, kept_indices, x.
std::string to_json(const SolutionEstimate& est);

}  // namespace gmreg
