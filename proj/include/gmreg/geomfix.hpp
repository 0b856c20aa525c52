#pragma once

#include "gmreg/regularizers.hpp"

#include <string>
#include <utility>
#include <vector>

namespace gmreg {

// Fixed-point machinery for the iteration map
//   A_eps[w] = sum_i [sigma_i (u_i'y) / (sigma_i^2 + eps^2/(v_i'w)^2)] v_i,
// whose canonical fixed point keeps exactly the modes with |u_i'y| > 2 eps
// and solves t^2 - (u_i'y) t + eps^2 = 0 per kept coordinate
// (t = sigma_i v_i'p, root with the sign of u_i'y).

struct FixedPointResult {
    SolutionEstimate estimate;        // method geom_fixed_point, param eps
    std::vector<Index> kept_indices;  // {i : |u_i'y| > 2 eps}
    Index iterations = 0;             // 0 for the closed form
    double residual = 0.0;            // ||A_eps[p] - p||
    bool empty_kept = false;          // p = 0 because nothing survived
};

struct ErrorDecomposition {
    double truncation_norm = 0.0;   // signal content outside the kept modes
    double data_misfit_norm = 0.0;  // noise passed through kept modes
    double shrinkage_norm = 0.0;    // kept-coefficient bias of the fixed point
    double total_bound = 0.0;       // sum of the three
    double actual_error = 0.0;      // ||x_true - p||
};

// Indices with |u_i'y| > 2 eps (strict; boundary ties are dropped).
std::vector<Index> kept_set(const SingularSystem& S, const Vector& y,
                            double eps);

// One application of A_eps.  A coordinate with v_i'w = 0 contributes 0,
// realizing the alpha -> 0 limit of the operator definition analytically.
Vector apply_A_eps(const SingularSystem& S, const Vector& y, double eps,
                   const Vector& w);

// p = 1/2 sum_kept [u_i'y + sgn(u_i'y) sqrt((u_i'y)^2 - 4 eps^2)] v_i/sigma_i.
// Empty kept set gives p = 0 with empty_kept set.  residual is measured by
// one application of apply_A_eps.
FixedPointResult closed_form_fixed_point(const SingularSystem& S,
                                         const Vector& y, double eps);

// w <- A_eps[w] until ||w_next - w|| <= tol (1 + ||w||) or max_iter; throws
// ConvergenceError (carrying the last iterate and step norm) on the cap.
FixedPointResult iterate_fixed_point(const SingularSystem& S, const Vector& y,
                                     double eps, const Vector& w0,
                                     double tol = 1e-12,
                                     Index max_iter = 10000);

// Derivative of A_eps at w: sum_i beta_i v_i v_i' with
//   beta_i = 2 eps^2 (sigma_i v_i'w)(u_i'y) / (sigma_i^2 (v_i'w)^2 + eps^2)^2,
// the derivative of the i-th spectral coefficient in v_i'w.  Symmetric m x m.
Matrix jacobian_A_eps(const SingularSystem& S, const Vector& y, double eps,
                      const Vector& w);

// Largest singular value of a symmetric matrix by power iteration
// (relative tolerance 1e-10, deterministic seeded start).
double spectral_norm_power_iteration(const Matrix& J, std::uint64_t seed = 1);

struct AttractivityReport {
    std::vector<Index> kept_indices;
    std::vector<bool> margin_condition;    // |u_i'y| > 4 eps per kept mode
    std::vector<bool> per_mode_strict;    // 2e^2|st||c| < (s^2 t^2 + e^2)^2
    double jacobian_spectral_norm = 0.0;  // ||D A_eps(p)||_2
    bool spectral_norm_lt_1 = false;
    bool margin_all = false;  // every kept mode clears the 4 eps bar
    bool empty_kept = false;
};

// Attractivity diagnostics at the canonical fixed point.  The 4 eps bound
// is the proven sufficient condition; modes in (2 eps, 4 eps] get reported
// verdicts without any claim attached.
AttractivityReport attractivity_check(const SingularSystem& S,
                                      const Vector& y, double eps);

// g = prod |z_i|, grad_j = sgn(z_j) prod_{i != j} |z_i|.  The gradient is
// undefined at any zero coordinate: SingularPointError.
std::pair<double, Vector> geometric_mean_value_and_grad(const Vector& z);

// cos of the angle between the geometric-mean gradient direction
// (1/q_1, ..., 1/q_k) and the discrepancy-ellipsoid normal
// b_i = sigma_i (sigma_i q_i - c_i), both in the kept-coordinate basis.
// Signed: -1 at the fixed point itself.
double tangency_cosine(const Vector& sigma_kept, const Vector& c_kept,
                       const Vector& q);

struct TangencyReport {
    double cos_abs = 0.0;
    int proportionality_sign = 0;  // sign of <grad g, ellipsoid normal>
    bool tangent = false;          // cos_abs >= 1 - 1e-8
    Index kept_count = 0;
};

// Level-set tangency of the geometric mean against the discrepancy
// ellipsoid at the fixed point.  Throws NotApplicableError when the kept
// set is empty.
TangencyReport tangency_check(const SingularSystem& S, const Vector& y,
                              double eps);

struct CovarianceReport {
    double max_deviation = 0.0;
    double tolerance = 0.0;  // 1e-12 (1 + ||p||)
    bool consistent = false;
};

// MAP estimate with prior eigenvalues (v_i'p)^2 must reproduce p itself:
// the fixed point equates signal covariance to squared solution coordinates.
CovarianceReport covariance_consistency_check(const SingularSystem& S,
                                              const Vector& y, double eps);

// Splits x_true - p into truncation (signal outside kept modes), data
// misfit (noise through kept modes), and shrinkage (fixed-point bias);
// verifies the three vectors sum to x_true - p before returning norms.
ErrorDecomposition error_decomposition(const SingularSystem& S,
                                       const Vector& y, double eps,
                                       const Vector& x_true);

std::string to_json(const FixedPointResult& r);
std::string to_json(const AttractivityReport& r);
std::string to_json(const TangencyReport& r);
std::string to_json(const CovarianceReport& r);
std::string to_json(const ErrorDecomposition& d);

}  // namespace gmreg
