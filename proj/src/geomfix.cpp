#include "gmreg/geomfix.hpp"

#include "gmreg/errors.hpp"
#include "gmreg/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace gmreg {

using nlohmann::json;

namespace {

void check_eps(double eps) {
    if (!(eps > 0)) throw DomainError("eps must be positive");
}

void check_w(const SingularSystem& S, const Vector& w, const char* who) {
    if (w.size() != S.solution_dim())
        throw ShapeError(std::string(who) + ": w has length " +
                         std::to_string(w.size()) + ", expected " +
                         std::to_string(S.solution_dim()));
}

Vector data_coeffs(const SingularSystem& S, const Vector& y) {
    if (y.size() != S.data_dim())
        throw ShapeError("y has length " + std::to_string(y.size()) +
                         ", expected " + std::to_string(S.data_dim()));
    return S.U.transpose() * y;
}

// Positive root of t^2 - c t + eps^2 = 0 carrying the sign of c; the
// kept-coordinate value of sigma_i v_i'p.  Requires |c| > 2 eps.
double kept_coordinate(double c, double eps) {
    const double root = std::sqrt(c * c - 4.0 * eps * eps);
    return 0.5 * (c + (c > 0 ? root : -root));
}

}  // namespace

std::vector<Index> kept_set(const SingularSystem& S, const Vector& y,
                            double eps) {
    check_eps(eps);
    const Vector c = data_coeffs(S, y);
    std::vector<Index> kept;
    for (Index i = 0; i < c.size(); ++i)
        if (std::abs(c(i)) > 2.0 * eps) kept.push_back(i);
    return kept;
}

Vector apply_A_eps(const SingularSystem& S, const Vector& y, double eps,
                   const Vector& w) {
    check_eps(eps);
    check_w(S, w, "apply_A_eps");
    const Vector c = data_coeffs(S, y);
    Vector a(S.rank());
    for (Index i = 0; i < S.rank(); ++i) {
        const double t = S.V.col(i).dot(w);
        // sigma c / (sigma^2 + eps^2/t^2), arranged so t = 0 lands on the
        // analytic limit 0 and |t| >> 1 cannot overflow t^2.
        if (std::abs(t) >= 1.0) {
            const double et = eps / t;
            a(i) = S.sigma(i) * c(i) / (S.sigma(i) * S.sigma(i) + et * et);
        } else {
            const double st = S.sigma(i) * t;
            a(i) = S.sigma(i) * c(i) * t * t / (st * st + eps * eps);
        }
    }
    return S.V * a;
}

FixedPointResult closed_form_fixed_point(const SingularSystem& S,
                                         const Vector& y, double eps) {
    check_eps(eps);
    const Vector c = data_coeffs(S, y);

    FixedPointResult res;
    Vector a = Vector::Zero(S.rank());
    for (Index i = 0; i < c.size(); ++i)
        if (std::abs(c(i)) > 2.0 * eps) {
            res.kept_indices.push_back(i);
            a(i) = kept_coordinate(c(i), eps) / S.sigma(i);
        }
    res.empty_kept = res.kept_indices.empty();

    res.estimate = filter_estimate(S, y, a, Method::geom_fixed_point, eps);
    res.estimate.kept_indices = res.kept_indices;
    res.iterations = 0;
    res.residual =
        (apply_A_eps(S, y, eps, res.estimate.x) - res.estimate.x).norm();
    return res;
}

FixedPointResult iterate_fixed_point(const SingularSystem& S, const Vector& y,
                                     double eps, const Vector& w0, double tol,
                                     Index max_iter) {
    check_eps(eps);
    check_w(S, w0, "iterate_fixed_point");
    require_finite(w0, "iterate_fixed_point w0");
    if (!(tol > 0)) throw DomainError("iterate_fixed_point: tol must be positive");

    Vector w = w0;
    double step = 0.0;
    Index it = 0;
    for (; it < max_iter; ++it) {
        Vector wn = apply_A_eps(S, y, eps, w);
        step = (wn - w).norm();
        const bool done = step <= tol * (1.0 + w.norm());
        w = std::move(wn);
        if (done) break;
    }
    if (it == max_iter) {
        ConvergenceError err("fixed-point iteration hit the cap of " +
                                 std::to_string(max_iter) +
                                 " iterations, last step " +
                                 std::to_string(step),
                             w, step);
        throw err;
    }

    FixedPointResult res;
    res.kept_indices = kept_set(S, y, eps);
    res.empty_kept = res.kept_indices.empty();
    res.estimate =
        filter_estimate(S, y, S.V.transpose() * w, Method::geom_fixed_point, eps);
    res.estimate.kept_indices = res.kept_indices;
    res.iterations = it + 1;
    res.residual = step;
    return res;
}

Matrix jacobian_A_eps(const SingularSystem& S, const Vector& y, double eps,
                      const Vector& w) {
    check_eps(eps);
    check_w(S, w, "jacobian_A_eps");
    const Vector c = data_coeffs(S, y);

    Vector beta(S.rank());
    for (Index i = 0; i < S.rank(); ++i) {
        const double st = S.sigma(i) * S.V.col(i).dot(w);
        const double den = st * st + eps * eps;
        beta(i) = 2.0 * eps * eps * st * c(i) / (den * den);
    }

    // sum_i beta_i v_i v_i', filled triangle-and-mirror so the output is
    // symmetric to the bit.
    const Index m = S.solution_dim();
    Matrix J(m, m);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j <= i; ++j) {
            double s = 0;
            for (Index k = 0; k < S.rank(); ++k)
                s += beta(k) * S.V(i, k) * S.V(j, k);
            J(i, j) = J(j, i) = s;
        }
    return J;
}

double spectral_norm_power_iteration(const Matrix& J, std::uint64_t seed) {
    if (J.rows() != J.cols())
        throw ShapeError("spectral_norm_power_iteration: matrix not square");
    const Index n = J.rows();
    if (n == 0) return 0.0;

    for (int attempt = 0; attempt < 3; ++attempt) {
        Vector x = uniform_vector(n, -1.0, 1.0, seed + attempt);
        double xn = x.norm();
        if (xn == 0) continue;
        x /= xn;
        double est = 0.0;
        for (int it = 0; it < 200000; ++it) {
            Vector z = J * x;
            const double zn = z.norm();
            if (zn == 0) break;  // x landed in the nullspace
            x = z / zn;
            if (it > 0 && std::abs(zn - est) <= 1e-10 * zn) return zn;
            est = zn;
        }
        if (est > 0) return est;
    }
    return 0.0;  // numerically zero map
}

AttractivityReport attractivity_check(const SingularSystem& S, const Vector& y,
                                      double eps) {
    check_eps(eps);
    const Vector c = data_coeffs(S, y);
    FixedPointResult fp = closed_form_fixed_point(S, y, eps);

    AttractivityReport rep;
    rep.kept_indices = fp.kept_indices;
    rep.empty_kept = fp.empty_kept;
    for (Index i : fp.kept_indices) {
        rep.margin_condition.push_back(std::abs(c(i)) > 4.0 * eps);
        const double t = kept_coordinate(c(i), eps);  // sigma_i v_i'p
        const double den = t * t + eps * eps;
        rep.per_mode_strict.push_back(
            2.0 * eps * eps * std::abs(t) * std::abs(c(i)) < den * den);
    }
    rep.margin_all = true;
    for (bool ok : rep.margin_condition) rep.margin_all = rep.margin_all && ok;

    const Matrix J = jacobian_A_eps(S, y, eps, fp.estimate.x);
    rep.jacobian_spectral_norm = spectral_norm_power_iteration(J);
    rep.spectral_norm_lt_1 = rep.jacobian_spectral_norm < 1.0;
    return rep;
}

std::pair<double, Vector> geometric_mean_value_and_grad(const Vector& z) {
    const Index n = z.size();
    if (n == 0) throw DomainError("geometric_mean_value_and_grad: empty vector");
    for (Index i = 0; i < n; ++i)
        if (z(i) == 0.0)
            throw SingularPointError(
                "geometric-mean gradient undefined: coordinate " +
                std::to_string(i) + " is zero");

    // prefix/suffix products of |z_i| so no division by a tiny coordinate
    Vector pre(n + 1), suf(n + 1);
    pre(0) = 1.0;
    for (Index i = 0; i < n; ++i) pre(i + 1) = pre(i) * std::abs(z(i));
    suf(n) = 1.0;
    for (Index i = n; i-- > 0;) suf(i) = suf(i + 1) * std::abs(z(i));

    const double g = pre(n);
    Vector grad(n);
    for (Index j = 0; j < n; ++j) {
        const double mag = pre(j) * suf(j + 1);
        grad(j) = z(j) > 0 ? mag : -mag;
    }
    return {g, grad};
}

double tangency_cosine(const Vector& sigma_kept, const Vector& c_kept,
                       const Vector& q) {
    const Index k = q.size();
    if (sigma_kept.size() != k || c_kept.size() != k)
        throw ShapeError("tangency_cosine: mismatched kept-coordinate lengths");
    if (k == 0) throw NotApplicableError("tangency_cosine: empty kept set");

    Vector a(k), b(k);
    for (Index i = 0; i < k; ++i) {
        if (q(i) == 0.0)
            throw SingularPointError("tangency_cosine: zero coordinate " +
                                     std::to_string(i));
        a(i) = 1.0 / q(i);  // gradient direction of prod |z_i| at q, g > 0
        b(i) = sigma_kept(i) * (sigma_kept(i) * q(i) - c_kept(i));
    }
    const double an = a.norm(), bn = b.norm();
    if (an == 0 || bn == 0)
        throw SingularPointError("tangency_cosine: degenerate direction");
    return a.dot(b) / (an * bn);
}

TangencyReport tangency_check(const SingularSystem& S, const Vector& y,
                              double eps) {
    check_eps(eps);
    const Vector c = data_coeffs(S, y);
    FixedPointResult fp = closed_form_fixed_point(S, y, eps);
    if (fp.empty_kept)
        throw NotApplicableError("tangency_check: empty kept set, p = 0");

    const Index k = static_cast<Index>(fp.kept_indices.size());
    Vector sig(k), ck(k), q(k);
    for (Index j = 0; j < k; ++j) {
        const Index i = fp.kept_indices[static_cast<std::size_t>(j)];
        sig(j) = S.sigma(i);
        ck(j) = c(i);
        q(j) = kept_coordinate(c(i), eps) / S.sigma(i);  // v_i'p
    }

    const double cosv = tangency_cosine(sig, ck, q);
    TangencyReport rep;
    rep.cos_abs = std::abs(cosv);
    rep.proportionality_sign = cosv > 0 ? 1 : (cosv < 0 ? -1 : 0);
    rep.tangent = rep.cos_abs >= 1.0 - 1e-8;
    rep.kept_count = k;
    return rep;
}

CovarianceReport covariance_consistency_check(const SingularSystem& S,
                                              const Vector& y, double eps) {
    check_eps(eps);
    FixedPointResult fp = closed_form_fixed_point(S, y, eps);
    const Vector c = data_coeffs(S, y);

    Vector cx = Vector::Zero(S.rank());
    for (Index i : fp.kept_indices) {
        const double vi_p = kept_coordinate(c(i), eps) / S.sigma(i);
        cx(i) = vi_p * vi_p;  // squared solution coordinate as prior variance
    }
    SolutionEstimate map = map_estimate(S, y, eps * eps, cx);

    CovarianceReport rep;
    rep.max_deviation = (map.x - fp.estimate.x).cwiseAbs().maxCoeff();
    rep.tolerance = 1e-12 * (1.0 + fp.estimate.x.norm());
    rep.consistent = rep.max_deviation <= rep.tolerance;
    return rep;
}

ErrorDecomposition error_decomposition(const SingularSystem& S,
                                       const Vector& y, double eps,
                                       const Vector& x_true) {
    check_eps(eps);
    if (x_true.size() != S.solution_dim())
        throw ShapeError("error_decomposition: x_true has length " +
                         std::to_string(x_true.size()) + ", expected " +
                         std::to_string(S.solution_dim()));

    const Vector c = data_coeffs(S, y);
    FixedPointResult fp = closed_form_fixed_point(S, y, eps);
    const Vector xv = S.V.transpose() * x_true;

    // truncation keeps whatever the kept modes cannot represent, including
    // any content outside the numerical range of V
    Vector truncation = x_true;
    Vector misfit = Vector::Zero(S.solution_dim());
    Vector shrinkage = Vector::Zero(S.solution_dim());
    for (Index i : fp.kept_indices) {
        truncation -= xv(i) * S.V.col(i);
        misfit += ((S.sigma(i) * xv(i) - c(i)) / S.sigma(i)) * S.V.col(i);
        const double root = std::sqrt(c(i) * c(i) - 4.0 * eps * eps);
        const double shrink = 0.5 * (c(i) - (c(i) > 0 ? root : -root));
        shrinkage += (shrink / S.sigma(i)) * S.V.col(i);
    }

    const Vector err = x_true - fp.estimate.x;
    const double mismatch = (truncation + misfit + shrinkage - err).norm();
    if (mismatch > 1e-10)
        throw std::logic_error(
            "error_decomposition: the three components fail to sum to "
            "x_true - p (gap " +
            std::to_string(mismatch) + ")");

    ErrorDecomposition d;
    d.truncation_norm = truncation.norm();
    d.data_misfit_norm = misfit.norm();
    d.shrinkage_norm = shrinkage.norm();
    d.total_bound = d.truncation_norm + d.data_misfit_norm + d.shrinkage_norm;
    d.actual_error = err.norm();
    return d;
}

std::string to_json(const FixedPointResult& r) {
    json j;
    j["kept_indices"] = r.kept_indices;
    j["iterations"] = r.iterations;
    j["residual"] = r.residual;
    j["empty_kept"] = r.empty_kept;
    j["estimate"] = json::parse(to_json(r.estimate));
    return j.dump(2);
}

std::string to_json(const AttractivityReport& r) {
    json j;
    j["kept_indices"] = r.kept_indices;
    j["margin_condition"] = r.margin_condition;
    j["per_mode_strict"] = r.per_mode_strict;
    j["jacobian_spectral_norm"] = r.jacobian_spectral_norm;
    j["spectral_norm_lt_1"] = r.spectral_norm_lt_1;
    j["margin_all"] = r.margin_all;
    j["empty_kept"] = r.empty_kept;
    return j.dump(2);
}

std::string to_json(const TangencyReport& r) {
    json j;
    j["cos_abs"] = r.cos_abs;
    j["proportionality_sign"] = r.proportionality_sign;
    j["tangent"] = r.tangent;
    j["kept_count"] = r.kept_count;
    return j.dump(2);
}

std::string to_json(const CovarianceReport& r) {
    json j;
    j["max_deviation"] = r.max_deviation;
    j["tolerance"] = r.tolerance;
    j["consistent"] = r.consistent;
    return j.dump(2);
}

std::string to_json(const ErrorDecomposition& d) {
    json j;
    j["truncation_norm"] = d.truncation_norm;
    j["data_misfit_norm"] = d.data_misfit_norm;
    j["shrinkage_norm"] = d.shrinkage_norm;
    j["total_bound"] = d.total_bound;
    j["actual_error"] = d.actual_error;
    return j.dump(2);
}

}  // namespace gmreg
