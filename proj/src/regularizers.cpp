#include "gmreg/regularizers.hpp"

#include "gmreg/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <string>

namespace gmreg {

using nlohmann::json;

std::string method_name(Method m) {
    switch (m) {
        case Method::pinv: return "pinv";
        case Method::tikhonov: return "tikhonov";
        case Method::tsvd: return "tsvd";
        case Method::map: return "map";
        case Method::geom_fixed_point: return "geom_fixed_point";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    if (name == "pinv") return Method::pinv;
    if (name == "tikhonov") return Method::tikhonov;
    if (name == "tsvd") return Method::tsvd;
    if (name == "map") return Method::map;
    if (name == "geom" || name == "geom_fixed_point")
        return Method::geom_fixed_point;
    throw DomainError("unknown method '" + name + "'");
}

namespace {

void check_y(const SingularSystem& S, const Vector& y) {
    if (y.size() != S.data_dim())
        throw ShapeError("y has length " + std::to_string(y.size()) +
                         ", expected " + std::to_string(S.data_dim()));
}

// Discrepancy of x = V a through the orthogonal split
//   ||y - F x||^2 = ||y - U U'y||^2 + ||U'y - sigma .* a||^2,
// which stays accurate when the residual is far below ||y||.
double filter_discrepancy(const SingularSystem& S, const Vector& y,
                          const Vector& coeffs, const Vector& a) {
    const double offrange2 = (y - S.U * coeffs).squaredNorm();
    const double inrange2 =
        (coeffs - S.sigma.cwiseProduct(a)).squaredNorm();
    return std::sqrt(offrange2 + inrange2);
}

SolutionEstimate from_filter(const SingularSystem& S, const Vector& y,
                             const Vector& coeffs, const Vector& a,
                             Method method, double param) {
    SolutionEstimate est;
    est.x = S.V * a;
    est.method = method;
    est.param = param;
    est.discrepancy = filter_discrepancy(S, y, coeffs, a);
    return est;
}

}  // namespace

SolutionEstimate filter_estimate(const SingularSystem& S, const Vector& y,
                                 const Vector& vbasis_coeffs, Method method,
                                 double param) {
    check_y(S, y);
    if (vbasis_coeffs.size() != S.rank())
        throw ShapeError("filter_estimate: coefficient length " +
                         std::to_string(vbasis_coeffs.size()) +
                         ", expected rank " + std::to_string(S.rank()));
    Vector coeffs = S.U.transpose() * y;
    return from_filter(S, y, coeffs, vbasis_coeffs, method, param);
}

SolutionEstimate pinv_solve(const SingularSystem& S, const Vector& y) {
    check_y(S, y);
    Vector coeffs = S.U.transpose() * y;
    Vector a = coeffs.cwiseQuotient(S.sigma);
    return from_filter(S, y, coeffs, a, Method::pinv, 0.0);
}

SolutionEstimate tikhonov_solve(const SingularSystem& S, const Vector& y,
                                double gamma) {
    check_y(S, y);
    if (gamma < 0) throw DomainError("tikhonov_solve: negative gamma");
    Vector coeffs = S.U.transpose() * y;
    Vector a(S.rank());
    for (Index i = 0; i < S.rank(); ++i)
        a(i) = S.sigma(i) * coeffs(i) / (S.sigma(i) * S.sigma(i) + gamma);
    return from_filter(S, y, coeffs, a, Method::tikhonov, gamma);
}

SolutionEstimate map_estimate(const SingularSystem& S, const Vector& y,
                              double eps2, const Vector& cx_eigs) {
    check_y(S, y);
    if (!(eps2 > 0)) throw DomainError("map_estimate: eps2 must be positive");
    if (cx_eigs.size() != S.rank())
        throw ShapeError("map_estimate: cx_eigs has length " +
                         std::to_string(cx_eigs.size()) + ", expected " +
                         std::to_string(S.rank()));
    if ((cx_eigs.array() < 0).any())
        throw DomainError("map_estimate: negative covariance eigenvalue");
    Vector coeffs = S.U.transpose() * y;
    Vector a(S.rank());
    // sigma c / (sigma^2 + eps2/cx) rewritten as sigma c cx/(sigma^2 cx + eps2)
    // so cx = 0 yields 0 without a division.
    for (Index i = 0; i < S.rank(); ++i)
        a(i) = S.sigma(i) * coeffs(i) * cx_eigs(i) /
               (S.sigma(i) * S.sigma(i) * cx_eigs(i) + eps2);
    return from_filter(S, y, coeffs, a, Method::map, eps2);
}

SolutionEstimate tsvd_solve(const SingularSystem& S, const Vector& y,
                            Index k) {
    check_y(S, y);
    if (k < 1 || k > S.rank())
        throw DomainError("tsvd_solve: k = " + std::to_string(k) +
                          " outside [1, " + std::to_string(S.rank()) + "]");
    Vector coeffs = S.U.transpose() * y;
    Vector a = Vector::Zero(S.rank());
    for (Index i = 0; i < k; ++i) a(i) = coeffs(i) / S.sigma(i);
    SolutionEstimate est = from_filter(S, y, coeffs, a, Method::tsvd,
                                       static_cast<double>(k));
    est.kept_indices = std::vector<Index>();
    for (Index i = 0; i < k; ++i) est.kept_indices->push_back(i);
    return est;
}

std::pair<double, SolutionEstimate> discrepancy_principle_gamma(
    const SingularSystem& S, const Vector& y, double delta) {
    check_y(S, y);
    if (!(delta > 0)) throw DomainError("discrepancy principle: delta must be positive");

    const Vector coeffs = S.U.transpose() * y;
    const double offrange2 = (y - S.U * coeffs).squaredNorm();
    const double dmin = std::sqrt(offrange2);  // pinv residual, gamma -> 0
    const double dmax = y.norm();              // x -> 0 limit, gamma -> inf

    if (!(delta > dmin) || !(delta < dmax))
        throw NoRootError("discrepancy principle: no root, delta must lie in (" +
                          std::to_string(dmin) + ", " + std::to_string(dmax) +
                          ")");

    auto disc = [&](double gamma) {
        double inrange2 = 0;
        for (Index i = 0; i < S.rank(); ++i) {
            const double s2 = S.sigma(i) * S.sigma(i);
            const double r = coeffs(i) * gamma / (s2 + gamma);
            inrange2 += r * r;
        }
        return std::sqrt(offrange2 + inrange2);
    };

    // The residual is strictly increasing in gamma; verify on the initial
    // bracket before trusting bisection with it.
    double lo = 1e-30, hi = 1e30;
    while (disc(lo) >= delta && lo > 1e-290) lo *= 1e-10;
    while (disc(hi) <= delta && hi < 1e290) hi *= 1e10;
    if (disc(lo) > disc(hi))
        throw NoRootError("discrepancy principle: residual not increasing on bracket");
    if (disc(lo) >= delta || disc(hi) <= delta)
        throw NoRootError("discrepancy principle: could not bracket the root");

    double flo = disc(lo) - delta, fhi = disc(hi) - delta;
    for (int it = 0; it < 90; ++it) {
        const double mid = std::sqrt(lo) * std::sqrt(hi);  // log midpoint
        const double fmid = disc(mid) - delta;
        if (fmid < 0) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
    }
    // Secant refinement inside the final bracket.
    double g0 = lo, f0 = flo, g1 = hi, f1 = fhi;
    for (int it = 0; it < 40 && f1 != f0; ++it) {
        double g2 = g1 - f1 * (g1 - g0) / (f1 - f0);
        if (!(g2 > lo) || !(g2 < hi)) g2 = 0.5 * (lo + hi);
        const double f2 = disc(g2) - delta;
        g0 = g1;
        f0 = f1;
        g1 = g2;
        f1 = f2;
        if (f2 < 0)
            lo = g2;
        else
            hi = g2;
        if (std::abs(f2) <= 1e-13 * delta) break;
    }
    const double gamma = std::abs(f1) < std::abs(f0) ? g1 : g0;

    SolutionEstimate est = tikhonov_solve(S, y, gamma);
    if (std::abs(est.discrepancy - delta) > 1e-8 * delta)
        throw NoRootError("discrepancy principle: root refinement stalled at |r - delta| = " +
                          std::to_string(std::abs(est.discrepancy - delta)));
    return {gamma, est};
}

std::string to_json(const SolutionEstimate& est) {
    json j;
    j["method"] = method_name(est.method);
    j["param"] = est.param;
    j["discrepancy"] = est.discrepancy;
    if (est.kept_indices)
        j["kept_indices"] = *est.kept_indices;
    else
        j["kept_indices"] = nullptr;
    j["x"] = std::vector<double>(est.x.data(), est.x.data() + est.x.size());
    return j.dump(2);
}

}  // namespace gmreg
