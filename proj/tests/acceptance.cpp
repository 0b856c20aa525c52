// Acceptance checks: one line per criterion, nonzero exit when any fails.
// Each check regenerates its own randomized instances from fixed seeds and
// verifies the library against independent oracles (dense solves, finite
// differences, closed-form fixtures).

#include "gmreg/errors.hpp"
#include "gmreg/experiments.hpp"

#include "oracles.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

using namespace gmreg;

namespace {

int g_failures = 0;

void report(int number, const char* label, bool ok, const std::string& detail) {
    std::printf("[%s] %d. %s%s%s\n", ok ? "PASS" : "FAIL", number, label,
                detail.empty() ? "" : ": ", detail.c_str());
    if (!ok) ++g_failures;
}

struct Instance {
    Matrix F;
    Vector y;
    SingularSystem S;
    double eps = 0.0;
};

// random rectangular instance, eps tied to the largest data coordinate
Instance random_instance(std::uint64_t seed, Index max_dim = 50) {
    Instance ins;
    const Vector dims = uniform_vector(2, 2.0, static_cast<double>(max_dim + 1),
                                       seed);
    const Index n = static_cast<Index>(dims(0));
    const Index m = static_cast<Index>(dims(1));
    ins.F = oracle::random_matrix(n, m, seed + 1);
    ins.y = oracle::random_vector(n, seed + 2);
    ins.S = svd(ins.F);
    ins.eps = 0.1 * (ins.S.U.transpose() * ins.y).cwiseAbs().maxCoeff();
    return ins;
}

// instance whose data coordinates avoid the (1.5 eps, 4.2 eps) band, so every
// kept mode clears the attractivity margin
Instance gapped_instance(std::uint64_t seed, Index max_dim = 50) {
    Instance ins = random_instance(seed, max_dim);
    ins.eps = 0.3;
    Vector c = oracle::random_vector(ins.S.rank(), seed + 3);
    for (Index i = 0; i < c.size(); ++i) {
        const double s = c(i) >= 0 ? 1.0 : -1.0;
        const double mag = std::abs(c(i));
        c(i) = s * ins.eps * (mag > 0.8 ? 4.2 + mag : std::min(mag, 1.5));
    }
    ins.y = ins.S.U * c;
    return ins;
}

void check_fixed_point_identity() {
    bool ok = true;
    std::string detail = "100 instances, n,m <= 50";
    for (std::uint64_t k = 0; k < 100 && ok; ++k) {
        const Instance ins = random_instance(1000 + 10 * k);
        const FixedPointResult r = closed_form_fixed_point(ins.S, ins.y, ins.eps);
        const Vector image = apply_A_eps(ins.S, ins.y, ins.eps, r.estimate.x);
        const double gap = (image - r.estimate.x).norm();
        if (gap > 1e-10 * (1.0 + r.estimate.x.norm())) {
            ok = false;
            detail = "residual " + std::to_string(gap) + " at seed " +
                     std::to_string(1000 + 10 * k);
        }
    }
    report(1, "closed form is a fixed point of the iteration map", ok, detail);
}

void check_attractivity() {
    bool ok = true;
    std::string detail = "100 gapped instances, iteration vs closed form";
    for (std::uint64_t k = 0; k < 100 && ok; ++k) {
        const Instance ins = gapped_instance(3000 + 10 * k);
        const FixedPointResult cf =
            closed_form_fixed_point(ins.S, ins.y, ins.eps);
        if (cf.empty_kept) continue;
        try {
            const Vector w0 = pseudo_solve(ins.S, ins.y);
            const FixedPointResult it =
                iterate_fixed_point(ins.S, ins.y, ins.eps, w0);
            const double rel = (it.estimate.x - cf.estimate.x).norm() /
                               (1.0 + cf.estimate.x.norm());
            if (rel > 1e-9) {
                ok = false;
                detail = "iterate off by " + std::to_string(rel);
                break;
            }
            const AttractivityReport rep =
                attractivity_check(ins.S, ins.y, ins.eps);
            if (!rep.margin_all || !(rep.jacobian_spectral_norm < 1.0)) {
                ok = false;
                detail = "spectral norm " +
                         std::to_string(rep.jacobian_spectral_norm) +
                         " at seed " + std::to_string(3000 + 10 * k);
                break;
            }
        } catch (const ConvergenceError&) {
            ok = false;
            detail = "iteration cap hit at seed " + std::to_string(3000 + 10 * k);
        }
    }
    report(2, "iteration from the pseudoinverse attracts to the fixed point",
           ok, detail);
}

void check_covariance_consistency() {
    bool ok = true;
    std::string detail = "100 instances";
    for (std::uint64_t k = 0; k < 100 && ok; ++k) {
        const Instance ins = random_instance(5000 + 10 * k);
        const FixedPointResult r = closed_form_fixed_point(ins.S, ins.y, ins.eps);
        if (r.empty_kept) continue;
        const CovarianceReport rep =
            covariance_consistency_check(ins.S, ins.y, ins.eps);
        if (!rep.consistent ||
            rep.max_deviation > 1e-12 * (1.0 + r.estimate.x.norm())) {
            ok = false;
            detail = "deviation " + std::to_string(rep.max_deviation) +
                     " at seed " + std::to_string(5000 + 10 * k);
        }
    }
    report(3, "prior covariance from squared coordinates reproduces the fixed point",
           ok, detail);
}

void check_tangency() {
    bool ok = true;
    int controls = 0;
    std::string detail;
    for (std::uint64_t k = 0; k < 100 && ok; ++k) {
        const Instance ins = random_instance(7000 + 10 * k);
        const FixedPointResult r = closed_form_fixed_point(ins.S, ins.y, ins.eps);
        if (r.empty_kept) continue;
        const TangencyReport rep = tangency_check(ins.S, ins.y, ins.eps);
        if (!(rep.cos_abs >= 1.0 - 1e-8)) {
            ok = false;
            detail = "|cos| = " + std::to_string(rep.cos_abs) + " at seed " +
                     std::to_string(7000 + 10 * k);
            break;
        }
    }
    // negative control on the well-separated family: nudging the kept
    // coordinates by 1% in alternating directions must break tangency
    for (std::uint64_t k = 0; k < 100 && ok; ++k) {
        const Instance ins = gapped_instance(8000 + 10 * k);
        const FixedPointResult r = closed_form_fixed_point(ins.S, ins.y, ins.eps);
        const Index kc = static_cast<Index>(r.kept_indices.size());
        if (kc < 2) continue;
        const Vector c = ins.S.U.transpose() * ins.y;
        const Vector coords = ins.S.V.transpose() * r.estimate.x;
        Vector sk(kc), ck(kc), q(kc);
        for (Index j = 0; j < kc; ++j) {
            const Index i = r.kept_indices[j];
            sk(j) = ins.S.sigma(i);
            ck(j) = c(i);
            q(j) = coords(i) * (1.0 + 0.01 * (j % 2 == 0 ? 1.0 : -1.0));
        }
        const double cos_perturbed = std::abs(tangency_cosine(sk, ck, q));
        ++controls;
        if (!(cos_perturbed < 1.0 - 1e-4)) {
            ok = false;
            detail = "perturbed |cos| = " + std::to_string(cos_perturbed) +
                     " at seed " + std::to_string(8000 + 10 * k);
        }
    }
    if (ok)
        detail = "100 instances, " + std::to_string(controls) +
                 " perturbation controls";
    report(4, "geometric-mean level set is tangent to the discrepancy ellipsoid",
           ok, detail);
}

void check_convergence_study() {
    SimulationConfig cfg;
    cfg.kernel_width = 1.25;  // full-rank kernel: no truncation floor
    const Matrix F = gaussian_convolution_operator(cfg.n, cfg.kernel_width);
    const Vector x_true = spike_source(cfg);
    const ConvergenceTable t =
        run_convergence_study(F, x_true, default_delta_scales(), cfg.seed);
    bool ok = t.factor10_ok && t.spearman > 0.9;
    std::string detail;
    for (const ConvergenceRow& row : t.rows) {
        const ErrorDecomposition& d = row.decomposition;
        if (d.actual_error > d.total_bound + 1e-10 * (1.0 + d.actual_error)) {
            ok = false;
            detail = "bound violated at delta = " + std::to_string(row.delta);
        }
    }
    if (detail.empty()) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "error %.3g -> %.3g over 6 decades, spearman %.2f",
                      t.rows.front().relative_error,
                      t.rows.back().relative_error, t.spearman);
        detail = buf;
    }
    report(5, "estimate error tracks the noise level to zero", ok, detail);
}

void check_benchmark() {
    namespace fs = std::filesystem;
    const std::string out =
        (fs::temp_directory_path() / "gmreg_acceptance_bench").string();
    const auto t0 = std::chrono::steady_clock::now();
    const std::string report_text =
        run_benchmark(SimulationConfig{}, out, 30, 100);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    bool ok = validate_benchmark_report(report_text).empty();
    std::string detail = "report failed validation";
    if (ok) {
        const nlohmann::json j = nlohmann::json::parse(report_text);
        const auto& checks = j["checks"];
        ok = checks["tikhonov_under_tenth_of_pinv"].get<bool>() &&
             checks["geom_under_tenth_of_pinv"].get<bool>() &&
             checks["geom_within_3x_tikhonov"].get<bool>() && seconds < 10.0;
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "tik %.3f, geom %.3f, pinv %.3g, %.2f s",
                      j["tikhonov"]["relative_error"].get<double>(),
                      j["geom"]["relative_error"].get<double>(),
                      j["pinv"]["relative_error"].get<double>(), seconds);
        detail = buf;
    }
    report(6, "corner-selected estimates beat the pseudoinverse", ok, detail);
}

void check_dense_oracles() {
    bool ok = true;
    std::string detail = "100 instances, tikhonov + iteration map vs dense solves";
    for (std::uint64_t k = 0; k < 100 && ok; ++k) {
        // tall full-column-rank instance so the dense penalty form applies
        const Index m = 3 + static_cast<Index>(k % 13);
        const Index n = m + 2 + static_cast<Index>(k % 7);
        const Matrix F = oracle::random_matrix(n, m, 9000 + 10 * k);
        const Vector y = oracle::random_vector(n, 9001 + 10 * k);
        const SingularSystem S = svd(F);
        if (S.rank() < m) continue;  // vanishingly rare; the form needs full rank

        for (double gamma : {1e-6, 1e-2, 1.0, 1e3}) {
            const Vector ref = oracle::dense_tikhonov(F, y, gamma);
            const Vector got = tikhonov_solve(S, y, gamma).x;
            if ((got - ref).norm() > 1e-8 * (1.0 + ref.norm())) {
                ok = false;
                detail = "tikhonov off at gamma " + std::to_string(gamma);
                break;
            }
        }
        if (!ok) break;

        // coordinates bounded away from zero keep the dense form well posed
        Vector t = uniform_vector(m, 0.5, 1.5, 9002 + 10 * k);
        const Vector signs = uniform_vector(m, -1.0, 1.0, 9003 + 10 * k);
        for (Index i = 0; i < m; ++i)
            if (signs(i) < 0) t(i) = -t(i);
        const Vector w = S.V * t;
        const double eps = 0.2 * (S.U.transpose() * y).cwiseAbs().maxCoeff();
        const Vector ref = oracle::dense_A_eps(F, S.V, t, y, eps);
        const Vector got = apply_A_eps(S, y, eps, w);
        if ((got - ref).norm() > 1e-8 * (1.0 + ref.norm())) {
            ok = false;
            detail = "iteration map off by " +
                     std::to_string((got - ref).norm()) + " at seed " +
                     std::to_string(9000 + 10 * k);
        }
    }
    report(7, "spectral formulas agree with dense linear solves", ok, detail);
}

void check_finite_differences() {
    bool ok = true;
    std::string detail = "20 gradient + 20 jacobian probes";
    for (std::uint64_t k = 0; k < 20 && ok; ++k) {
        Vector z = oracle::random_vector(5 + static_cast<Index>(k % 4),
                                         11000 + 10 * k);
        for (Index i = 0; i < z.size(); ++i)
            if (std::abs(z(i)) < 0.1) z(i) = z(i) < 0 ? -0.1 : 0.1;
        const Vector grad = geometric_mean_value_and_grad(z).second;
        const Vector fd = oracle::fd_gradient(
            [](const Vector& u) {
                return geometric_mean_value_and_grad(u).first;
            },
            z);
        if ((grad - fd).norm() > 1e-6 * (1.0 + fd.norm())) {
            ok = false;
            detail = "gradient off at seed " + std::to_string(11000 + 10 * k);
        }
    }
    for (std::uint64_t k = 0; k < 20 && ok; ++k) {
        const Index m = 4 + static_cast<Index>(k % 8);
        const Index n = m + 3;
        const Matrix F = oracle::random_matrix(n, m, 12000 + 10 * k);
        const Vector y = oracle::random_vector(n, 12001 + 10 * k);
        const SingularSystem S = svd(F);
        Vector t = uniform_vector(S.rank(), 0.4, 1.6, 12002 + 10 * k);
        const Vector w = S.V * t;
        const double eps = 0.2 * (S.U.transpose() * y).cwiseAbs().maxCoeff();
        const Matrix J = jacobian_A_eps(S, y, eps, w);
        const Matrix J_fd = oracle::fd_jacobian(
            [&](const Vector& u) { return apply_A_eps(S, y, eps, u); }, w);
        if ((J - J_fd).norm() > 1e-6 * (1.0 + J_fd.norm())) {
            ok = false;
            detail = "jacobian off by " + std::to_string((J - J_fd).norm()) +
                     " at seed " + std::to_string(12000 + 10 * k);
        }
    }
    report(8, "gradients and jacobians match central finite differences", ok,
           detail);
}

void check_discrepancy_principle() {
    bool ok = true;
    std::string detail = "50 instances + identity fixture";

    // closed-form fixture: residual gamma ||y||/(1+gamma) = 1 at gamma = 1/4
    const SingularSystem S = svd(Matrix::Identity(2, 2));
    Vector y(2);
    y << 3.0, 4.0;
    const auto [gamma, est] = discrepancy_principle_gamma(S, y, 1.0);
    if (std::abs(gamma - 0.25) > 1e-10 || std::abs(est.x(0) - 2.4) > 1e-10 ||
        std::abs(est.x(1) - 3.2) > 1e-10) {
        ok = false;
        detail = "fixture returned gamma = " + std::to_string(gamma);
    }

    for (std::uint64_t k = 0; k < 50 && ok; ++k) {
        const Instance ins = random_instance(13000 + 10 * k, 30);
        const double dmin =
            (ins.y - ins.S.U * (ins.S.U.transpose() * ins.y)).norm();
        const double frac = 0.1 + 0.8 * (static_cast<double>(k) / 49.0);
        const double delta = dmin + frac * (ins.y.norm() - dmin);
        try {
            const auto [g, e] = discrepancy_principle_gamma(ins.S, ins.y, delta);
            if (std::abs(e.discrepancy - delta) > 1e-8 * delta) {
                ok = false;
                detail = "residual off target by " +
                         std::to_string(std::abs(e.discrepancy - delta)) +
                         " at seed " + std::to_string(13000 + 10 * k);
            }
        } catch (const NoRootError&) {
            ok = false;
            detail = "feasible target rejected at seed " +
                     std::to_string(13000 + 10 * k);
        }
    }
    report(9, "discrepancy principle hits the noise level", ok, detail);
}

}  // namespace

int main() {
    check_fixed_point_identity();
    check_attractivity();
    check_covariance_consistency();
    check_tangency();
    check_convergence_study();
    check_benchmark();
    check_dense_oracles();
    check_finite_differences();
    check_discrepancy_principle();
    if (g_failures > 0) {
        std::printf("%d of 9 acceptance checks failed\n", g_failures);
        return 1;
    }
    std::printf("all 9 acceptance checks passed\n");
    return 0;
}
