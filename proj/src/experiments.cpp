#include "gmreg/experiments.hpp"

#include "gmreg/csv.hpp"
#include "gmreg/errors.hpp"
#include "gmreg/rng.hpp"
#include "gmreg/svgplot.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>

namespace gmreg {

using nlohmann::json;
namespace fs = std::filesystem;

std::vector<double> default_delta_scales() {
    return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
}

namespace {

std::vector<double> midranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = mid;
        i = j + 1;
    }
    return r;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw ShapeError("spearman: length mismatch");
    if (a.size() < 2) throw DomainError("spearman: need at least 2 samples");
    const std::vector<double> ra = midranks(a), rb = midranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = ra[i] - ma, db = rb[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0 || sbb == 0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

ConvergenceTable run_convergence_study(const Matrix& F, const Vector& x_true,
                                       const std::vector<double>& delta_scales,
                                       std::uint64_t seed) {
    if (x_true.size() != F.cols())
        throw ShapeError("run_convergence_study: x_true has length " +
                         std::to_string(x_true.size()) + ", expected " +
                         std::to_string(F.cols()));
    if (delta_scales.empty())
        throw DomainError("run_convergence_study: no delta scales");
    const double xnorm = x_true.norm();
    if (xnorm == 0)
        throw DomainError("run_convergence_study: x_true = 0 has no relative error");

    const SingularSystem S = svd(F);
    const Vector y_clean = F * x_true;
    const double base = y_clean.norm();

    ConvergenceTable table;
    for (std::size_t k = 0; k < delta_scales.size(); ++k) {
        const double scale = delta_scales[k];
        if (scale < 0)
            throw DomainError("run_convergence_study: negative delta scale");
        ConvergenceRow row;
        Vector y;
        if (scale == 0) {
            // exact data: the eps -> 0 limit, floored so the
            // operator stays defined
            row.delta = 0.0;
            row.eps = 1e-14;
            y = y_clean;
        } else {
            row.delta = scale * base;
            row.eps = row.delta;
            Vector nu = gaussian_vector(y_clean.size(), 1.0,
                                        seed + static_cast<std::uint64_t>(k));
            nu *= row.delta / nu.norm();  // noise rescaled to the exact bound
            y = y_clean + nu;
        }
        FixedPointResult fp = closed_form_fixed_point(S, y, row.eps);
        row.relative_error = (x_true - fp.estimate.x).norm() / xnorm;
        row.decomposition = error_decomposition(S, y, row.eps, x_true);
        table.rows.push_back(std::move(row));
    }

    std::vector<double> deltas, errors;
    for (const auto& r : table.rows) {
        deltas.push_back(r.delta);
        errors.push_back(r.relative_error);
    }
    table.spearman = deltas.size() >= 2 ? spearman(deltas, errors) : 0.0;
    table.factor10_ok = table.rows.back().relative_error <=
                        table.rows.front().relative_error / 10.0;
    return table;
}

namespace {

std::vector<double> to_std(const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

std::vector<double> index_axis(Index n) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = double(i);
    return x;
}

struct MethodRun {
    double chosen_param = 0;
    double relative_error = 0;
    double discrepancy = 0;
    double best_param = 0;
    double best_relative_error = 0;
    std::string lcurve_csv, lcurve_json, error_csv;
};

json method_json(const MethodRun& r) {
    return json{{"chosen_param", r.chosen_param},
                {"relative_error", r.relative_error},
                {"discrepancy", r.discrepancy},
                {"best_param", r.best_param},
                {"best_relative_error", r.best_relative_error},
                {"lcurve_csv", r.lcurve_csv},
                {"lcurve_json", r.lcurve_json},
                {"error_curve_csv", r.error_csv}};
}

}  // namespace

std::string run_benchmark(const SimulationConfig& cfg,
                          const std::string& out_dir, double decades,
                          Index points) {
    validate(cfg);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec && !fs::is_directory(out_dir))
        throw IoError("cannot create directory " + out_dir + ": " + ec.message());

    const InverseProblem P = simulate(cfg);
    save_problem(out_dir + "/problem", P, &cfg);
    const SingularSystem S = svd(P.F);
    const Vector& x_true = *P.x_true;
    const double xnorm = x_true.norm();
    const Vector y_clean = P.F * x_true;

    const SolutionEstimate pinv = pinv_solve(S, P.y);
    const double pinv_rel = (x_true - pinv.x).norm() / xnorm;
    write_vector_csv(out_dir + "/x_pinv.csv", pinv.x);

    MethodRun runs[2];
    const SweepMethod methods[2] = {SweepMethod::tikhonov, SweepMethod::geom};
    for (int mi = 0; mi < 2; ++mi) {
        const std::string name = sweep_method_name(methods[mi]);
        MethodRun& run = runs[mi];
        LCurve curve = lcurve_generate(S, P.y, methods[mi], decades, points);
        run.lcurve_csv = "lcurve_" + name + ".csv";
        run.lcurve_json = "lcurve_" + name + ".json";
        save_lcurve(curve, out_dir + "/" + run.lcurve_csv,
                    out_dir + "/" + run.lcurve_json);

        run.chosen_param = curve.params(curve.corner_index);
        SolutionEstimate est;
        if (methods[mi] == SweepMethod::tikhonov)
            est = tikhonov_solve(S, P.y, run.chosen_param);
        else
            est = closed_form_fixed_point(S, P.y, run.chosen_param).estimate;
        run.relative_error = (x_true - est.x).norm() / xnorm;
        run.discrepancy = est.discrepancy;
        write_vector_csv(out_dir + "/x_" + name + ".csv", est.x);

        // relative error over the same parameter grid
        Matrix err_table(curve.params.size(), 2);
        run.best_relative_error = std::numeric_limits<double>::infinity();
        for (Index j = 0; j < curve.params.size(); ++j) {
            const double param = curve.params(j);
            Vector xj;
            if (methods[mi] == SweepMethod::tikhonov)
                xj = tikhonov_solve(S, P.y, param).x;
            else
                xj = closed_form_fixed_point(S, P.y, param).estimate.x;
            const double rel = (x_true - xj).norm() / xnorm;
            err_table(j, 0) = param;
            err_table(j, 1) = rel;
            if (rel < run.best_relative_error) {
                run.best_relative_error = rel;
                run.best_param = param;
            }
        }
        run.error_csv = "error_" + name + ".csv";
        write_matrix_csv(out_dir + "/" + run.error_csv, err_table);

        PlotSeries lc{to_std(curve.residual_norms),
                      to_std(curve.solution_norms), "L-curve (" + name + ")"};
        PlotOptions lo;
        lo.title = "L-curve, " + name;
        lo.log_x = lo.log_y = true;
        lo.marker = {{0u, static_cast<std::size_t>(curve.corner_index)}};
        write_svg_plot(out_dir + "/lcurve_" + name + ".svg", {lc}, lo);

        PlotSeries ec{to_std(err_table.col(0)), to_std(err_table.col(1)),
                      "relative error"};
        PlotOptions eo;
        eo.title = "relative error vs parameter, " + name;
        eo.log_x = eo.log_y = true;
        eo.marker = {{0u, static_cast<std::size_t>(curve.corner_index)}};
        write_svg_plot(out_dir + "/error_" + name + ".svg", {ec}, eo);

        PlotSeries truth{index_axis(x_true.size()), to_std(x_true), "source"};
        PlotSeries fit{index_axis(est.x.size()), to_std(est.x),
                       name + " estimate"};
        PlotOptions so;
        so.title = "corner-selected estimate, " + name;
        write_svg_plot(out_dir + "/estimate_" + name + ".svg", {truth, fit}, so);
    }

    {
        PlotSeries truth{index_axis(x_true.size()), to_std(x_true), "source"};
        PlotOptions so;
        so.title = "spike source";
        write_svg_plot(out_dir + "/source.svg", {truth}, so);

        PlotSeries noisy{index_axis(P.y.size()), to_std(P.y), "measured"};
        PlotSeries clean{index_axis(y_clean.size()), to_std(y_clean), "clean"};
        PlotOptions dopts;
        dopts.title = "data";
        write_svg_plot(out_dir + "/data.svg", {noisy, clean}, dopts);
    }

    // per-eps corner tracking stands in for re-running the corner search
    // inside an outer iteration, which has no precise definition here
    {
        LCurve geom_curve = load_lcurve(out_dir + "/" + runs[1].lcurve_csv,
                                        out_dir + "/" + runs[1].lcurve_json);
        Matrix track(geom_curve.params.size(), 4);
        for (Index j = 0; j < geom_curve.params.size(); ++j) {
            track(j, 0) = geom_curve.params(j);
            track(j, 1) = geom_curve.residual_norms(j);
            track(j, 2) = geom_curve.solution_norms(j);
            track(j, 3) = j == geom_curve.corner_index ? 1.0 : 0.0;
        }
        write_matrix_csv(out_dir + "/corner_track.csv", track);
    }

    // verification reports at the corner-selected eps
    const double eps_star = runs[1].chosen_param;
    json verification;
    const auto kept = kept_set(S, P.y, eps_star);
    if (kept.empty()) {
        verification["tangency"] = {{"not_applicable", true}};
    } else {
        TangencyReport t = tangency_check(S, P.y, eps_star);
        verification["tangency"] = json::parse(to_json(t));
    }
    verification["covariance"] =
        json::parse(to_json(covariance_consistency_check(S, P.y, eps_star)));
    verification["attractivity"] =
        json::parse(to_json(attractivity_check(S, P.y, eps_star)));

    ConvergenceTable conv = run_convergence_study(
        P.F, x_true, default_delta_scales(), cfg.seed + 777);
    Matrix conv_table(static_cast<Index>(conv.rows.size()), 3);
    json conv_json = json::array();
    for (std::size_t i = 0; i < conv.rows.size(); ++i) {
        const auto& r = conv.rows[i];
        conv_table(static_cast<Index>(i), 0) = r.delta;
        conv_table(static_cast<Index>(i), 1) = r.eps;
        conv_table(static_cast<Index>(i), 2) = r.relative_error;
        conv_json.push_back({{"delta", r.delta},
                             {"eps", r.eps},
                             {"relative_error", r.relative_error}});
    }
    write_matrix_csv(out_dir + "/convergence.csv", conv_table);

    json report;
    report["config"] = {{"n", cfg.n},
                        {"spike_positions", cfg.spike_positions},
                        {"spike_amplitudes", cfg.spike_amplitudes},
                        {"kernel_width", cfg.kernel_width},
                        {"noise_sigma", cfg.noise_sigma},
                        {"seed", cfg.seed},
                        {"decades", decades},
                        {"points", points}};
    report["problem_dir"] = "problem";
    report["condition_number"] = S.sigma(0) / S.sigma(S.rank() - 1);
    report["numerical_rank"] = S.rank();
    report["noise_norm"] = P.delta ? *P.delta : 0.0;
    report["relative_noise"] = (P.delta ? *P.delta : 0.0) / y_clean.norm();
    report["pinv"] = {{"relative_error", pinv_rel},
                      {"discrepancy", pinv.discrepancy}};
    report["tikhonov"] = method_json(runs[0]);
    report["geom"] = method_json(runs[1]);
    report["convergence"] = conv_json;
    report["convergence_spearman"] = conv.spearman;
    report["verification"] = verification;
    report["checks"] = {
        {"tikhonov_under_tenth_of_pinv", runs[0].relative_error < 0.1 * pinv_rel},
        {"geom_under_tenth_of_pinv", runs[1].relative_error < 0.1 * pinv_rel},
        {"geom_within_3x_tikhonov",
         runs[1].relative_error <= 3.0 * runs[0].relative_error}};

    const std::string text = report.dump(2) + "\n";
    std::ofstream out(out_dir + "/report.json");
    if (!out) throw IoError("cannot write " + out_dir + "/report.json");
    out << text;
    return text;
}

std::vector<std::string> validate_benchmark_report(
    const std::string& json_text) {
    std::vector<std::string> problems;
    json report;
    try {
        report = json::parse(json_text);
    } catch (const json::exception& e) {
        problems.push_back(std::string("unparseable JSON: ") + e.what());
        return problems;
    }

    auto need = [&](const char* key) {
        if (!report.contains(key)) {
            problems.push_back(std::string("missing field '") + key + "'");
            return false;
        }
        return true;
    };
    auto finite_nonneg = [&](const json& j, const std::string& where) {
        if (!j.is_number() || !std::isfinite(j.get<double>()) ||
            j.get<double>() < 0)
            problems.push_back(where + " is not a finite nonnegative number");
    };

    if (need("config")) {
        for (const char* k :
             {"n", "kernel_width", "noise_sigma", "seed", "decades", "points"})
            if (!report["config"].contains(k))
                problems.push_back(std::string("config missing '") + k + "'");
    }
    for (const char* k : {"condition_number", "noise_norm", "relative_noise"})
        if (need(k)) finite_nonneg(report[k], k);
    if (need("pinv")) finite_nonneg(report["pinv"]["relative_error"],
                                    "pinv.relative_error");
    for (const char* m : {"tikhonov", "geom"}) {
        if (!need(m)) continue;
        const json& jm = report[m];
        for (const char* k : {"chosen_param", "relative_error", "discrepancy",
                              "best_param", "best_relative_error"}) {
            if (!jm.contains(k)) {
                problems.push_back(std::string(m) + " missing '" + k + "'");
                continue;
            }
            finite_nonneg(jm[k], std::string(m) + "." + k);
        }
        for (const char* k : {"lcurve_csv", "lcurve_json", "error_curve_csv"})
            if (!jm.contains(k) || !jm[k].is_string() ||
                jm[k].get<std::string>().empty())
                problems.push_back(std::string(m) + "." + k +
                                   " is not a nonempty string");
    }
    if (need("convergence")) {
        if (!report["convergence"].is_array() || report["convergence"].empty())
            problems.push_back("convergence is not a nonempty array");
        else
            for (const auto& row : report["convergence"])
                for (const char* k : {"delta", "eps", "relative_error"})
                    if (!row.contains(k))
                        problems.push_back(std::string("convergence row missing '") +
                                           k + "'");
    }
    if (need("verification"))
        for (const char* k : {"tangency", "covariance", "attractivity"})
            if (!report["verification"].contains(k))
                problems.push_back(std::string("verification missing '") + k + "'");
    if (need("checks"))
        for (const char* k : {"tikhonov_under_tenth_of_pinv",
                              "geom_under_tenth_of_pinv",
                              "geom_within_3x_tikhonov"})
            if (!report["checks"].contains(k) ||
                !report["checks"][k].is_boolean())
                problems.push_back(std::string("checks missing boolean '") + k +
                                   "'");
    return problems;
}

}  // namespace gmreg
