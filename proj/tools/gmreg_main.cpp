#include "gmreg/csv.hpp"
#include "gmreg/errors.hpp"
#include "gmreg/experiments.hpp"
#include "gmreg/geomfix.hpp"
#include "gmreg/lcurve.hpp"
#include "gmreg/problem.hpp"
#include "gmreg/regularizers.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

// Exit codes: 0 success, 2 usage or unreadable input, 3 numerical failure,
// 4 failed acceptance assertion (convergence trend, benchmark comparisons).

namespace {

using namespace gmreg;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kOk = 0, kUsage = 2, kNumerical = 3, kAssert = 4;

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec && !fs::is_directory(dir))
        throw IoError("cannot create directory " + dir + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
}

struct ConfigFlags {
    SimulationConfig cfg;
    std::vector<Index> positions = {9, 29, 49, 69, 87};
    std::vector<double> amplitudes = {1.0, -0.75, 1.5, -1.0, 0.5};

    void attach(CLI::App* cmd) {
        cmd->add_option("--n", cfg.n, "grid size")->capture_default_str();
        cmd->add_option("--spike_positions", positions,
                        "comma-separated spike indices")
            ->delimiter(',');
        cmd->add_option("--spike_amplitudes", amplitudes,
                        "comma-separated spike amplitudes")
            ->delimiter(',');
        cmd->add_option("--kernel_width", cfg.kernel_width,
                        "Gaussian kernel std in grid units")
            ->capture_default_str();
        cmd->add_option("--noise_sigma", cfg.noise_sigma,
                        "white-noise std per sample")
            ->capture_default_str();
        cmd->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
        cmd->set_config("--config", "",
                        "flat key=value file mirroring these flag names");
    }

    SimulationConfig finish() {
        cfg.spike_positions = positions;
        cfg.spike_amplitudes = amplitudes;
        validate(cfg);
        return cfg;
    }
};

int cmd_simulate(ConfigFlags& flags, const std::string& out_dir) {
    const SimulationConfig cfg = flags.finish();
    const InverseProblem P = simulate(cfg);
    save_problem(out_dir, P, &cfg);
    const SingularSystem S = svd(P.F);
    std::cout << "wrote " << out_dir << " (n=" << cfg.n
              << ", noise norm=" << (P.delta ? *P.delta : 0.0)
              << ", numerical rank=" << S.rank() << ", condition="
              << S.sigma(0) / S.sigma(S.rank() - 1) << ")\n";
    return kOk;
}

int cmd_solve(const std::string& problem_dir, const std::string& out_dir,
              const std::string& method_name,
              const std::optional<double>& gamma,
              const std::optional<double>& eps,
              const std::optional<Index>& k) {
    const Method method = method_from_name(method_name);
    auto require_only = [&](const char* flag, bool present, bool g, bool e,
                            bool kk) {
        if (!present)
            throw DomainError("solve --method " + method_name + " requires " +
                              flag);
        if (g || e || kk)
            throw DomainError("solve --method " + method_name +
                              " accepts only " + flag);
    };
    switch (method) {
        case Method::pinv:
            if (gamma || eps || k)
                throw DomainError("solve --method pinv takes no parameter flag");
            break;
        case Method::tikhonov:
            require_only("--gamma", gamma.has_value(), false, eps.has_value(),
                         k.has_value());
            break;
        case Method::tsvd:
            require_only("--k", k.has_value(), gamma.has_value(),
                         eps.has_value(), false);
            break;
        case Method::geom_fixed_point:
            require_only("--eps", eps.has_value(), gamma.has_value(), false,
                         k.has_value());
            break;
        case Method::map:
            throw DomainError(
                "solve does not expose map directly; use tikhonov or the "
                "library API");
    }

    const InverseProblem P = load_problem(problem_dir);
    const SingularSystem S = svd(P.F);

    SolutionEstimate est;
    json extra;
    if (method == Method::pinv) {
        est = pinv_solve(S, P.y);
    } else if (method == Method::tikhonov) {
        est = tikhonov_solve(S, P.y, *gamma);
    } else if (method == Method::tsvd) {
        est = tsvd_solve(S, P.y, *k);
    } else {
        FixedPointResult fp = closed_form_fixed_point(S, P.y, *eps);
        est = fp.estimate;
        extra["residual"] = fp.residual;
        extra["empty_kept"] = fp.empty_kept;
        if (fp.empty_kept)
            std::cerr << "warning: empty kept set, estimate is 0\n";
    }

    ensure_dir(out_dir);
    write_vector_csv(out_dir + "/x.csv", est.x);
    json j = json::parse(to_json(est));
    for (auto& [key, val] : extra.items()) j[key] = val;
    write_text(out_dir + "/solution.json", j.dump(2));
    std::cout << "wrote " << out_dir << "/x.csv (method=" << method_name
              << ", discrepancy=" << est.discrepancy << ")\n";
    return kOk;
}

int cmd_lcurve(const std::string& problem_dir, const std::string& out_dir,
               const std::string& method_name, double decades, Index points,
               bool solve_at_corner) {
    const SweepMethod method = sweep_method_from_name(method_name);
    const InverseProblem P = load_problem(problem_dir);
    const SingularSystem S = svd(P.F);
    const LCurve curve = lcurve_generate(S, P.y, method, decades, points);

    ensure_dir(out_dir);
    save_lcurve(curve, out_dir + "/lcurve.csv", out_dir + "/lcurve.json");
    for (const auto& w : curve.warnings) std::cerr << "warning: " << w << '\n';

    const double corner_param = curve.params(curve.corner_index);
    std::cout << "corner at index " << curve.corner_index
              << ", parameter=" << corner_param << '\n';

    if (solve_at_corner) {
        SolutionEstimate est;
        if (method == SweepMethod::tikhonov)
            est = tikhonov_solve(S, P.y, corner_param);
        else
            est = closed_form_fixed_point(S, P.y, corner_param).estimate;
        write_vector_csv(out_dir + "/x.csv", est.x);
        write_text(out_dir + "/solution.json", to_json(est));
        std::cout << "wrote corner solve, discrepancy=" << est.discrepancy
                  << '\n';
    }
    return kOk;
}

int cmd_converge(const std::string& problem_dir, const std::string& out_dir,
                 std::vector<double> scales, std::uint64_t seed) {
    const InverseProblem P = load_problem(problem_dir);
    if (!P.x_true)
        throw DomainError("converge needs x_true.csv in the problem directory");
    if (scales.empty()) scales = default_delta_scales();

    const ConvergenceTable table =
        run_convergence_study(P.F, *P.x_true, scales, seed);

    ensure_dir(out_dir);
    Matrix rows(static_cast<Index>(table.rows.size()), 8);
    json jrows = json::array();
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        const auto& d = r.decomposition;
        const Index ii = static_cast<Index>(i);
        rows(ii, 0) = r.delta;
        rows(ii, 1) = r.eps;
        rows(ii, 2) = r.relative_error;
        rows(ii, 3) = d.truncation_norm;
        rows(ii, 4) = d.data_misfit_norm;
        rows(ii, 5) = d.shrinkage_norm;
        rows(ii, 6) = d.total_bound;
        rows(ii, 7) = d.actual_error;
        jrows.push_back({{"delta", r.delta},
                         {"eps", r.eps},
                         {"relative_error", r.relative_error},
                         {"truncation_norm", d.truncation_norm},
                         {"data_misfit_norm", d.data_misfit_norm},
                         {"shrinkage_norm", d.shrinkage_norm},
                         {"total_bound", d.total_bound},
                         {"actual_error", d.actual_error}});
    }
    write_matrix_csv(out_dir + "/convergence.csv", rows);
    json j;
    j["columns"] = {"delta", "eps", "relative_error", "truncation_norm",
                    "data_misfit_norm", "shrinkage_norm", "total_bound",
                    "actual_error"};
    j["rows"] = jrows;
    j["spearman"] = table.spearman;
    j["factor10_ok"] = table.factor10_ok;
    write_text(out_dir + "/convergence.json", j.dump(2));

    for (const auto& r : table.rows)
        if (r.decomposition.actual_error >
            r.decomposition.total_bound + 1e-10) {
            std::cerr << "convergence check failed: error bound violated at "
                         "delta="
                      << r.delta << '\n';
            return kAssert;
        }
    std::cout << "relative error " << table.rows.front().relative_error
              << " -> " << table.rows.back().relative_error
              << " (spearman=" << table.spearman << ")\n";
    if (!table.factor10_ok) {
        std::cerr << "convergence check failed: relative error did not drop "
                     "by 10x from the largest to the smallest delta\n";
        return kAssert;
    }
    return kOk;
}

int cmd_benchmark(ConfigFlags& flags, const std::string& out_dir,
                  double decades, Index points) {
    const SimulationConfig cfg = flags.finish();
    const std::string report_text =
        run_benchmark(cfg, out_dir, decades, points);

    const auto problems = validate_benchmark_report(report_text);
    if (!problems.empty()) {
        std::cerr << "benchmark stage 'report validation' failed:\n";
        for (const auto& p : problems) std::cerr << "  " << p << '\n';
        return kNumerical;
    }

    const json report = json::parse(report_text);
    std::cout << "pinv relative error      " << report["pinv"]["relative_error"]
              << '\n'
              << "tikhonov relative error  "
              << report["tikhonov"]["relative_error"] << " at gamma="
              << report["tikhonov"]["chosen_param"] << '\n'
              << "geom relative error      " << report["geom"]["relative_error"]
              << " at eps=" << report["geom"]["chosen_param"] << '\n'
              << "report: " << out_dir << "/report.json\n";

    const json& checks = report["checks"];
    if (!checks["tikhonov_under_tenth_of_pinv"].get<bool>() ||
        !checks["geom_under_tenth_of_pinv"].get<bool>() ||
        !checks["geom_within_3x_tikhonov"].get<bool>()) {
        std::cerr << "benchmark comparison failed: " << checks.dump() << '\n';
        return kAssert;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral regularization toolbox for linear inverse problems"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a synthetic problem");
    ConfigFlags sim_flags;
    std::string sim_out = "problem";
    sim_flags.attach(sim);
    sim->add_option("--out", sim_out, "output problem directory")
        ->capture_default_str();

    // solve
    auto* solve = app.add_subcommand("solve", "solve a saved problem");
    std::string solve_problem, solve_out = ".", solve_method;
    std::optional<double> solve_gamma, solve_eps;
    std::optional<Index> solve_k;
    solve->add_option("--problem-dir", solve_problem, "problem directory")
        ->required();
    solve->add_option("--out", solve_out, "output directory")
        ->capture_default_str();
    solve->add_option("--method", solve_method, "pinv|tikhonov|tsvd|geom")
        ->required();
    solve->add_option("--gamma", solve_gamma, "Tikhonov parameter");
    solve->add_option("--eps", solve_eps, "fixed-point truncation parameter");
    solve->add_option("--k", solve_k, "TSVD truncation index");

    // lcurve
    auto* lc = app.add_subcommand("lcurve", "parameter sweep + corner");
    std::string lc_problem, lc_out = ".", lc_method;
    double lc_decades = 30;
    Index lc_points = 100;
    bool lc_solve = false;
    lc->add_option("--problem-dir", lc_problem, "problem directory")->required();
    lc->add_option("--out", lc_out, "output directory")->capture_default_str();
    lc->add_option("--method", lc_method, "tikhonov|geom")->required();
    lc->add_option("--decades", lc_decades, "sweep span in decades")
        ->capture_default_str();
    lc->add_option("--points", lc_points, "grid size")->capture_default_str();
    lc->add_flag("--solve-at-corner", lc_solve, "also solve at the corner");

    // converge
    auto* conv = app.add_subcommand("converge",
                                    "noise-to-zero convergence study");
    std::string conv_problem, conv_out = ".";
    std::vector<double> conv_scales;
    std::uint64_t conv_seed = 20240801;
    conv->add_option("--problem-dir", conv_problem, "problem directory")
        ->required();
    conv->add_option("--out", conv_out, "output directory")
        ->capture_default_str();
    conv->add_option("--delta-scales", conv_scales,
                     "noise scales relative to ||F x_true||, largest first")
        ->delimiter(',');
    conv->add_option("--seed", conv_seed, "noise seed")->capture_default_str();

    // benchmark
    auto* bench = app.add_subcommand("benchmark", "full synthetic benchmark");
    ConfigFlags bench_flags;
    std::string bench_out = "benchmark_out";
    double bench_decades = 30;
    Index bench_points = 100;
    bench_flags.attach(bench);
    bench->add_option("--out", bench_out, "output directory")
        ->capture_default_str();
    bench->add_option("--decades", bench_decades, "sweep span in decades")
        ->capture_default_str();
    bench->add_option("--points", bench_points, "grid size")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_flags, sim_out);
        if (solve->parsed())
            return cmd_solve(solve_problem, solve_out, solve_method,
                             solve_gamma, solve_eps, solve_k);
        if (lc->parsed())
            return cmd_lcurve(lc_problem, lc_out, lc_method, lc_decades,
                              lc_points, lc_solve);
        if (conv->parsed())
            return cmd_converge(conv_problem, conv_out, conv_scales, conv_seed);
        if (bench->parsed())
            return cmd_benchmark(bench_flags, bench_out, bench_decades,
                                 bench_points);
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
    return kUsage;
}
