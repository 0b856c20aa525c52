#include "gmreg/problem.hpp"

#include "gmreg/csv.hpp"
#include "gmreg/errors.hpp"
#include "gmreg/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

namespace gmreg {

using nlohmann::json;
namespace fs = std::filesystem;

void validate(const SimulationConfig& cfg) {
    if (cfg.n < 2) throw DomainError("config: n must be at least 2");
    if (!(cfg.kernel_width > 0))
        throw DomainError("config: kernel_width must be positive");
    if (cfg.noise_sigma < 0)
        throw DomainError("config: noise_sigma must be nonnegative");
    if (cfg.spike_positions.size() != cfg.spike_amplitudes.size())
        throw DomainError("config: spike position/amplitude lists differ in length");
    for (Index p : cfg.spike_positions)
        if (p < 0 || p >= cfg.n)
            throw DomainError("config: spike position " + std::to_string(p) +
                              " outside [0, " + std::to_string(cfg.n) + ")");
}

Matrix gaussian_convolution_operator(Index n, double kernel_width) {
    if (n < 2) throw DomainError("gaussian_convolution_operator: n must be at least 2");
    if (!(kernel_width > 0))
        throw DomainError("gaussian_convolution_operator: width must be positive");
    const double c = 1.0 / (kernel_width * std::sqrt(2.0 * M_PI));
    const double denom = 2.0 * kernel_width * kernel_width;
    Matrix a(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j <= i; ++j) {
            const double d = static_cast<double>(i - j);
            a(i, j) = a(j, i) = c * std::exp(-d * d / denom);
        }
    return a;
}

Vector spike_source(const SimulationConfig& cfg) {
    validate(cfg);
    Vector x = Vector::Zero(cfg.n);
    for (std::size_t k = 0; k < cfg.spike_positions.size(); ++k)
        x(cfg.spike_positions[k]) = cfg.spike_amplitudes[k];
    return x;
}

NoisyData add_noise(const Vector& y_clean, double noise_sigma,
                    std::uint64_t seed) {
    if (noise_sigma < 0) throw DomainError("add_noise: negative noise_sigma");
    if (noise_sigma == 0) return {y_clean, 0.0};
    Vector nu = gaussian_vector(y_clean.size(), noise_sigma, seed);
    return {y_clean + nu, nu.norm()};
}

double discrepancy(const InverseProblem& P, const Vector& x) {
    if (x.size() != P.F.cols())
        throw ShapeError("discrepancy: x has length " +
                         std::to_string(x.size()) + ", expected " +
                         std::to_string(P.F.cols()));
    return (P.y - P.F * x).norm();
}

InverseProblem simulate(const SimulationConfig& cfg) {
    validate(cfg);
    InverseProblem P;
    P.F = gaussian_convolution_operator(cfg.n, cfg.kernel_width);
    P.x_true = spike_source(cfg);
    NoisyData nd = add_noise(P.F * *P.x_true, cfg.noise_sigma, cfg.seed);
    P.y = nd.y;
    P.delta = nd.noise_norm;
    return P;
}

namespace {

json config_json(const SimulationConfig& cfg) {
    return json{{"n", cfg.n},
                {"spike_positions", cfg.spike_positions},
                {"spike_amplitudes", cfg.spike_amplitudes},
                {"kernel_width", cfg.kernel_width},
                {"noise_sigma", cfg.noise_sigma},
                {"seed", cfg.seed}};
}

}  // namespace

void save_problem(const std::string& dir, const InverseProblem& P,
                  const SimulationConfig* cfg) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec && !fs::is_directory(dir))
        throw IoError("cannot create directory " + dir + ": " + ec.message());
    write_matrix_csv(dir + "/F.csv", P.F);
    write_vector_csv(dir + "/y.csv", P.y);
    if (P.x_true) write_vector_csv(dir + "/x_true.csv", *P.x_true);

    json meta;
    if (P.delta) meta["delta"] = *P.delta;
    if (cfg) {
        meta["seed"] = cfg->seed;
        meta["config"] = config_json(*cfg);
    }
    std::ofstream out(dir + "/meta.json");
    if (!out) throw IoError("cannot write " + dir + "/meta.json");
    out << meta.dump(2) << '\n';
}

InverseProblem load_problem(const std::string& dir) {
    InverseProblem P;
    P.F = read_matrix_csv(dir + "/F.csv");
    P.y = read_vector_csv(dir + "/y.csv");
    if (P.y.size() != P.F.rows())
        throw IoError(dir + ": y.csv length does not match F.csv rows");
    if (fs::exists(dir + "/x_true.csv")) {
        P.x_true = read_vector_csv(dir + "/x_true.csv");
        if (P.x_true->size() != P.F.cols())
            throw IoError(dir + ": x_true.csv length does not match F.csv cols");
    }
    if (fs::exists(dir + "/meta.json")) {
        std::ifstream in(dir + "/meta.json");
        json meta;
        try {
            in >> meta;
        } catch (const json::exception& e) {
            throw IoError(dir + "/meta.json: " + std::string(e.what()));
        }
        if (meta.contains("delta")) P.delta = meta["delta"].get<double>();
    }
    return P;
}

}  // namespace gmreg
