#pragma once

#include "gmreg/linalg.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gmreg {

struct InverseProblem {
    Matrix F;
    Vector y;
    std::optional<double> delta;   // noise-norm bound, if known
    std::optional<Vector> x_true;  // ground truth, simulation only
};

struct SimulationConfig {
    Index n = 100;
    std::vector<Index> spike_positions = {9, 29, 49, 69, 87};
    std::vector<double> spike_amplitudes = {1.0, -0.75, 1.5, -1.0, 0.5};
    double kernel_width = 3.0;
    double noise_sigma = 0.0015;
    std::uint64_t seed = 20240801;
};

// Throws DomainError if positions/amplitudes disagree in length, an index
// is out of [0, n), n < 2, kernel_width <= 0, or noise_sigma < 0.
void validate(const SimulationConfig& cfg);

// n x n symmetric Toeplitz matrix, entry (i,j) = c * exp(-(i-j)^2 / (2 w^2))
// with c = 1 / (w sqrt(2 pi)) so each row of the untruncated kernel sums
// to 1 at unit grid spacing.
Matrix gaussian_convolution_operator(Index n, double kernel_width);

Vector spike_source(const SimulationConfig& cfg);

// Returns (y_clean + nu, ||nu||) with nu i.i.d. N(0, noise_sigma^2) from the
// seeded generator in rng.hpp.
struct NoisyData {
    Vector y;
    double noise_norm;
};
NoisyData add_noise(const Vector& y_clean, double noise_sigma,
                    std::uint64_t seed);

double discrepancy(const InverseProblem& P, const Vector& x);

// Assembles the full synthetic problem: F from the Gaussian kernel, x_true
// from the spikes, y = F x_true + noise, delta = ||nu|| exactly.
InverseProblem simulate(const SimulationConfig& cfg);

// Problem directory layout: F.csv, y.csv, x_true.csv (when known),
// meta.json carrying delta, seed, and the config echo.
void save_problem(const std::string& dir, const InverseProblem& P,
                  const SimulationConfig* cfg = nullptr);
InverseProblem load_problem(const std::string& dir);

}  // namespace gmreg
