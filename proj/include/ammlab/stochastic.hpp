#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ammlab::stochastic {

enum class ProcessKind { BM, GBM };

// Discrete price process. Time is measured in steps (dt = 1), so sigma is a
// per-step relative volatility and sigma^2 * T maps to sigma^2 * n_steps.
struct PriceProcessSpec {
    ProcessKind kind{ProcessKind::GBM};
    double p0{100.0};
    double sigma{0.001};
    std::uint64_t n_steps{1000};
    std::uint64_t seed{0};
};

struct PricePath {
    std::vector<double> prices;  // n_steps + 1 entries, prices[0] == p0
    PriceProcessSpec spec;
};

// Smallest multiplicative factor a GBM step may apply.
inline constexpr double kGbmFactorFloor = 1e-12;

// Mixes a campaign seed with an index into an independent stream seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

// Standard-normal increments from a seeded 64-bit Mersenne twister.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    double operator()() { return normal_(engine_); }
    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// P_{t+1} = P_t + P_0 * sigma * dW  (additive, scale fixed at P_0).
double step_bm(double p_prev, double p0, double sigma, double dw) noexcept;

// P_{t+1} = P_t * (1 + sigma * dW), factor clamped to kGbmFactorFloor.
double step_gbm(double p_prev, double sigma, double dw) noexcept;

// Gaussian density, mean p0, standard deviation p0 * sigma * sqrt(t).
double pdf_bm(double p, double p0, double sigma, double t);

// Log-normal density with zero drift: log(p / p0) ~ N(-sigma^2 t / 2, sigma^2 t).
double pdf_gbm(double p, double p0, double sigma, double t);

PricePath generate_path(const PriceProcessSpec& spec);

// Writes the n_steps + 1 prices of `spec` into `out` (resized as needed).
void generate_path_into(const PriceProcessSpec& spec, std::vector<double>& out);

// Relative per-step volatility equivalent to an absolute one for BM.
inline double relative_sigma(double sigma_abs, double p0) noexcept {
    return sigma_abs / p0;
}

}  // namespace ammlab::stochastic
