#include "ammlab/stochastic.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ammlab/error.hpp"

namespace ammlab::stochastic {
namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void check_density_args(double sigma, double t) {
    if (!(sigma > 0.0)) throw DomainError("sigma must be positive, got " + std::to_string(sigma));
    if (!(t > 0.0)) throw DomainError("t must be positive, got " + std::to_string(t));
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(base) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

double step_bm(double p_prev, double p0, double sigma, double dw) noexcept {
    return p_prev + p0 * sigma * dw;
}

double step_gbm(double p_prev, double sigma, double dw) noexcept {
    double factor = 1.0 + sigma * dw;
    if (factor <= 0.0) factor = kGbmFactorFloor;
    return p_prev * factor;
}

double pdf_bm(double p, double p0, double sigma, double t) {
    check_density_args(sigma, t);
    if (!(p0 > 0.0)) throw DomainError("p0 must be positive");
    const double var = p0 * p0 * sigma * sigma * t;
    const double d = p - p0;
    return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

double pdf_gbm(double p, double p0, double sigma, double t) {
    check_density_args(sigma, t);
    if (!(p > 0.0)) throw DomainError("log-normal density needs p > 0, got " + std::to_string(p));
    if (!(p0 > 0.0)) throw DomainError("p0 must be positive");
    const double var = sigma * sigma * t;
    const double z = std::log(p / p0) + 0.5 * var;
    return std::exp(-z * z / (2.0 * var)) / (p * std::sqrt(2.0 * std::numbers::pi * var));
}

void generate_path_into(const PriceProcessSpec& spec, std::vector<double>& out) {
    if (!(spec.p0 > 0.0)) throw DomainError("p0 must be positive");
    if (!(spec.sigma >= 0.0)) throw DomainError("sigma must be non-negative");
    if (spec.n_steps < 1) throw DomainError("n_steps must be at least 1");

    out.resize(spec.n_steps + 1);
    out[0] = spec.p0;
    NormalStream dw(spec.seed);
    if (spec.kind == ProcessKind::BM) {
        for (std::uint64_t t = 1; t <= spec.n_steps; ++t) {
            out[t] = step_bm(out[t - 1], spec.p0, spec.sigma, dw());
        }
    } else {
        for (std::uint64_t t = 1; t <= spec.n_steps; ++t) {
            out[t] = step_gbm(out[t - 1], spec.sigma, dw());
        }
    }
}

PricePath generate_path(const PriceProcessSpec& spec) {
    PricePath path{{}, spec};
    generate_path_into(spec, path.prices);
    return path;
}

}  // namespace ammlab::stochastic
