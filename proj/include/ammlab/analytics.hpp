#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ammlab/stats.hpp"
#include "ammlab/stochastic.hpp"

namespace ammlab::analytics {

using stochastic::ProcessKind;

// Parameters of the IL distribution after time t. sigma is the relative
// volatility per unit time (absolute volatility sigma_abs maps to
// sigma_abs / p0).
struct ILDistParams {
    double p0{100.0};
    double liquidity{10000.0};
    double sigma{0.001};
    double t{1000.0};
    ProcessKind process{ProcessKind::GBM};
};

// Closed-form <LVR(T)> = L sigma^2 T / (4 sqrt(p0)), valid for sigma^2 T < 1.
double expected_lvr(double liquidity, double p0, double sigma, double t);

// True when sigma^2 t lies outside the range where expected_lvr is accurate.
bool outside_intermediate_regime(double sigma, double t) noexcept;

// dLVR/dt = L sigma_abs^2 / (4 p^{5/2}) along a price trajectory.
double lvr_ode_rhs(double liquidity, double sigma_abs, double p);

enum class Branch { Below, Above };

// Price reaching impermanent loss `il` from p0 on the requested side.
// The Above branch exists only for il < L / sqrt(p0).
double invert_il(double p0, double liquidity, double il, Branch branch);

// Density of IL: both inverse branches, Jacobian weighted, the Above branch
// gated by il < L / sqrt(p0). Diverges like 1/sqrt(il) at the origin.
double il_pdf(double il, const ILDistParams& params);

// Expected IL by adaptive quadrature over the truncated price domain.
// Throws NumericalError when the error estimate exceeds the tolerance.
double expected_il_quadrature(const ILDistParams& params);

// Constants of the small-IL form pdf(il) ~ (a / sqrt(il)) exp(-c il / (2 sigma^2 t)),
// fitted to il_pdf on log-spaced points in [il_lo, il_hi].
struct SmallIlLaw {
    double a;
    double c;
    double max_rel_residual;  // worst relative deviation of the fitted form
};

SmallIlLaw fit_small_il_law(const ILDistParams& params, double il_lo, double il_hi,
                            std::size_t n_points = 64);

// IL distribution in the root variable q = p0^{1/4} sqrt(IL / L), for which
// IL = L q^2 / sqrt(p0) and the density is bounded. Holds a tabulated CDF on
// log-spaced q knots with a monotone cubic inverse for sampling.
class ILDistribution {
public:
    static constexpr std::size_t kKnots = 4096;

    explicit ILDistribution(const ILDistParams& params);

    const ILDistParams& params() const noexcept { return params_; }

    double pdf(double il) const { return il_pdf(il, params_); }
    // Density in q, bounded at q = 0.
    double q_density(double q) const noexcept;
    double il_of_q(double q) const noexcept;
    double q_of_il(double il) const noexcept;

    // CDF of IL from the knot table plus a local quadrature to `il`.
    double cdf(double il) const;
    // Inverse CDF of IL at probability u in [0, 1).
    double quantile(double u) const;
    // Unchecked quantile for hot sampling loops.
    double draw(double u) const;

    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return variance_; }
    // Upper end of the tabulated q range for each branch.
    double q_max_below() const noexcept { return q_max_below_; }
    double q_max_above() const noexcept { return q_max_above_; }

    std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

private:
    double q_of_uniform(double u) const;

    ILDistParams params_;
    double scale_;  // L / sqrt(p0)
    double q_max_below_;
    double q_max_above_;
    std::vector<double> knot_q_;
    std::vector<double> knot_cdf_;    // normalised, strictly increasing
    std::vector<double> knot_slope_;  // dq/dF after monotone limiting
    double tabulated_mass_{0.0};
    double mean_{0.0};
    double variance_{0.0};
};

std::vector<double> sample_il(const ILDistParams& params, std::size_t n, std::uint64_t seed);

// Histogram of n_repeats independent sums of n_per_sum IL draws.
stats::Histogram clt_sum_experiment(const ILDistParams& params, std::size_t n_per_sum,
                                    std::size_t n_repeats, std::uint64_t seed,
                                    std::size_t bins = stats::kDefaultBins,
                                    unsigned threads = 0);

enum class StepKind { Gaussian, Unit };

// Absorbing barriers in units of the elementary step, lower < 0 < upper.
struct BarrierSpec {
    double lower{-10.0};
    double upper{10.0};
    StepKind step_kind{StepKind::Unit};
};

struct FirstPassage {
    double mean_steps;
    double stderr_steps;
    double frac_lower;  // walks absorbed at the lower barrier
};

// Zero-mean walk from the origin until it reaches a barrier.
FirstPassage first_passage(const BarrierSpec& spec, std::size_t n_walks, std::uint64_t seed,
                           unsigned threads = 0);

}  // namespace ammlab::analytics
