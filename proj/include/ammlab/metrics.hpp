#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ammlab/stochastic.hpp"

namespace ammlab::metrics {

// Per-trajectory accumulators, all in token-x units.
struct RunMetrics {
    double il{0.0};
    double lvr{0.0};
    double volume{0.0};
    double fees{0.0};
    std::uint64_t n_arb_events{0};
    double final_price{0.0};

    // "Including fees" variants are derived at report time only.
    double lvr_net_of_fees() const noexcept { return lvr - fees; }
    double il_net_of_fees() const noexcept { return il - fees; }
};

// Shadow-portfolio rebalancing over one move p -> p_next.
struct Rebalance {
    double delta_y;      // y bought by the shadow portfolio
    double delta_x_bar;  // x spent buying delta_y at p_next
    double delta_x;      // x released by the pool
};

// HODL(p_final) - V(p_final) = (L / sqrt(p)) (1 - sqrt(p / p_final))^2.
double il_between(double liquidity, double p_entry, double p_final);

// Differential LVR of a single move. Identical to il_between by construction.
double lvr_step(double liquidity, double p, double p_next);

Rebalance rebalance_quantities(double liquidity, double p, double p_next);

// |x(p_next) - x(p)|.
double volume_step(double liquidity, double p, double p_next);

// Cumulative metrics of `path` sampled at each checkpoint (step indices into
// the path, 0 <= idx <= n_steps, non-decreasing). il is measured from
// prices[0]; lvr and volume sum per-step contributions.
std::vector<RunMetrics> accumulate(const stochastic::PricePath& path, double liquidity,
                                   std::span<const std::size_t> checkpoints);

// Metrics at the end of the path.
RunMetrics accumulate(std::span<const double> prices, double liquidity);

}  // namespace ammlab::metrics
