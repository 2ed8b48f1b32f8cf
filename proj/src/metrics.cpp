#include "ammlab/metrics.hpp"

#include <cmath>
#include <string>

#include "ammlab/cfmm.hpp"
#include "ammlab/error.hpp"

namespace ammlab::metrics {
namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(name) + " must be positive and finite, got " +
                          std::to_string(v));
    }
}

}  // namespace

double il_between(double liquidity, double p_entry, double p_final) {
    require_positive(liquidity, "liquidity");
    require_positive(p_entry, "entry price");
    require_positive(p_final, "final price");
    const double gap = 1.0 - std::sqrt(p_entry / p_final);
    return liquidity / std::sqrt(p_entry) * gap * gap;
}

double lvr_step(double liquidity, double p, double p_next) {
    return il_between(liquidity, p, p_next);
}

Rebalance rebalance_quantities(double liquidity, double p, double p_next) {
    require_positive(liquidity, "liquidity");
    require_positive(p, "price");
    require_positive(p_next, "next price");
    const double root_p = std::sqrt(p);
    const double ratio = p / p_next;
    const double root_ratio = std::sqrt(ratio);
    return {
        liquidity * root_p * (std::sqrt(p_next / p) - 1.0),
        liquidity / root_p * (root_ratio - ratio),
        liquidity / root_p * (1.0 - root_ratio),
    };
}

double volume_step(double liquidity, double p, double p_next) {
    return cfmm::x_leg_volume(liquidity, p, p_next);
}

RunMetrics accumulate(std::span<const double> prices, double liquidity) {
    require_positive(liquidity, "liquidity");
    if (prices.empty()) throw DomainError("empty price path");
    RunMetrics m;
    for (std::size_t t = 1; t < prices.size(); ++t) {
        m.lvr += lvr_step(liquidity, prices[t - 1], prices[t]);
        m.volume += volume_step(liquidity, prices[t - 1], prices[t]);
    }
    m.final_price = prices.back();
    m.il = il_between(liquidity, prices.front(), m.final_price);
    return m;
}

std::vector<RunMetrics> accumulate(const stochastic::PricePath& path, double liquidity,
                                   std::span<const std::size_t> checkpoints) {
    require_positive(liquidity, "liquidity");
    const auto& prices = path.prices;
    if (prices.empty()) throw DomainError("empty price path");

    std::vector<RunMetrics> out;
    out.reserve(checkpoints.size());
    RunMetrics running;
    std::size_t t = 0;
    for (const std::size_t cp : checkpoints) {
        if (cp >= prices.size() || cp < t) {
            throw DomainError("checkpoints must be non-decreasing step indices within the path");
        }
        for (; t < cp; ++t) {
            running.lvr += lvr_step(liquidity, prices[t], prices[t + 1]);
            running.volume += volume_step(liquidity, prices[t], prices[t + 1]);
        }
        running.final_price = prices[cp];
        running.il = il_between(liquidity, prices[0], prices[cp]);
        out.push_back(running);
    }
    return out;
}

}  // namespace ammlab::metrics
