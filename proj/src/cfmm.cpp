#include "ammlab/cfmm.hpp"

#include <cmath>
#include <string>

#include "ammlab/error.hpp"

namespace ammlab::cfmm {
namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(name) + " must be positive and finite, got " +
                          std::to_string(v));
    }
}

}  // namespace

Pool Pool::at_price(double liquidity, double price, double fee) {
    if (!(fee >= 0.0 && fee < 1.0)) {
        throw DomainError("fee must lie in [0, 1), got " + std::to_string(fee));
    }
    const Reserves r = reserves_at_price(liquidity, price);
    return Pool{liquidity, r.x, r.y, fee};
}

Reserves reserves_at_price(double liquidity, double price) {
    require_positive(liquidity, "liquidity");
    require_positive(price, "price");
    const double root = std::sqrt(price);
    return {liquidity / root, liquidity * root};
}

double position_value(double liquidity, double price) {
    require_positive(liquidity, "liquidity");
    require_positive(price, "price");
    return 2.0 * liquidity / std::sqrt(price);
}

double hodl_value(double liquidity, double p_entry, double p_now) {
    require_positive(liquidity, "liquidity");
    require_positive(p_entry, "entry price");
    require_positive(p_now, "current price");
    return liquidity / std::sqrt(p_entry) * (1.0 + p_entry / p_now);
}

double x_leg_volume(double liquidity, double p, double p_next) {
    require_positive(liquidity, "liquidity");
    require_positive(p, "price");
    require_positive(p_next, "next price");
    return liquidity / std::sqrt(p) * std::abs(1.0 - std::sqrt(p / p_next));
}

SwapResult swap_between(const Pool& pool, double p_before, double p_target) {
    const Reserves r = reserves_at_price(pool.liquidity, p_target);
    const double volume = x_leg_volume(pool.liquidity, p_before, p_target);
    Pool next = pool;
    next.reserve_x = r.x;
    next.reserve_y = r.y;
    return {next, volume, pool.fee * volume};
}

SwapResult swap_to_price(const Pool& pool, double p_target) {
    require_positive(p_target, "target price");
    return swap_between(pool, pool.spot_price(), p_target);
}

}  // namespace ammlab::cfmm
