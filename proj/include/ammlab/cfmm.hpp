#pragma once

// Constant-product pool arithmetic (x * y = L^2, spot price p = y / x).
// All values are denominated in token-x units.

namespace ammlab::cfmm {

struct Reserves {
    double x;
    double y;
};

struct Pool {
    double liquidity{};
    double reserve_x{};
    double reserve_y{};
    double fee{};  // fraction in [0, 1)

    // Pool holding liquidity L at spot price p.
    static Pool at_price(double liquidity, double price, double fee = 0.0);

    double spot_price() const noexcept { return reserve_y / reserve_x; }
};

struct SwapResult {
    Pool pool;
    double volume_x;  // |x(p_target) - x(p_before)|
    double fee_x;     // fee * volume_x, never added to reserves
};

// x = L / sqrt(p), y = L * sqrt(p).
Reserves reserves_at_price(double liquidity, double price);

// 2L / sqrt(p).
double position_value(double liquidity, double price);

// Entry portfolio (x(p_entry), y(p_entry)) marked at p_now.
double hodl_value(double liquidity, double p_entry, double p_now);

// Magnitude of the token-x leg moving the pool from p to p_next.
double x_leg_volume(double liquidity, double p, double p_next);

// Move the pool to spot price p_target. Direction follows
// sign(p_target - spot); the fee is tallied separately.
SwapResult swap_to_price(const Pool& pool, double p_target);

// Same as swap_to_price, with the pre-trade spot supplied by the caller.
// Engines that track the AMM price exactly use this to avoid the y/x
// round-off of Pool::spot_price().
SwapResult swap_between(const Pool& pool, double p_before, double p_target);

}  // namespace ammlab::cfmm
