#include "ammlab/arbitrage.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ammlab/error.hpp"

namespace ammlab::arb {
namespace {

void check_path_price(double p, std::size_t step) {
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw DomainError("arbitrage run aborted: oracle price " + std::to_string(p) +
                          " at step " + std::to_string(step) + " is not positive");
    }
}

// Spot price that leaves the oracle exactly on the band edge.
double marginal_target(double oracle, bool upward, double fee, BandRule rule) {
    if (!upward) return oracle / (1.0 - fee);
    return rule == BandRule::Exact ? oracle * (1.0 - fee) : oracle / (1.0 + fee);
}

}  // namespace

void WaitTally::record(std::uint64_t step) noexcept {
    sum_waits += static_cast<double>(step - last_event_step);
    ++n_waits;
    last_event_step = step;
}

Band no_trade_band(double p_amm, double fee, BandRule rule) {
    const double upper = rule == BandRule::Exact ? p_amm / (1.0 - fee) : p_amm * (1.0 + fee);
    return {p_amm * (1.0 - fee), upper};
}

ArbRun run_no_fee(std::span<const double> path, const cfmm::Pool& pool, bool record_events) {
    if (pool.fee != 0.0) throw DomainError("run_no_fee requires a zero-fee pool");
    if (path.empty()) throw DomainError("empty price path");
    check_path_price(path[0], 0);

    ArbRun run;
    const double liquidity = pool.liquidity;
    cfmm::Pool state = pool;
    double p_amm = path[0];
    for (std::size_t t = 1; t < path.size(); ++t) {
        const double oracle = path[t];
        check_path_price(oracle, t);
        if (oracle == p_amm) continue;

        const double lvr = metrics::lvr_step(liquidity, p_amm, oracle);
        const cfmm::SwapResult swap = cfmm::swap_between(state, p_amm, oracle);
        run.metrics.lvr += lvr;
        run.metrics.volume += swap.volume_x;
        ++run.metrics.n_arb_events;
        run.waits.record(t);
        if (record_events) {
            run.events.push_back({t, p_amm, oracle, swap.volume_x, swap.fee_x, lvr});
        }
        state = swap.pool;
        p_amm = oracle;
    }
    run.metrics.final_price = p_amm;
    run.metrics.il = metrics::il_between(liquidity, path[0], p_amm);
    return run;
}

ArbRun run_with_fees(std::span<const double> path, const cfmm::Pool& pool,
                     const ArbitrageConfig& cfg) {
    if (!(cfg.fee >= 0.0 && cfg.fee < 1.0)) {
        throw DomainError("fee must lie in [0, 1), got " + std::to_string(cfg.fee));
    }
    if (cfg.effective_mode() == ArbMode::NoFee) {
        cfmm::Pool zero_fee = pool;
        zero_fee.fee = 0.0;
        return run_no_fee(path, zero_fee, cfg.record_events);
    }
    if (path.empty()) throw DomainError("empty price path");
    check_path_price(path[0], 0);

    ArbRun run;
    const double liquidity = pool.liquidity;
    cfmm::Pool state = pool;
    state.fee = cfg.fee;
    double p_amm = path[0];
    for (std::size_t t = 1; t < path.size(); ++t) {
        const double oracle = path[t];
        check_path_price(oracle, t);
        const Band band = no_trade_band(p_amm, cfg.fee, cfg.band_rule);
        const bool upward = oracle > band.upper;
        if (!upward && !(oracle < band.lower)) continue;

        const double target = cfg.target == ArbTarget::Oracle
                                  ? oracle
                                  : marginal_target(oracle, upward, cfg.fee, cfg.band_rule);
        const double lvr = metrics::lvr_step(liquidity, p_amm, target);
        const cfmm::SwapResult swap = cfmm::swap_between(state, p_amm, target);
        run.metrics.lvr += lvr;
        run.metrics.volume += swap.volume_x;
        run.metrics.fees += swap.fee_x;
        ++run.metrics.n_arb_events;
        run.waits.record(t);
        if (cfg.record_events) {
            run.events.push_back({t, p_amm, target, swap.volume_x, swap.fee_x, lvr});
        }
        state = swap.pool;
        p_amm = target;
    }
    run.metrics.final_price = p_amm;
    run.metrics.il = metrics::il_between(liquidity, path[0], p_amm);
    return run;
}

WaitStatistics arb_wait_statistics(std::span<const ArbEvent> events, std::uint64_t n_steps) {
    if (events.empty()) throw NoArbitrageError();
    std::vector<double> waits;
    waits.reserve(events.size());
    std::uint64_t last = 0;
    for (const ArbEvent& e : events) {
        if (e.step <= last && !waits.empty()) {
            throw DomainError("arbitrage events must have strictly increasing steps");
        }
        if (e.step > n_steps) throw DomainError("event step beyond the path length");
        waits.push_back(static_cast<double>(e.step - last));
        last = e.step;
    }
    const double max_wait = *std::max_element(waits.begin(), waits.end());
    stats::Histogram hist = stats::make_histogram(waits, static_cast<std::size_t>(max_wait), 0.5,
                                                  max_wait + 0.5);
    return {hist.moments.mean, std::move(hist)};
}

}  // namespace ammlab::arb
