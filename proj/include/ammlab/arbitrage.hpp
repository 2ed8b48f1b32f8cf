#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ammlab/cfmm.hpp"
#include "ammlab/metrics.hpp"
#include "ammlab/stats.hpp"

namespace ammlab::arb {

enum class ArbMode { NoFee, FeeBand };

// Upper band edge: EXACT uses p / (1 - f), LINEARIZED uses p (1 + f).
// The lower edge is p (1 - f) for both.
enum class BandRule { Exact, Linearized };

// Where the pool lands after an arbitrage.
//   Oracle:   spot moves to the external price.
//   Marginal: spot moves to the band-consistent price, leaving the external
//             price on the band edge (zero marginal profit net of fee).
enum class ArbTarget { Oracle, Marginal };

struct ArbitrageConfig {
    double fee{0.0};
    ArbMode mode{ArbMode::NoFee};
    BandRule band_rule{BandRule::Exact};
    ArbTarget target{ArbTarget::Oracle};
    bool record_events{false};

    // Fee zero collapses the band to a point regardless of `mode`.
    ArbMode effective_mode() const noexcept {
        return fee > 0.0 ? mode : ArbMode::NoFee;
    }
};

struct ArbEvent {
    std::uint64_t step;  // path index of the oracle price that triggered it
    double p_amm_before;
    double p_amm_after;
    double volume_x;
    double fee_x;
    double lvr_increment;
};

// Inter-event step counts, kept even when full events are not recorded.
struct WaitTally {
    std::uint64_t last_event_step{0};
    std::uint64_t n_waits{0};
    double sum_waits{0.0};

    void record(std::uint64_t step) noexcept;
};

struct ArbRun {
    metrics::RunMetrics metrics;
    std::vector<ArbEvent> events;  // empty unless record_events
    WaitTally waits;
};

struct Band {
    double lower;
    double upper;
};

Band no_trade_band(double p_amm, double fee, BandRule rule);

// Pool follows the oracle every step. Requires pool.fee == 0.
ArbRun run_no_fee(std::span<const double> path, const cfmm::Pool& pool,
                  bool record_events = false);

// Pool trades only when the oracle leaves the no-trade band. A zero fee
// delegates to run_no_fee.
ArbRun run_with_fees(std::span<const double> path, const cfmm::Pool& pool,
                     const ArbitrageConfig& cfg);

struct WaitStatistics {
    double mean_wait;
    stats::Histogram histogram;  // unit-width bins over the observed waits
};

// Mean number of steps between consecutive events; the first wait is counted
// from step 0. Throws NoArbitrageError for an empty list.
WaitStatistics arb_wait_statistics(std::span<const ArbEvent> events, std::uint64_t n_steps);

}  // namespace ammlab::arb
