#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ammlab/arbitrage.hpp"
#include "ammlab/metrics.hpp"
#include "ammlab/stats.hpp"
#include "ammlab/stochastic.hpp"

namespace ammlab::harness {

enum class Regime { Short, Intermediate, Long };

// SHORT for sigma^2 T <= 0.01, LONG for sigma^2 T >= 1, else INTERMEDIATE.
Regime classify_regime(double sigma, std::uint64_t n_steps) noexcept;
std::string_view to_string(Regime r) noexcept;

enum class SweepAxis { Fee, Sigma, Steps };
std::string_view to_string(SweepAxis a) noexcept;

struct SweepSpec {
    SweepAxis axis{SweepAxis::Fee};
    std::vector<double> values;
    // Steps axis only: rescale sigma so sigma^2 * n_steps stays at this value.
    std::optional<double> total_variance;
};

struct ExperimentConfig {
    stochastic::PriceProcessSpec process;  // process.seed is ignored
    double liquidity{10000.0};
    double fee{0.0};
    std::uint64_t n_runs{1000};
    std::uint64_t seed{42};  // campaign seed; run r uses derive_seed(seed, r)
    arb::BandRule band_rule{arb::BandRule::Exact};
    arb::ArbTarget target{arb::ArbTarget::Oracle};
    std::optional<SweepSpec> sweep;

    std::size_t bins{stats::kDefaultBins};
    bool histograms{true};
    // Streaming keeps no per-run table; histograms then take a second pass.
    bool streaming{false};
    std::uint64_t memory_budget_bytes{std::uint64_t{1} << 30};
    unsigned threads{0};
};

// Validates ranges; throws DomainError naming the offending field.
void validate(const ExperimentConfig& cfg);

struct MetricSummary {
    double mean{0.0};
    double stderr_of_mean{0.0};
    double stddev{0.0};
    double skewness{0.0};
    double min{0.0};
    double max{0.0};
};

struct CampaignSummary {
    std::uint64_t n_runs{0};
    MetricSummary il, lvr, volume, fees, lvr_net, il_net, n_arb_events, final_price;
    double mean_wait{0.0};  // NaN when no arbitrage happened
    double frac_il_net_negative{0.0};
    Regime regime{Regime::Short};
};

// Metric names in fixed output order.
inline constexpr std::string_view kMetricNames[] = {
    "il", "lvr", "volume", "fees", "lvr_net", "il_net", "n_arb_events", "final_price"};

const MetricSummary& metric(const CampaignSummary& s, std::string_view name);

struct CampaignResult {
    std::vector<metrics::RunMetrics> runs;          // indexed by run; empty if streaming
    std::map<std::string, stats::Histogram> histograms;  // keyed by metric name
    CampaignSummary summary;
};

// Bytes the per-run table of `cfg` would occupy.
std::uint64_t table_bytes(const ExperimentConfig& cfg) noexcept;

// Deterministic in cfg (including seed), independent of thread count.
// Throws ResourceError when the table exceeds the memory budget and streaming
// is off.
CampaignResult run_campaign(const ExperimentConfig& cfg);

struct SweepRow {
    double value;  // grid value on the swept axis
    double sigma;
    std::uint64_t n_steps;
    double fee;
    CampaignSummary summary;
};

struct SweepResult {
    SweepAxis axis{SweepAxis::Fee};
    std::vector<SweepRow> rows;
    std::map<std::string, stats::LinearFit> fits;
    std::map<std::string, double> scalars;
};

// Mean volume against sigma at fixed n_steps (fee forced to zero).
SweepResult sweep_volume_vs_sigma(const ExperimentConfig& base, std::span<const double> sigmas);

// Mean volume against n_steps. With total_variance set, sigma is rescaled so
// that sigma^2 * n_steps stays at that value; otherwise sigma is held fixed.
SweepResult sweep_volume_vs_steps(const ExperimentConfig& base,
                                  std::span<const std::uint64_t> steps,
                                  std::optional<double> total_variance);

// Per-fee campaign summaries, tail slopes over f / sigma >= 10 and the fee at
// which the mean wait between arbitrages reaches 2 steps.
SweepResult sweep_fee(const ExperimentConfig& base, std::span<const double> fees);

// Dispatches on base.sweep.
SweepResult run_sweep(const ExperimentConfig& base);

}  // namespace ammlab::harness
