#include "ammlab/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "ammlab/cfmm.hpp"
#include "ammlab/error.hpp"
#include "ammlab/parallel.hpp"

namespace ammlab::harness {
namespace {

constexpr std::size_t kChunkRuns = 256;
constexpr std::size_t kMetricCount = std::size(kMetricNames);
constexpr double kFeeTailRatio = 10.0;

using Accumulators = std::array<stats::MomentAccumulator, kMetricCount>;

std::array<double, kMetricCount> metric_values(const metrics::RunMetrics& m) {
    return {m.il,
            m.lvr,
            m.volume,
            m.fees,
            m.lvr_net_of_fees(),
            m.il_net_of_fees(),
            static_cast<double>(m.n_arb_events),
            m.final_price};
}

struct ChunkResult {
    Accumulators acc;
    double wait_sum{0.0};
    std::uint64_t wait_count{0};
    std::uint64_t il_net_negative{0};
};

struct RunOutcome {
    metrics::RunMetrics metrics;
    arb::WaitTally waits;
};

class RunSimulator {
public:
    explicit RunSimulator(const ExperimentConfig& cfg) : cfg_(cfg) {
        arb_.fee = cfg.fee;
        arb_.mode = cfg.fee > 0.0 ? arb::ArbMode::FeeBand : arb::ArbMode::NoFee;
        arb_.band_rule = cfg.band_rule;
        arb_.target = cfg.target;
        pool_ = cfmm::Pool::at_price(cfg.liquidity, cfg.process.p0, cfg.fee);
    }

    RunOutcome run(std::uint64_t index, std::vector<double>& buffer) const {
        stochastic::PriceProcessSpec spec = cfg_.process;
        spec.seed = stochastic::derive_seed(cfg_.seed, index);
        stochastic::generate_path_into(spec, buffer);
        arb::ArbRun r = arb_.effective_mode() == arb::ArbMode::NoFee
                            ? arb::run_no_fee(buffer, zero_fee_pool())
                            : arb::run_with_fees(buffer, pool_, arb_);
        return {r.metrics, r.waits};
    }

private:
    cfmm::Pool zero_fee_pool() const {
        cfmm::Pool p = pool_;
        p.fee = 0.0;
        return p;
    }

    const ExperimentConfig& cfg_;
    arb::ArbitrageConfig arb_;
    cfmm::Pool pool_;
};

MetricSummary summarize(const stats::MomentAccumulator& acc) {
    const stats::Moments m = acc.moments();
    MetricSummary s;
    s.mean = m.mean;
    s.stderr_of_mean = acc.stderr_of_mean();
    s.stddev = std::sqrt(m.variance);
    s.skewness = m.skewness;
    s.min = acc.min();
    s.max = acc.max();
    return s;
}

MetricSummary& metric_mut(CampaignSummary& s, std::size_t i) {
    MetricSummary* fields[] = {&s.il,     &s.lvr,    &s.volume,       &s.fees,
                               &s.lvr_net, &s.il_net, &s.n_arb_events, &s.final_price};
    return *fields[i];
}

std::pair<double, double> histogram_range(const stats::MomentAccumulator& acc) {
    double lo = acc.min();
    double hi = acc.max();
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    return {lo, hi};
}

// Same binning rule as stats::make_histogram over an explicit range.
std::size_t bin_of(double v, double lo, double width, std::size_t bins) {
    const double pos = (v - lo) / width;
    if (pos >= static_cast<double>(bins)) return bins - 1;
    if (pos > 0.0) return static_cast<std::size_t>(pos);
    return 0;
}

}  // namespace

Regime classify_regime(double sigma, std::uint64_t n_steps) noexcept {
    const double x = sigma * sigma * static_cast<double>(n_steps);
    // Boundary values such as sigma = 0.1, T = 1 land a few ulps off 0.01.
    constexpr double kTol = 1e-12;
    if (x <= 0.01 * (1.0 + kTol)) return Regime::Short;
    if (x >= 1.0 - kTol) return Regime::Long;
    return Regime::Intermediate;
}

std::string_view to_string(Regime r) noexcept {
    switch (r) {
        case Regime::Short: return "SHORT";
        case Regime::Intermediate: return "INTERMEDIATE";
        case Regime::Long: return "LONG";
    }
    return "UNKNOWN";
}

std::string_view to_string(SweepAxis a) noexcept {
    switch (a) {
        case SweepAxis::Fee: return "fee";
        case SweepAxis::Sigma: return "sigma";
        case SweepAxis::Steps: return "steps";
    }
    return "unknown";
}

const MetricSummary& metric(const CampaignSummary& s, std::string_view name) {
    for (std::size_t i = 0; i < kMetricCount; ++i) {
        if (kMetricNames[i] == name) return metric_mut(const_cast<CampaignSummary&>(s), i);
    }
    throw DomainError("unknown metric '" + std::string(name) + "'");
}

void validate(const ExperimentConfig& cfg) {
    if (!(cfg.process.p0 > 0.0)) throw DomainError("p0 must be positive");
    if (!(cfg.process.sigma >= 0.0)) throw DomainError("sigma must be non-negative");
    if (cfg.process.n_steps < 1) throw DomainError("steps must be at least 1");
    if (!(cfg.liquidity > 0.0)) throw DomainError("liquidity must be positive");
    if (!(cfg.fee >= 0.0 && cfg.fee < 1.0)) throw DomainError("fee must lie in [0, 1)");
    if (cfg.n_runs < 1) throw DomainError("runs must be at least 1");
    if (cfg.bins < 1) throw DomainError("bins must be at least 1");
}

std::uint64_t table_bytes(const ExperimentConfig& cfg) noexcept {
    // Table plus one scratch column per histogram while binning.
    return cfg.n_runs * (sizeof(metrics::RunMetrics) + (cfg.histograms ? sizeof(double) : 0));
}

CampaignResult run_campaign(const ExperimentConfig& cfg) {
    validate(cfg);
    if (!cfg.streaming && table_bytes(cfg) > cfg.memory_budget_bytes) {
        throw ResourceError("campaign table needs " + std::to_string(table_bytes(cfg)) +
                            " bytes, above the memory budget of " +
                            std::to_string(cfg.memory_budget_bytes) +
                            "; enable streaming or raise the budget");
    }

    const RunSimulator sim(cfg);
    const std::size_t n_chunks = (cfg.n_runs + kChunkRuns - 1) / kChunkRuns;
    auto chunk_bounds = [&](std::size_t c) {
        const std::uint64_t begin = c * kChunkRuns;
        return std::pair{begin, std::min<std::uint64_t>(begin + kChunkRuns, cfg.n_runs)};
    };

    CampaignResult result;
    if (!cfg.streaming) result.runs.resize(cfg.n_runs);

    std::vector<ChunkResult> chunks(n_chunks);
    parallel_for(n_chunks, cfg.threads, [&](std::size_t c) {
        std::vector<double> buffer;
        ChunkResult& out = chunks[c];
        const auto [begin, end] = chunk_bounds(c);
        for (std::uint64_t r = begin; r < end; ++r) {
            const RunOutcome o = sim.run(r, buffer);
            const auto values = metric_values(o.metrics);
            for (std::size_t i = 0; i < kMetricCount; ++i) out.acc[i].add(values[i]);
            out.wait_sum += o.waits.sum_waits;
            out.wait_count += o.waits.n_waits;
            if (o.metrics.il_net_of_fees() < 0.0) ++out.il_net_negative;
            if (!cfg.streaming) result.runs[r] = o.metrics;
        }
    });

    Accumulators total;
    double wait_sum = 0.0;
    std::uint64_t wait_count = 0;
    std::uint64_t il_net_negative = 0;
    for (const ChunkResult& c : chunks) {
        for (std::size_t i = 0; i < kMetricCount; ++i) total[i].merge(c.acc[i]);
        wait_sum += c.wait_sum;
        wait_count += c.wait_count;
        il_net_negative += c.il_net_negative;
    }

    CampaignSummary& s = result.summary;
    s.n_runs = cfg.n_runs;
    for (std::size_t i = 0; i < kMetricCount; ++i) metric_mut(s, i) = summarize(total[i]);
    s.mean_wait = wait_count > 0 ? wait_sum / static_cast<double>(wait_count)
                                 : std::numeric_limits<double>::quiet_NaN();
    s.frac_il_net_negative =
        static_cast<double>(il_net_negative) / static_cast<double>(cfg.n_runs);
    s.regime = classify_regime(cfg.process.sigma, cfg.process.n_steps);

    if (!cfg.histograms) return result;

    std::array<std::pair<double, double>, kMetricCount> ranges;
    for (std::size_t i = 0; i < kMetricCount; ++i) ranges[i] = histogram_range(total[i]);

    std::array<std::vector<std::uint64_t>, kMetricCount> counts;
    if (!cfg.streaming) {
        std::vector<double> column(cfg.n_runs);
        for (std::size_t i = 0; i < kMetricCount; ++i) {
            for (std::uint64_t r = 0; r < cfg.n_runs; ++r) column[r] = metric_values(result.runs[r])[i];
            stats::Histogram h =
                stats::make_histogram(column, cfg.bins, ranges[i].first, ranges[i].second);
            counts[i] = std::move(h.counts);
        }
    } else {
        // Second pass regenerates every run from its seed.
        std::vector<std::array<std::vector<std::uint64_t>, kMetricCount>> partial(n_chunks);
        parallel_for(n_chunks, cfg.threads, [&](std::size_t c) {
            std::vector<double> buffer;
            auto& local = partial[c];
            for (auto& v : local) v.assign(cfg.bins, 0);
            const auto [begin, end] = chunk_bounds(c);
            for (std::uint64_t r = begin; r < end; ++r) {
                const auto values = metric_values(sim.run(r, buffer).metrics);
                for (std::size_t i = 0; i < kMetricCount; ++i) {
                    const auto [lo, hi] = ranges[i];
                    const double width = (hi - lo) / static_cast<double>(cfg.bins);
                    ++local[i][bin_of(values[i], lo, width, cfg.bins)];
                }
            }
        });
        for (auto& v : counts) v.assign(cfg.bins, 0);
        for (const auto& local : partial) {
            for (std::size_t i = 0; i < kMetricCount; ++i) {
                for (std::size_t b = 0; b < cfg.bins; ++b) counts[i][b] += local[i][b];
            }
        }
    }

    for (std::size_t i = 0; i < kMetricCount; ++i) {
        stats::Histogram h = stats::make_histogram({}, cfg.bins, ranges[i].first, ranges[i].second);
        h.counts = std::move(counts[i]);
        h.n_total = cfg.n_runs;
        h.moments = total[i].moments();
        result.histograms.emplace(std::string(kMetricNames[i]), std::move(h));
    }
    return result;
}

namespace {

ExperimentConfig sweep_point(const ExperimentConfig& base) {
    ExperimentConfig cfg = base;
    cfg.sweep.reset();
    cfg.histograms = false;
    cfg.streaming = true;
    return cfg;
}

std::vector<double> column(const SweepResult& r, std::string_view name,
                           bool (*keep)(const SweepRow&) = nullptr) {
    std::vector<double> out;
    for (const SweepRow& row : r.rows) {
        if (keep && !keep(row)) continue;
        out.push_back(metric(row.summary, name).mean);
    }
    return out;
}

void fit_if_possible(SweepResult& r, const std::string& name, std::span<const double> x,
                     std::span<const double> y) {
    std::size_t usable = 0;
    for (std::size_t i = 0; i < x.size(); ++i) usable += (x[i] > 0.0 && y[i] > 0.0) ? 1 : 0;
    if (usable >= 2) r.fits[name] = stats::loglog_fit(x, y);
}

}  // namespace

SweepResult sweep_volume_vs_sigma(const ExperimentConfig& base, std::span<const double> sigmas) {
    SweepResult out;
    out.axis = SweepAxis::Sigma;
    for (const double sigma : sigmas) {
        ExperimentConfig cfg = sweep_point(base);
        cfg.fee = 0.0;
        cfg.process.sigma = sigma;
        out.rows.push_back({sigma, sigma, cfg.process.n_steps, 0.0, run_campaign(cfg).summary});
    }
    std::vector<double> x(sigmas.begin(), sigmas.end());
    const auto vol = column(out, "volume");
    fit_if_possible(out, "volume_loglog", x, vol);
    fit_if_possible(out, "lvr_loglog", x, column(out, "lvr"));
    if (x.size() >= 2) out.fits["volume_linear"] = stats::linear_fit(x, vol);
    return out;
}

SweepResult sweep_volume_vs_steps(const ExperimentConfig& base,
                                  std::span<const std::uint64_t> steps,
                                  std::optional<double> total_variance) {
    if (total_variance && !(*total_variance >= 0.0)) {
        throw DomainError("total variance must be non-negative");
    }
    SweepResult out;
    out.axis = SweepAxis::Steps;
    std::vector<double> x;
    for (const std::uint64_t n : steps) {
        ExperimentConfig cfg = sweep_point(base);
        cfg.fee = 0.0;
        cfg.process.n_steps = n;
        if (total_variance) cfg.process.sigma = std::sqrt(*total_variance / static_cast<double>(n));
        out.rows.push_back({static_cast<double>(n), cfg.process.sigma, n, 0.0,
                            run_campaign(cfg).summary});
        x.push_back(static_cast<double>(n));
    }
    fit_if_possible(out, "volume_loglog", x, column(out, "volume"));
    const auto lvr = column(out, "lvr");
    fit_if_possible(out, "lvr_loglog", x, lvr);
    if (!lvr.empty()) {
        const auto [mn, mx] = std::minmax_element(lvr.begin(), lvr.end());
        double mean = 0.0;
        for (double v : lvr) mean += v;
        mean /= static_cast<double>(lvr.size());
        out.scalars["lvr_relative_spread"] = mean > 0.0 ? (*mx - *mn) / mean : 0.0;
    }
    if (total_variance) out.scalars["total_variance"] = *total_variance;
    return out;
}

SweepResult sweep_fee(const ExperimentConfig& base, std::span<const double> fees) {
    SweepResult out;
    out.axis = SweepAxis::Fee;
    const double sigma = base.process.sigma;
    for (const double f : fees) {
        ExperimentConfig cfg = sweep_point(base);
        cfg.fee = f;
        out.rows.push_back({f, sigma, cfg.process.n_steps, f, run_campaign(cfg).summary});
    }

    // Tail: f / (sigma sqrt(dt)) >= 10, dt = 1.
    std::vector<double> tail_f, tail_vol, tail_lvr;
    for (const SweepRow& row : out.rows) {
        if (sigma > 0.0 && row.fee / sigma >= kFeeTailRatio) {
            tail_f.push_back(row.fee);
            tail_vol.push_back(row.summary.volume.mean);
            tail_lvr.push_back(row.summary.lvr.mean);
        }
    }
    fit_if_possible(out, "volume_loglog_tail", tail_f, tail_vol);
    fit_if_possible(out, "lvr_loglog_tail", tail_f, tail_lvr);

    // Crossover: log-interpolated fee where mean_wait crosses 2.
    double crossover = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 1; i < out.rows.size(); ++i) {
        const SweepRow& a = out.rows[i - 1];
        const SweepRow& b = out.rows[i];
        const double wa = a.summary.mean_wait;
        const double wb = b.summary.mean_wait;
        if (!(a.fee > 0.0 && b.fee > 0.0) || !std::isfinite(wa) || !std::isfinite(wb)) continue;
        if ((wa - 2.0) * (wb - 2.0) <= 0.0 && wa != wb) {
            const double w = (2.0 - wa) / (wb - wa);
            crossover = std::exp(std::log(a.fee) + w * (std::log(b.fee) - std::log(a.fee)));
            break;
        }
    }
    out.scalars["crossover_fee"] = crossover;

    if (out.rows.size() >= 2) {
        const auto lowest = std::min_element(out.rows.begin(), out.rows.end(),
                                             [](const SweepRow& a, const SweepRow& b) { return a.fee < b.fee; });
        const auto highest = std::max_element(out.rows.begin(), out.rows.end(),
                                              [](const SweepRow& a, const SweepRow& b) { return a.fee < b.fee; });
        auto reduction = [&](std::string_view name) {
            const double ref = metric(lowest->summary, name).mean;
            return ref != 0.0 ? 1.0 - metric(highest->summary, name).mean / ref : 0.0;
        };
        out.scalars["lvr_reduction"] = reduction("lvr");
        out.scalars["il_reduction"] = reduction("il");
    }
    return out;
}

SweepResult run_sweep(const ExperimentConfig& base) {
    if (!base.sweep) throw DomainError("configuration has no sweep axis");
    const SweepSpec& spec = *base.sweep;
    switch (spec.axis) {
        case SweepAxis::Sigma: return sweep_volume_vs_sigma(base, spec.values);
        case SweepAxis::Fee: return sweep_fee(base, spec.values);
        case SweepAxis::Steps: {
            std::vector<std::uint64_t> steps;
            for (double v : spec.values) {
                if (!(v >= 1.0) || std::floor(v) != v) throw DomainError("step grid needs positive integers");
                steps.push_back(static_cast<std::uint64_t>(v));
            }
            return sweep_volume_vs_steps(base, steps, spec.total_variance);
        }
    }
    throw DomainError("unknown sweep axis");
}

}  // namespace ammlab::harness
