#include <gtest/gtest.h>

#include <cmath>

#include "ammlab/arbitrage.hpp"
#include "ammlab/error.hpp"
#include "ammlab/stats.hpp"

using namespace ammlab;
using namespace ammlab::arb;

namespace {

std::vector<double> gbm_path(double sigma, std::uint64_t steps, std::uint64_t seed) {
    return stochastic::generate_path({stochastic::ProcessKind::GBM, 100.0, sigma, steps, seed}).prices;
}

ArbitrageConfig fee_config(double fee, ArbTarget target = ArbTarget::Oracle,
                           BandRule rule = BandRule::Exact) {
    ArbitrageConfig cfg;
    cfg.fee = fee;
    cfg.mode = ArbMode::FeeBand;
    cfg.band_rule = rule;
    cfg.target = target;
    return cfg;
}

const cfmm::Pool kPool = cfmm::Pool::at_price(10000.0, 100.0);

}  // namespace

TEST(NoFee, ConstantPath) {
    const std::vector<double> path(100, 100.0);
    const ArbRun r = run_no_fee(path, kPool, true);
    EXPECT_EQ(r.metrics.lvr, 0.0);
    EXPECT_EQ(r.metrics.volume, 0.0);
    EXPECT_EQ(r.metrics.n_arb_events, 0u);
    EXPECT_TRUE(r.events.empty());
}

TEST(NoFee, SingleStep) {
    const std::vector<double> path = {100.0, 121.0};
    const ArbRun r = run_no_fee(path, kPool, true);
    ASSERT_EQ(r.events.size(), 1u);
    EXPECT_NEAR(r.events[0].volume_x, metrics::volume_step(10000.0, 100.0, 121.0), 1e-12);
    EXPECT_NEAR(r.events[0].volume_x, 90.9090909, 1e-6);
    EXPECT_EQ(r.events[0].step, 1u);
    EXPECT_NEAR(r.metrics.il, metrics::il_between(10000.0, 100.0, 121.0), 1e-12);
}

TEST(NoFee, AgreesWithMetricsAccumulate) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto path = gbm_path(0.01, 500, seed);
        const ArbRun r = run_no_fee(path, kPool);
        const metrics::RunMetrics m = metrics::accumulate(path, 10000.0);
        EXPECT_LE(std::abs(r.metrics.lvr - m.lvr), 1e-10 * m.lvr);
        EXPECT_LE(std::abs(r.metrics.volume - m.volume), 1e-10 * m.volume);
        EXPECT_LE(std::abs(r.metrics.il - m.il), 1e-10 * m.il + 1e-15);
        EXPECT_EQ(r.metrics.final_price, m.final_price);
    }
}

TEST(NoFee, RejectsNonPositivePrice) {
    const std::vector<double> path = {100.0, 90.0, -1.0, 100.0};
    try {
        run_no_fee(path, kPool);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("step 2"), std::string::npos);
    }
    EXPECT_THROW(run_no_fee(path, cfmm::Pool::at_price(10000.0, 100.0, 0.01)), DomainError);
}

TEST(Band, Edges) {
    const Band exact = no_trade_band(100.0, 0.01, BandRule::Exact);
    EXPECT_DOUBLE_EQ(exact.lower, 99.0);
    EXPECT_NEAR(exact.upper, 100.0 / 0.99, 1e-12);
    const Band lin = no_trade_band(100.0, 0.01, BandRule::Linearized);
    EXPECT_DOUBLE_EQ(lin.upper, 101.0);
}

TEST(WithFees, ZigZagInsideBandNeverTrades) {
    std::vector<double> path;
    for (int i = 0; i < 200; ++i) path.push_back(i % 2 ? 100.4 : 99.6);
    path.front() = 100.0;
    const ArbRun r = run_with_fees(path, kPool, fee_config(0.005));
    EXPECT_EQ(r.metrics.n_arb_events, 0u);
    EXPECT_EQ(r.metrics.lvr, 0.0);
    EXPECT_EQ(r.metrics.fees, 0.0);
    EXPECT_EQ(r.metrics.il, 0.0);
}

TEST(WithFees, FeesAreFeeTimesVolume) {
    const auto path = gbm_path(0.002, 2000, 3);
    const ArbRun r = run_with_fees(path, kPool, fee_config(0.003));
    EXPECT_GT(r.metrics.n_arb_events, 0u);
    EXPECT_NEAR(r.metrics.fees, 0.003 * r.metrics.volume, 1e-12 * r.metrics.volume);
}

TEST(WithFees, BandContainmentAfterEveryStep) {
    for (auto target : {ArbTarget::Oracle, ArbTarget::Marginal}) {
        for (auto rule : {BandRule::Exact, BandRule::Linearized}) {
            ArbitrageConfig cfg = fee_config(0.002, target, rule);
            cfg.record_events = true;
            const auto path = gbm_path(0.001, 3000, 17);
            const ArbRun r = run_with_fees(path, kPool, cfg);
            ASSERT_FALSE(r.events.empty());
            // Replay the AMM price from the events and check each oracle price.
            double p_amm = path[0];
            std::size_t next = 0;
            for (std::size_t t = 1; t < path.size(); ++t) {
                if (next < r.events.size() && r.events[next].step == t) p_amm = r.events[next++].p_amm_after;
                const Band b = no_trade_band(p_amm, cfg.fee, rule);
                EXPECT_GE(path[t], b.lower * (1.0 - 1e-12));
                EXPECT_LE(path[t], b.upper * (1.0 + 1e-12));
            }
        }
    }
}

TEST(WithFees, TinyFeeConvergesToNoFee) {
    stats::MomentAccumulator lvr0, lvrf, vol0, volf;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto path = gbm_path(0.001, 1000, seed);
        const ArbRun a = run_no_fee(path, kPool);
        const ArbRun b = run_with_fees(path, kPool, fee_config(1e-9));
        lvr0.add(a.metrics.lvr);
        lvrf.add(b.metrics.lvr);
        vol0.add(a.metrics.volume);
        volf.add(b.metrics.volume);
    }
    EXPECT_NEAR(lvrf.mean() / lvr0.mean(), 1.0, 1e-3);
    EXPECT_NEAR(volf.mean() / vol0.mean(), 1.0, 1e-3);
}

TEST(WithFees, ZeroFeeDelegatesToNoFee) {
    const auto path = gbm_path(0.001, 300, 2);
    ArbitrageConfig cfg = fee_config(0.0);
    const ArbRun a = run_with_fees(path, kPool, cfg);
    const ArbRun b = run_no_fee(path, kPool);
    EXPECT_EQ(a.metrics.lvr, b.metrics.lvr);
    EXPECT_EQ(a.metrics.n_arb_events, b.metrics.n_arb_events);
}

TEST(WithFees, FeesStayBelowNoFeeLvr) {
    // Band-edge arbitrage never trades at a loss, so fees stay below the
    // no-fee LVR at every fee level.
    for (double fee : {0.0001, 0.0005, 0.002, 0.01}) {
        stats::MomentAccumulator fees, lvr0;
        for (std::uint64_t seed = 0; seed < 400; ++seed) {
            const auto path = gbm_path(0.001, 1000, seed);
            fees.add(run_with_fees(path, kPool, fee_config(fee, ArbTarget::Marginal)).metrics.fees);
            lvr0.add(run_no_fee(path, kPool).metrics.lvr);
        }
        EXPECT_LT(fees.mean(), lvr0.mean()) << "fee " << fee;
    }
}

TEST(WithFees, OracleTargetFeesVersusNoFeeLvr) {
    // Jumping to the oracle overshoots break-even, so the ordering holds only
    // for fees below sigma and reverses once the band is wide.
    const auto mean_fees_over_lvr0 = [](double fee) {
        stats::MomentAccumulator fees, lvr0;
        for (std::uint64_t seed = 0; seed < 400; ++seed) {
            const auto path = gbm_path(0.001, 1000, seed);
            fees.add(run_with_fees(path, kPool, fee_config(fee)).metrics.fees);
            lvr0.add(run_no_fee(path, kPool).metrics.lvr);
        }
        return fees.mean() / lvr0.mean();
    };
    EXPECT_LT(mean_fees_over_lvr0(0.0001), 1.0);
    EXPECT_LT(mean_fees_over_lvr0(0.0003), 1.0);
    EXPECT_GT(mean_fees_over_lvr0(0.01), 1.0);
}

TEST(WithFees, OracleTargetKeepsLvrAndMarginalTargetCutsIt) {
    stats::MomentAccumulator lvr0, oracle, marginal;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const auto path = gbm_path(0.001, 1000, seed);
        lvr0.add(run_no_fee(path, kPool).metrics.lvr);
        oracle.add(run_with_fees(path, kPool, fee_config(0.003)).metrics.lvr);
        marginal.add(run_with_fees(path, kPool, fee_config(0.003, ArbTarget::Marginal)).metrics.lvr);
    }
    EXPECT_NEAR(oracle.mean() / lvr0.mean(), 1.0, 0.05);
    EXPECT_LT(marginal.mean() / lvr0.mean(), 0.5);
}

TEST(WithFees, LvrFeeCaseOnMatchedPaths) {
    // 10000 runs at sigma = 0.001, f = 2e-4, 1000 steps.
    stats::MomentAccumulator lvr0, lvrf, il0, ilf;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        const auto path = gbm_path(0.001, 1000, stochastic::derive_seed(1234, seed));
        const ArbRun a = run_no_fee(path, kPool);
        const ArbRun b = run_with_fees(path, kPool, fee_config(0.0002));
        lvr0.add(a.metrics.lvr);
        lvrf.add(b.metrics.lvr);
        il0.add(a.metrics.il);
        ilf.add(b.metrics.il);
    }
    EXPECT_LT(lvrf.mean(), lvr0.mean());
    EXPECT_NEAR(ilf.mean() / il0.mean(), 1.0, 0.05);
}

TEST(WaitStatistics, EveryStep) {
    std::vector<ArbEvent> events;
    for (std::uint64_t t = 1; t <= 10; ++t) events.push_back({t, 1.0, 1.0, 1.0, 0.0, 0.0});
    const WaitStatistics w = arb_wait_statistics(events, 10);
    EXPECT_DOUBLE_EQ(w.mean_wait, 1.0);
    EXPECT_EQ(w.histogram.n_total, 10u);
}

TEST(WaitStatistics, EmptyThrows) {
    EXPECT_THROW(arb_wait_statistics({}, 10), NoArbitrageError);
}

TEST(WaitStatistics, MatchesTally) {
    ArbitrageConfig cfg = fee_config(0.003);
    cfg.record_events = true;
    const auto path = gbm_path(0.001, 5000, 8);
    const ArbRun r = run_with_fees(path, kPool, cfg);
    const WaitStatistics w = arb_wait_statistics(r.events, 5000);
    EXPECT_NEAR(w.mean_wait, r.waits.sum_waits / static_cast<double>(r.waits.n_waits), 1e-12);
}

TEST(WaitStatistics, LinearInFeeForWideBands) {
    // After a band-edge trade the oracle sits on an edge, so the next exit
    // is a near/far barrier problem and the mean wait grows like f / sigma.
    const double sigma = 0.001;
    std::vector<double> fees, waits;
    for (double ratio : {10.0, 14.0, 20.0, 28.0, 40.0}) {
        const double fee = ratio * sigma;
        double sum = 0.0;
        std::uint64_t n = 0;
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            const auto path = gbm_path(sigma, 20000, stochastic::derive_seed(55, seed));
            const ArbRun r = run_with_fees(path, kPool, fee_config(fee, ArbTarget::Marginal));
            sum += r.waits.sum_waits;
            n += r.waits.n_waits;
        }
        fees.push_back(fee);
        waits.push_back(sum / static_cast<double>(n));
    }
    EXPECT_NEAR(stats::loglog_fit(fees, waits).slope, 1.0, 0.15);
}
