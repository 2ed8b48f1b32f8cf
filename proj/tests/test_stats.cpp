#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "ammlab/error.hpp"
#include "ammlab/stats.hpp"

using namespace ammlab;
using namespace ammlab::stats;

namespace {

std::vector<double> exp_samples(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> d(2.0);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

// Two-pass textbook moments as an independent oracle.
Moments two_pass(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double m2 = 0.0, m3 = 0.0;
    for (double x : v) {
        m2 += (x - mean) * (x - mean);
        m3 += (x - mean) * (x - mean) * (x - mean);
    }
    return {mean, m2 / (n - 1.0), (m3 / n) / std::pow(m2 / n, 1.5)};
}

}  // namespace

TEST(Moments, MatchTwoPass) {
    const auto v = exp_samples(5000, 1);
    const Moments a = moments_of(v);
    const Moments b = two_pass(v);
    EXPECT_NEAR(a.mean, b.mean, 1e-12);
    EXPECT_NEAR(a.variance, b.variance, 1e-12);
    EXPECT_NEAR(a.skewness, b.skewness, 1e-10);
    // Exponential distribution: skewness 2.
    EXPECT_NEAR(a.skewness, 2.0, 0.25);
}

TEST(Moments, MergeEqualsSequential) {
    const auto v = exp_samples(3001, 2);
    MomentAccumulator all, left, right;
    for (std::size_t i = 0; i < v.size(); ++i) {
        all.add(v[i]);
        (i < 1234 ? left : right).add(v[i]);
    }
    left.merge(right);
    EXPECT_EQ(left.count(), all.count());
    EXPECT_NEAR(left.mean(), all.mean(), 1e-13);
    EXPECT_NEAR(left.moments().variance, all.moments().variance, 1e-12);
    EXPECT_NEAR(left.moments().skewness, all.moments().skewness, 1e-10);
    EXPECT_EQ(left.min(), all.min());
    EXPECT_EQ(left.max(), all.max());

    MomentAccumulator empty;
    empty.merge(all);
    EXPECT_EQ(empty.mean(), all.mean());
}

TEST(Moments, StderrScaling) {
    MomentAccumulator small, big;
    const auto v = exp_samples(40000, 3);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i < 10000) small.add(v[i]);
        big.add(v[i]);
    }
    EXPECT_NEAR(small.stderr_of_mean() / big.stderr_of_mean(), 2.0, 0.4);
}

TEST(Moments, Degenerate) {
    const std::vector<double> v(10, 3.0);
    const Moments m = moments_of(v);
    EXPECT_EQ(m.mean, 3.0);
    EXPECT_EQ(m.variance, 0.0);
    EXPECT_EQ(m.skewness, 0.0);
}

TEST(Histogram, Conservation) {
    const auto v = exp_samples(1000, 4);
    const Histogram h = make_histogram(v);
    ASSERT_EQ(h.counts.size(), kDefaultBins);
    ASSERT_EQ(h.edges.size(), kDefaultBins + 1);
    EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::uint64_t{0}), 1000u);
    EXPECT_EQ(h.n_total, 1000u);
    for (std::size_t i = 1; i < h.edges.size(); ++i) EXPECT_GT(h.edges[i], h.edges[i - 1]);
    EXPECT_GT(h.counts.back(), 0u);  // the maximum lands in the last bin
}

TEST(Histogram, ClampsOutOfRange) {
    const std::vector<double> v = {-5.0, 0.5, 1.5, 99.0};
    const Histogram h = make_histogram(v, 2, 0.0, 2.0);
    EXPECT_EQ(h.counts[0], 2u);
    EXPECT_EQ(h.counts[1], 2u);
}

TEST(Histogram, DegenerateSample) {
    const std::vector<double> v(7, 0.0);
    const Histogram h = make_histogram(v, 5);
    EXPECT_EQ(h.n_total, 7u);
    EXPECT_DOUBLE_EQ(h.edges.front(), -0.5);
    EXPECT_DOUBLE_EQ(h.edges.back(), 0.5);
}

TEST(Histogram, RejectsBadEdges) {
    EXPECT_THROW(make_histogram_with_edges({}, {1.0, 1.0}), DomainError);
    EXPECT_THROW(make_histogram({}, 0, 0.0, 1.0), DomainError);
}

TEST(Fit, ExactLine) {
    const std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 - 2.0 * v);
    const LinearFit f = linear_fit(x, y);
    EXPECT_NEAR(f.slope, -2.0, 1e-13);
    EXPECT_NEAR(f.intercept, 3.0, 1e-13);
    EXPECT_NEAR(f.slope_stderr, 0.0, 1e-10);
}

TEST(Fit, WeightsSelectPoints) {
    const std::vector<double> x = {0, 1, 2, 3};
    const std::vector<double> y = {0, 1, 2, 100};
    const std::vector<double> w = {1, 1, 1, 0};
    EXPECT_NEAR(linear_fit(x, y, w).slope, 1.0, 1e-12);
}

TEST(Fit, LogLogPowerLaw) {
    std::vector<double> x, y;
    for (double v : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        x.push_back(v);
        y.push_back(7.0 * std::pow(v, 1.5));
    }
    x.push_back(0.0);
    y.push_back(1.0);  // skipped
    EXPECT_NEAR(loglog_fit(x, y).slope, 1.5, 1e-12);
}

TEST(ChiSquare, HandComputed) {
    const std::vector<std::uint64_t> obs = {10, 20, 30};
    const std::vector<double> exp = {20, 20, 20};
    const ChiSquareResult r = chi_square(obs, exp);
    EXPECT_DOUBLE_EQ(r.statistic, 10.0);
    EXPECT_EQ(r.dof, 2u);
    // Two degrees of freedom: survival function exp(-x / 2).
    EXPECT_NEAR(r.p_value, std::exp(-5.0), 1e-12);
    EXPECT_EQ(chi_square(obs, exp, 1).dof, 1u);
}

TEST(Ks, KolmogorovSurvivalKnownValues) {
    EXPECT_NEAR(kolmogorov_survival(1.0), 0.26999967, 1e-7);
    EXPECT_NEAR(kolmogorov_survival(1.3581), 0.05, 2e-4);
    EXPECT_NEAR(kolmogorov_survival(0.0), 1.0, 1e-12);
}

TEST(Ks, OneSampleUniform) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u;
    std::vector<double> v(20000);
    for (auto& x : v) x = u(rng);
    const KsResult ok = ks_one_sample(v, [](double x) { return std::clamp(x, 0.0, 1.0); });
    EXPECT_GT(ok.p_value, 0.01);
    const KsResult bad = ks_one_sample(v, [](double x) { return std::clamp(x * x, 0.0, 1.0); });
    EXPECT_LT(bad.p_value, 1e-6);
}

TEST(Ks, TwoSample) {
    const auto a = exp_samples(5000, 7);
    const auto b = exp_samples(5000, 8);
    EXPECT_GT(ks_two_sample(a, b).p_value, 0.01);
    std::vector<double> shifted = b;
    for (auto& x : shifted) x += 0.1;
    EXPECT_LT(ks_two_sample(a, shifted).p_value, 1e-6);
}
