#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace ammlab::stats {

struct Moments {
    double mean{0.0};
    double variance{0.0};  // unbiased (n - 1)
    double skewness{0.0};  // g1 = m3 / m2^{3/2}, 0 for degenerate samples
};

// Streaming count/mean/central moments up to third order. Merging is exact in
// exact arithmetic; callers that need bit-identical output merge in a fixed
// order.
class MomentAccumulator {
public:
    void add(double x) noexcept;
    void merge(const MomentAccumulator& other) noexcept;

    std::uint64_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    Moments moments() const noexcept;
    double stderr_of_mean() const noexcept;
    double min() const noexcept { return min_; }
    double max() const noexcept { return max_; }

private:
    std::uint64_t n_{0};
    double mean_{0.0};
    double m2_{0.0};
    double m3_{0.0};
    double min_{0.0};
    double max_{0.0};
};

Moments moments_of(std::span<const double> values);

struct Histogram {
    std::vector<double> edges;          // strictly increasing, size = bins + 1
    std::vector<std::uint64_t> counts;  // size = bins
    std::uint64_t n_total{0};           // == sum(counts)
    Moments moments;
};

inline constexpr std::size_t kDefaultBins = 50;

// Uniform bins over [min, max] of the data. A degenerate sample (all values
// equal) gets a unit-wide range centred on the value.
Histogram make_histogram(std::span<const double> values, std::size_t bins = kDefaultBins);

// Uniform bins over an explicit range; values outside are clamped to the end
// bins so that counts always sum to n_total.
Histogram make_histogram(std::span<const double> values, std::size_t bins, double lo, double hi);

// Arbitrary strictly increasing edges; values outside are clamped.
Histogram make_histogram_with_edges(std::span<const double> values, std::vector<double> edges);

struct LinearFit {
    double slope{0.0};
    double intercept{0.0};
    double slope_stderr{0.0};
};

// Least squares y = intercept + slope * x, optionally weighted.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y,
                     std::span<const double> weights = {});

// Fit of log(y) against log(x); entries with non-positive x or y are skipped.
LinearFit loglog_fit(std::span<const double> x, std::span<const double> y);

struct ChiSquareResult {
    double statistic;
    std::size_t dof;
    double p_value;
};

// Pearson chi-square of observed counts against expected counts.
// dof = bins - 1 - fitted_parameters.
ChiSquareResult chi_square(std::span<const std::uint64_t> observed,
                           std::span<const double> expected, std::size_t fitted_parameters = 0);

struct KsResult {
    double statistic;
    double p_value;
};

// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov statistic.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Asymptotic Kolmogorov survival function Q(lambda).
double kolmogorov_survival(double lambda);

}  // namespace ammlab::stats
