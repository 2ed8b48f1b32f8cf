#include "ammlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "ammlab/error.hpp"

namespace ammlab::stats {

void MomentAccumulator::add(double x) noexcept {
    if (n_ == 0) {
        min_ = max_ = x;
    } else {
        min_ = std::min(min_, x);
        max_ = std::max(max_, x);
    }
    const double n1 = static_cast<double>(n_);
    ++n_;
    const double n = static_cast<double>(n_);
    const double delta = x - mean_;
    const double delta_n = delta / n;
    const double term1 = delta * delta_n * n1;
    mean_ += delta_n;
    m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
    m2_ += term1;
}

void MomentAccumulator::merge(const MomentAccumulator& other) noexcept {
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double n = na + nb;
    const double delta = other.mean_ - mean_;
    const double delta2 = delta * delta;

    const double m3 = m3_ + other.m3_ + delta * delta2 * na * nb * (na - nb) / (n * n) +
                      3.0 * delta * (na * other.m2_ - nb * m2_) / n;
    const double m2 = m2_ + other.m2_ + delta2 * na * nb / n;

    mean_ += delta * nb / n;
    m2_ = m2;
    m3_ = m3;
    n_ += other.n_;
    min_ = std::min(min_, other.min_);
    max_ = std::max(max_, other.max_);
}

Moments MomentAccumulator::moments() const noexcept {
    Moments m;
    m.mean = mean_;
    if (n_ > 1) m.variance = m2_ / static_cast<double>(n_ - 1);
    if (n_ > 2 && m2_ > 0.0) {
        const double n = static_cast<double>(n_);
        const double c2 = m2_ / n;
        const double c3 = m3_ / n;
        m.skewness = c3 / std::pow(c2, 1.5);
    }
    return m;
}

double MomentAccumulator::stderr_of_mean() const noexcept {
    if (n_ < 2) return 0.0;
    return std::sqrt(moments().variance / static_cast<double>(n_));
}

Moments moments_of(std::span<const double> values) {
    Moments m;
    const std::size_t n = values.size();
    if (n == 0) return m;
    m.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    double c2 = 0.0;
    double c3 = 0.0;
    for (double v : values) {
        const double d = v - m.mean;
        c2 += d * d;
        c3 += d * d * d;
    }
    if (n > 1) m.variance = c2 / static_cast<double>(n - 1);
    if (n > 2 && c2 > 0.0) {
        const double dn = static_cast<double>(n);
        m.skewness = (c3 / dn) / std::pow(c2 / dn, 1.5);
    }
    return m;
}

Histogram make_histogram_with_edges(std::span<const double> values, std::vector<double> edges) {
    if (edges.size() < 2) throw DomainError("histogram needs at least one bin");
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (!(edges[i] > edges[i - 1])) throw DomainError("histogram edges must be strictly increasing");
    }
    Histogram h;
    h.counts.assign(edges.size() - 1, 0);
    for (double v : values) {
        auto it = std::upper_bound(edges.begin(), edges.end(), v);
        std::size_t bin = it == edges.begin() ? 0 : static_cast<std::size_t>(it - edges.begin()) - 1;
        bin = std::min(bin, h.counts.size() - 1);
        ++h.counts[bin];
    }
    h.edges = std::move(edges);
    h.n_total = values.size();
    h.moments = moments_of(values);
    return h;
}

Histogram make_histogram(std::span<const double> values, std::size_t bins, double lo, double hi) {
    if (bins == 0) throw DomainError("histogram needs at least one bin");
    if (!(hi > lo)) throw DomainError("histogram range must have hi > lo");
    std::vector<double> edges(bins + 1);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i) edges[i] = lo + width * static_cast<double>(i);
    edges.back() = hi;

    Histogram h;
    h.counts.assign(bins, 0);
    for (double v : values) {
        double pos = (v - lo) / width;
        std::size_t bin = 0;
        if (pos >= static_cast<double>(bins)) {
            bin = bins - 1;
        } else if (pos > 0.0) {
            bin = static_cast<std::size_t>(pos);
        }
        ++h.counts[bin];
    }
    h.edges = std::move(edges);
    h.n_total = values.size();
    h.moments = moments_of(values);
    return h;
}

Histogram make_histogram(std::span<const double> values, std::size_t bins) {
    double lo = 0.0;
    double hi = 1.0;
    if (!values.empty()) {
        const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
        lo = *mn;
        hi = *mx;
    }
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    return make_histogram(values, bins, lo, hi);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y,
                     std::span<const double> weights) {
    if (x.size() != y.size() || (!weights.empty() && weights.size() != x.size())) {
        throw DomainError("linear_fit: mismatched input lengths");
    }
    if (x.size() < 2) throw DomainError("linear_fit needs at least two points");

    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        sw += w;
        sx += w * x[i];
        sy += w * y[i];
    }
    const double mx = sx / sw;
    const double my = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        sxx += w * (x[i] - mx) * (x[i] - mx);
        sxy += w * (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw DomainError("linear_fit: x values are all equal");

    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double w = weights.empty() ? 1.0 : weights[i];
            const double r = y[i] - fit.intercept - fit.slope * x[i];
            rss += w * r * r;
        }
        fit.slope_stderr = std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx);
    }
    return fit;
}

LinearFit loglog_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("loglog_fit: mismatched input lengths");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    return linear_fit(lx, ly);
}

ChiSquareResult chi_square(std::span<const std::uint64_t> observed,
                           std::span<const double> expected, std::size_t fitted_parameters) {
    if (observed.size() != expected.size()) throw DomainError("chi_square: mismatched bins");
    if (observed.size() < 2 + fitted_parameters) throw DomainError("chi_square: too few bins");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!(expected[i] > 0.0)) throw DomainError("chi_square: expected counts must be positive");
        const double d = static_cast<double>(observed[i]) - expected[i];
        stat += d * d / expected[i];
    }
    const std::size_t dof = observed.size() - 1 - fitted_parameters;
    const boost::math::chi_squared dist(static_cast<double>(dof));
    return {stat, dof, boost::math::cdf(boost::math::complement(dist, stat))};
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 200; ++j) {
        const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double ks_pvalue(double d, double effective_n) {
    const double root = std::sqrt(effective_n);
    return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}

}  // namespace

KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw DomainError("ks_one_sample: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return {d, ks_pvalue(d, n)};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return {d, ks_pvalue(d, na * nb / (na + nb))};
}

}  // namespace ammlab::stats
