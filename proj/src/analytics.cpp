#include "ammlab/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ammlab/error.hpp"
#include "ammlab/parallel.hpp"

namespace ammlab::analytics {
namespace {

namespace quad = boost::math::quadrature;

constexpr double kBmTailSigmas = 10.0;
constexpr double kGbmTailSigmas = 12.0;
constexpr double kQuadratureRelTol = 1e-10;

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(name) + " must be positive and finite, got " +
                          std::to_string(v));
    }
}

void validate(const ILDistParams& p) {
    require_positive(p.p0, "p0");
    require_positive(p.liquidity, "liquidity");
    require_positive(p.sigma, "sigma");
    require_positive(p.t, "t");
}

double price_density(double price, const ILDistParams& p) {
    if (p.process == ProcessKind::BM) return stochastic::pdf_bm(price, p.p0, p.sigma, p.t);
    if (!(price > 0.0)) return 0.0;
    return stochastic::pdf_gbm(price, p.p0, p.sigma, p.t);
}

// Density in q contributed by one inverse branch (no domain truncation).
double branch_q_density(double q, Branch branch, const ILDistParams& p) {
    if (branch == Branch::Below) {
        const double s = 1.0 + q;
        return price_density(p.p0 / (s * s), p) * 2.0 * p.p0 / (s * s * s);
    }
    if (q >= 1.0) return 0.0;
    const double s = 1.0 - q;
    return price_density(p.p0 / (s * s), p) * 2.0 * p.p0 / (s * s * s);
}

struct Domain {
    double q_max_below;
    double q_max_above;
    double q_scale;
};

// Price window [p_lo, p_hi] mapped to q on each branch. BM is cut at
// p0 +- 10 sd (and never below a tiny positive price); GBM at 12 sd in log.
Domain domain_of(const ILDistParams& p) {
    const double sd = p.sigma * std::sqrt(p.t);
    double p_lo = 0.0;
    double p_hi = 0.0;
    if (p.process == ProcessKind::BM) {
        p_lo = std::max(p.p0 * (1.0 - kBmTailSigmas * sd), p.p0 * 1e-12);
        p_hi = p.p0 * (1.0 + kBmTailSigmas * sd);
    } else {
        const double m = -0.5 * sd * sd;
        p_lo = p.p0 * std::exp(m - kGbmTailSigmas * sd);
        p_hi = p.p0 * std::exp(m + kGbmTailSigmas * sd);
    }
    return {std::sqrt(p.p0 / p_lo) - 1.0, 1.0 - std::sqrt(p.p0 / p_hi), 0.5 * sd};
}

struct Integral {
    double value{0.0};
    double error{0.0};
};

// Adaptive Gauss-Kronrod over [0, q_max], split at geometric breakpoints so
// the peak near q = 0 is never straddled by a single huge panel.
template <typename F>
Integral integrate_q(F&& f, double q_max, double q_scale) {
    Integral total;
    if (!(q_max > 0.0)) return total;
    double a = 0.0;
    double b = std::min(q_max, 0.25 * q_scale);
    while (true) {
        double err = 0.0;
        const double v = quad::gauss_kronrod<double, 31>::integrate(f, a, b, 12, kQuadratureRelTol, &err);
        total.value += v;
        total.error += err;
        if (b >= q_max) break;
        a = b;
        b = std::min(q_max, 2.0 * b);
    }
    return total;
}

template <typename G>
Integral integrate_both_branches(G&& moment, const ILDistParams& p, const Domain& d) {
    const auto below = integrate_q(
        [&](double q) { return moment(q) * branch_q_density(q, Branch::Below, p); },
        d.q_max_below, d.q_scale);
    const auto above = integrate_q(
        [&](double q) { return moment(q) * branch_q_density(q, Branch::Above, p); },
        d.q_max_above, d.q_scale);
    return {below.value + above.value, below.error + above.error};
}

void check_converged(const Integral& r, const char* what) {
    const double tol = 1e-8 * std::abs(r.value) + 1e-300;
    if (!(r.error <= tol) || !std::isfinite(r.value)) {
        throw NumericalError(std::string(what) + ": quadrature did not converge (error estimate " +
                                 std::to_string(r.error) + ")",
                             r.error);
    }
}

}  // namespace

double expected_lvr(double liquidity, double p0, double sigma, double t) {
    require_positive(liquidity, "liquidity");
    require_positive(p0, "p0");
    if (!(sigma >= 0.0)) throw DomainError("sigma must be non-negative");
    if (!(t >= 0.0)) throw DomainError("t must be non-negative");
    return liquidity * sigma * sigma * t / (4.0 * std::sqrt(p0));
}

bool outside_intermediate_regime(double sigma, double t) noexcept {
    return sigma * sigma * t >= 1.0;
}

double lvr_ode_rhs(double liquidity, double sigma_abs, double p) {
    require_positive(liquidity, "liquidity");
    require_positive(p, "price");
    if (!(sigma_abs >= 0.0)) throw DomainError("sigma must be non-negative");
    return liquidity * sigma_abs * sigma_abs / (4.0 * std::pow(p, 2.5));
}

double invert_il(double p0, double liquidity, double il, Branch branch) {
    require_positive(p0, "p0");
    require_positive(liquidity, "liquidity");
    if (!(il >= 0.0) || !std::isfinite(il)) throw DomainError("il must be non-negative");
    const double q = std::pow(p0, 0.25) * std::sqrt(il / liquidity);
    if (branch == Branch::Below) {
        const double s = 1.0 + q;
        return p0 / (s * s);
    }
    if (q >= 1.0) {
        throw DomainError("no price above p0 reaches il >= L / sqrt(p0)");
    }
    const double s = 1.0 - q;
    return p0 / (s * s);
}

double il_pdf(double il, const ILDistParams& params) {
    validate(params);
    if (!(il > 0.0)) throw DomainError("il_pdf is defined for il > 0, got " + std::to_string(il));
    const double p0 = params.p0;
    const double root_p0 = std::pow(p0, 0.25);
    const double q = root_p0 * std::sqrt(il / params.liquidity);
    const double prefactor = std::pow(p0, 1.25) / (std::sqrt(il) * std::sqrt(params.liquidity));

    const double s_below = 1.0 + q;
    double density =
        prefactor * price_density(p0 / (s_below * s_below), params) / (s_below * s_below * s_below);
    if (il < params.liquidity / std::sqrt(p0)) {
        const double s_above = 1.0 - q;
        density += prefactor * price_density(p0 / (s_above * s_above), params) /
                   (s_above * s_above * s_above);
    }
    return density;
}

double expected_il_quadrature(const ILDistParams& params) {
    validate(params);
    const Domain d = domain_of(params);
    const double scale = params.liquidity / std::sqrt(params.p0);
    const Integral r = integrate_both_branches([&](double q) { return scale * q * q; }, params, d);
    check_converged(r, "expected IL");
    return r.value;
}

// ---------------------------------------------------------------------------

SmallIlLaw fit_small_il_law(const ILDistParams& params, double il_lo, double il_hi,
                            std::size_t n_points) {
    validate(params);
    if (!(il_lo > 0.0 && il_hi > il_lo) || n_points < 3) {
        throw DomainError("small-IL fit needs 0 < il_lo < il_hi and at least 3 points");
    }
    const double width = 2.0 * params.sigma * params.sigma * params.t;
    std::vector<double> x(n_points), y(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(n_points - 1);
        const double il = il_lo * std::pow(il_hi / il_lo, frac);
        x[i] = il / width;
        y[i] = std::log(il_pdf(il, params) * std::sqrt(il));
    }
    const stats::LinearFit fit = stats::linear_fit(x, y);
    SmallIlLaw law{std::exp(fit.intercept), -fit.slope, 0.0};
    for (std::size_t i = 0; i < n_points; ++i) {
        const double model = fit.intercept + fit.slope * x[i];
        law.max_rel_residual = std::max(law.max_rel_residual, std::abs(std::expm1(y[i] - model)));
    }
    return law;
}

ILDistribution::ILDistribution(const ILDistParams& params)
    : params_(params), scale_(0.0), q_max_below_(0.0), q_max_above_(0.0) {
    validate(params_);
    scale_ = params_.liquidity / std::sqrt(params_.p0);
    const Domain d = domain_of(params_);
    q_max_below_ = d.q_max_below;
    q_max_above_ = d.q_max_above;

    const Integral mass = integrate_both_branches([](double) { return 1.0; }, params_, d);
    const Integral first =
        integrate_both_branches([&](double q) { return scale_ * q * q; }, params_, d);
    const Integral second = integrate_both_branches(
        [&](double q) {
            const double il = scale_ * q * q;
            return il * il;
        },
        params_, d);
    check_converged(mass, "IL distribution mass");
    check_converged(first, "IL distribution mean");
    check_converged(second, "IL distribution second moment");
    mean_ = first.value / mass.value;
    variance_ = second.value / mass.value - mean_ * mean_;

    // CDF on log-spaced knots in q.
    const double q_hi = std::max(q_max_below_, q_max_above_);
    const double q_lo = std::min(1e-7 * d.q_scale, 1e-3 * q_hi);
    const double log_ratio = std::log(q_hi / q_lo) / static_cast<double>(kKnots - 1);
    const auto g = [this](double q) { return q_density(q); };

    std::vector<double> q(kKnots);
    std::vector<double> cdf(kKnots);
    double acc = quad::gauss<double, 15>::integrate(g, 0.0, q_lo);
    q[0] = q_lo;
    cdf[0] = acc;
    for (std::size_t k = 1; k < kKnots; ++k) {
        q[k] = k + 1 == kKnots ? q_hi : q_lo * std::exp(log_ratio * static_cast<double>(k));
        acc += quad::gauss<double, 15>::integrate(g, q[k - 1], q[k]);
        cdf[k] = acc;
    }
    tabulated_mass_ = acc;
    if (!(acc > 0.0) || !std::isfinite(acc)) {
        throw NumericalError("IL CDF tabulation failed: non-positive total mass", acc);
    }
    if (std::abs(acc - mass.value) > 1e-8 * mass.value) {
        throw NumericalError("IL CDF tabulation disagrees with adaptive mass",
                             std::abs(acc - mass.value));
    }

    // Keep knots where the normalised CDF strictly increases.
    knot_q_.push_back(q[0]);
    knot_cdf_.push_back(cdf[0] / acc);
    for (std::size_t k = 1; k < kKnots; ++k) {
        const double f = cdf[k] / acc;
        if (f > knot_cdf_.back()) {
            knot_q_.push_back(q[k]);
            knot_cdf_.push_back(f);
        }
    }

    // Fritsch-Carlson limited Hermite slopes for q(F), seeded with dq/dF = 1/g.
    const std::size_t n = knot_q_.size();
    std::vector<double> secant(n > 1 ? n - 1 : 0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        secant[k] = (knot_q_[k + 1] - knot_q_[k]) / (knot_cdf_[k + 1] - knot_cdf_[k]);
    }
    knot_slope_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double dens = q_density(knot_q_[k]) / acc;
        double m = dens > 0.0 ? 1.0 / dens : std::numeric_limits<double>::infinity();
        if (!std::isfinite(m)) m = k < secant.size() ? secant[k] : secant.back();
        knot_slope_[k] = m;
    }
    for (std::size_t k = 0; k < secant.size(); ++k) {
        const double a = knot_slope_[k] / secant[k];
        const double b = knot_slope_[k + 1] / secant[k];
        const double r = a * a + b * b;
        if (r > 9.0) {
            const double tau = 3.0 / std::sqrt(r);
            knot_slope_[k] = tau * a * secant[k];
            knot_slope_[k + 1] = tau * b * secant[k];
        }
    }
}

double ILDistribution::q_density(double q) const noexcept {
    double g = 0.0;
    if (q <= q_max_below_) g += branch_q_density(q, Branch::Below, params_);
    if (q <= q_max_above_) g += branch_q_density(q, Branch::Above, params_);
    return g;
}

double ILDistribution::il_of_q(double q) const noexcept { return scale_ * q * q; }

double ILDistribution::q_of_il(double il) const noexcept { return std::sqrt(il / scale_); }

double ILDistribution::cdf(double il) const {
    if (!(il > 0.0)) return 0.0;
    const double q = q_of_il(il);
    if (q >= knot_q_.back()) return 1.0;
    const auto g = [this](double x) { return q_density(x); };
    const double total = tabulated_mass_;
    auto it = std::upper_bound(knot_q_.begin(), knot_q_.end(), q);
    if (it == knot_q_.begin()) {
        return quad::gauss<double, 15>::integrate(g, 0.0, q) / total;
    }
    const std::size_t k = static_cast<std::size_t>(it - knot_q_.begin()) - 1;
    return knot_cdf_[k] + quad::gauss<double, 15>::integrate(g, knot_q_[k], q) / total;
}

double ILDistribution::q_of_uniform(double u) const {
    if (u <= knot_cdf_.front()) return knot_q_.front() * u / knot_cdf_.front();
    if (u >= knot_cdf_.back()) return knot_q_.back();
    auto it = std::upper_bound(knot_cdf_.begin(), knot_cdf_.end(), u);
    const std::size_t k = static_cast<std::size_t>(it - knot_cdf_.begin()) - 1;
    const double h = knot_cdf_[k + 1] - knot_cdf_[k];
    const double s = (u - knot_cdf_[k]) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2.0 * s3 - 3.0 * s2 + 1.0) * knot_q_[k] + (s3 - 2.0 * s2 + s) * h * knot_slope_[k] +
           (-2.0 * s3 + 3.0 * s2) * knot_q_[k + 1] + (s3 - s2) * h * knot_slope_[k + 1];
}

double ILDistribution::draw(double u) const { return il_of_q(q_of_uniform(u)); }

double ILDistribution::quantile(double u) const {
    if (!(u >= 0.0 && u < 1.0)) throw DomainError("quantile needs u in [0, 1)");
    return il_of_q(q_of_uniform(u));
}

std::vector<double> ILDistribution::sample(std::size_t n, std::uint64_t seed) const {
    std::mt19937_64 engine(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<double> out(n);
    for (auto& v : out) v = il_of_q(q_of_uniform(uniform(engine)));
    return out;
}

std::vector<double> sample_il(const ILDistParams& params, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw DomainError("sample_il needs n >= 1");
    return ILDistribution(params).sample(n, seed);
}

stats::Histogram clt_sum_experiment(const ILDistParams& params, std::size_t n_per_sum,
                                    std::size_t n_repeats, std::uint64_t seed, std::size_t bins,
                                    unsigned threads) {
    if (n_per_sum < 1 || n_repeats < 1) throw DomainError("clt_sum_experiment needs n >= 1");
    const ILDistribution dist(params);
    std::vector<double> sums(n_repeats);
    parallel_for(n_repeats, threads, [&](std::size_t r) {
        std::mt19937_64 engine(stochastic::derive_seed(seed, r));
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        double sum = 0.0;
        for (std::size_t i = 0; i < n_per_sum; ++i) sum += dist.draw(uniform(engine));
        sums[r] = sum;
    });
    return stats::make_histogram(sums, bins);
}

FirstPassage first_passage(const BarrierSpec& spec, std::size_t n_walks, std::uint64_t seed,
                           unsigned threads) {
    if (!(spec.lower < 0.0 && spec.upper > 0.0)) {
        throw DomainError("barriers must satisfy lower < 0 < upper");
    }
    if (n_walks < 1) throw DomainError("first_passage needs n_walks >= 1");

    std::vector<double> steps(n_walks);
    std::vector<unsigned char> hit_lower(n_walks);
    parallel_for(n_walks, threads, [&](std::size_t w) {
        std::mt19937_64 engine(stochastic::derive_seed(seed, w));
        std::uint64_t n = 0;
        double pos = 0.0;
        if (spec.step_kind == StepKind::Unit) {
            std::uint64_t bits = 0;
            int left = 0;
            while (pos > spec.lower && pos < spec.upper) {
                if (left == 0) {
                    bits = engine();
                    left = 64;
                }
                pos += (bits & 1U) ? 1.0 : -1.0;
                bits >>= 1U;
                --left;
                ++n;
            }
        } else {
            std::normal_distribution<double> normal(0.0, 1.0);
            while (pos > spec.lower && pos < spec.upper) {
                pos += normal(engine);
                ++n;
            }
        }
        steps[w] = static_cast<double>(n);
        hit_lower[w] = pos <= spec.lower ? 1 : 0;
    });

    stats::MomentAccumulator acc;
    std::size_t lower_hits = 0;
    for (std::size_t w = 0; w < n_walks; ++w) {
        acc.add(steps[w]);
        lower_hits += hit_lower[w];
    }
    return {acc.mean(), acc.stderr_of_mean(),
            static_cast<double>(lower_hits) / static_cast<double>(n_walks)};
}

}  // namespace ammlab::analytics
