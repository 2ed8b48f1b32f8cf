#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ammlab/analytics.hpp"
#include "ammlab/arbitrage.hpp"
#include "ammlab/harness.hpp"

namespace ammlab::config {

enum class ProcessChoice { GBM, BM, Both };

// Every tunable of the command-line tool. The text form is a flat list of
// `key = value` lines; see to_config_text for the canonical spelling.
struct Settings {
    ProcessChoice process{ProcessChoice::GBM};
    double p0{100.0};
    double liquidity{10000.0};
    double sigma{0.001};
    std::uint64_t steps{1000};
    double fee{0.0};
    std::uint64_t runs{1000};
    std::uint64_t seed{42};
    arb::BandRule band{arb::BandRule::Exact};
    arb::ArbTarget target{arb::ArbTarget::Oracle};
    std::size_t bins{stats::kDefaultBins};
    bool histograms{true};
    bool streaming{false};
    std::uint64_t memory_budget{std::uint64_t{1} << 30};

    // Sweep grid; empty selects the default grid for the axis.
    std::vector<double> values;
    bool fixed_total_vol{false};

    // Analytic commands.
    double t{1000.0};
    std::uint64_t samples{100000};
    std::uint64_t n_per_sum{10000};
    std::uint64_t repeats{1000};
    std::uint64_t grid_points{2001};
    double lower{-10.0};
    double upper{10.0};
    analytics::StepKind step{analytics::StepKind::Unit};
    std::uint64_t walks{10000};
    // Barrier half-widths k; non-empty runs (-k, k) and (-k, 1) for each k.
    std::vector<double> barrier_grid;
};

// Keys in canonical order.
const std::vector<std::string_view>& keys();

// Sets one key from its text value. Throws ConfigError carrying `line`.
void apply(Settings& s, std::string_view key, std::string_view value, int line = 0);

// Parses a key/value document on top of `base`. Blank lines and text after
// '#' are ignored. Unknown or repeated keys are errors.
Settings parse_config(std::string_view text, Settings base = {});

// Canonical document: every key, fixed order, doubles with 17 significant
// digits. parse_config(to_config_text(s)) == s.
std::string to_config_text(const Settings& s);

bool operator==(const Settings& a, const Settings& b);

// Named parameter sets for the figures of the study.
const std::vector<std::string_view>& preset_names();
// Throws ConfigError for an unknown name.
Settings preset(std::string_view name);

std::string_view to_string(ProcessChoice p) noexcept;

// Campaign configuration for one process of `s`.
harness::ExperimentConfig to_experiment(const Settings& s, stochastic::ProcessKind kind,
                                        unsigned threads = 0);

// Requires s.process to name a single process.
stochastic::ProcessKind single_process(const Settings& s);

analytics::ILDistParams il_params(const Settings& s);

// Grid used by a sweep: s.values, or the default grid for the axis.
std::vector<double> sweep_grid(const Settings& s, harness::SweepAxis axis);

// Checks cross-field constraints; throws ConfigError naming the field.
void validate(const Settings& s);

}  // namespace ammlab::config
