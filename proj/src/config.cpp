#include "ammlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "ammlab/error.hpp"
#include "ammlab/output.hpp"

namespace ammlab::config {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text, int line) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        throw ConfigError(std::string(key), line, "expected a finite number, got '" + std::string(text) + "'");
    }
    return v;
}

std::uint64_t parse_uint(std::string_view key, std::string_view text, int line) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError(std::string(key), line,
                          "expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return v;
}

bool parse_bool(std::string_view key, std::string_view text, int line) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(std::string(key), line, "expected true or false, got '" + std::string(text) + "'");
}

std::vector<double> parse_list(std::string_view key, std::string_view text, int line) {
    std::vector<double> out;
    text = trim(text);
    if (text.empty()) return out;
    while (true) {
        const auto comma = text.find(',');
        out.push_back(parse_double(key, trim(text.substr(0, comma)), line));
        if (comma == std::string_view::npos) break;
        text = text.substr(comma + 1);
    }
    return out;
}

template <typename T>
T parse_enum(std::string_view key, std::string_view text, int line,
             std::initializer_list<std::pair<std::string_view, T>> choices) {
    std::string allowed;
    for (const auto& [name, value] : choices) {
        if (text == name) return value;
        allowed += (allowed.empty() ? "" : ", ") + std::string(name);
    }
    throw ConfigError(std::string(key), line,
                      "expected one of " + allowed + ", got '" + std::string(text) + "'");
}

void require(bool ok, std::string_view key, int line, const std::string& message) {
    if (!ok) throw ConfigError(std::string(key), line, message);
}

std::string list_text(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ",";
        out += output::format_double(v[i]);
    }
    return out;
}

struct KeySpec {
    std::string_view name;
    std::function<void(Settings&, std::string_view, int)> set;
    std::function<std::string(const Settings&)> get;
};

const std::vector<KeySpec>& key_specs() {
    using output::format_double;
    static const std::vector<KeySpec> specs = {
        {"process",
         [](Settings& s, std::string_view v, int line) {
             s.process = parse_enum<ProcessChoice>(
                 "process", v, line,
                 {{"gbm", ProcessChoice::GBM}, {"bm", ProcessChoice::BM}, {"both", ProcessChoice::Both}});
         },
         [](const Settings& s) { return std::string(to_string(s.process)); }},
        {"p0",
         [](Settings& s, std::string_view v, int line) {
             s.p0 = parse_double("p0", v, line);
             require(s.p0 > 0.0, "p0", line, "must be positive");
         },
         [](const Settings& s) { return format_double(s.p0); }},
        {"liquidity",
         [](Settings& s, std::string_view v, int line) {
             s.liquidity = parse_double("liquidity", v, line);
             require(s.liquidity > 0.0, "liquidity", line, "must be positive");
         },
         [](const Settings& s) { return format_double(s.liquidity); }},
        {"sigma",
         [](Settings& s, std::string_view v, int line) {
             s.sigma = parse_double("sigma", v, line);
             require(s.sigma >= 0.0, "sigma", line, "must be non-negative");
         },
         [](const Settings& s) { return format_double(s.sigma); }},
        {"steps",
         [](Settings& s, std::string_view v, int line) {
             s.steps = parse_uint("steps", v, line);
             require(s.steps >= 1, "steps", line, "must be at least 1");
         },
         [](const Settings& s) { return std::to_string(s.steps); }},
        {"fee",
         [](Settings& s, std::string_view v, int line) {
             s.fee = parse_double("fee", v, line);
             require(s.fee >= 0.0 && s.fee < 1.0, "fee", line, "must lie in [0, 1)");
         },
         [](const Settings& s) { return format_double(s.fee); }},
        {"runs",
         [](Settings& s, std::string_view v, int line) {
             s.runs = parse_uint("runs", v, line);
             require(s.runs >= 1, "runs", line, "must be at least 1");
         },
         [](const Settings& s) { return std::to_string(s.runs); }},
        {"seed", [](Settings& s, std::string_view v, int line) { s.seed = parse_uint("seed", v, line); },
         [](const Settings& s) { return std::to_string(s.seed); }},
        {"band",
         [](Settings& s, std::string_view v, int line) {
             s.band = parse_enum<arb::BandRule>(
                 "band", v, line, {{"exact", arb::BandRule::Exact}, {"linearized", arb::BandRule::Linearized}});
         },
         [](const Settings& s) {
             return std::string(s.band == arb::BandRule::Exact ? "exact" : "linearized");
         }},
        {"target",
         [](Settings& s, std::string_view v, int line) {
             s.target = parse_enum<arb::ArbTarget>(
                 "target", v, line, {{"oracle", arb::ArbTarget::Oracle}, {"marginal", arb::ArbTarget::Marginal}});
         },
         [](const Settings& s) {
             return std::string(s.target == arb::ArbTarget::Oracle ? "oracle" : "marginal");
         }},
        {"bins",
         [](Settings& s, std::string_view v, int line) {
             s.bins = parse_uint("bins", v, line);
             require(s.bins >= 1, "bins", line, "must be at least 1");
         },
         [](const Settings& s) { return std::to_string(s.bins); }},
        {"histograms",
         [](Settings& s, std::string_view v, int line) { s.histograms = parse_bool("histograms", v, line); },
         [](const Settings& s) { return std::string(s.histograms ? "true" : "false"); }},
        {"streaming",
         [](Settings& s, std::string_view v, int line) { s.streaming = parse_bool("streaming", v, line); },
         [](const Settings& s) { return std::string(s.streaming ? "true" : "false"); }},
        {"memory_budget",
         [](Settings& s, std::string_view v, int line) { s.memory_budget = parse_uint("memory_budget", v, line); },
         [](const Settings& s) { return std::to_string(s.memory_budget); }},
        {"values",
         [](Settings& s, std::string_view v, int line) {
             s.values = parse_list("values", v, line);
             for (double x : s.values) require(x >= 0.0, "values", line, "grid values must be non-negative");
         },
         [](const Settings& s) { return list_text(s.values); }},
        {"fixed_total_vol",
         [](Settings& s, std::string_view v, int line) {
             s.fixed_total_vol = parse_bool("fixed_total_vol", v, line);
         },
         [](const Settings& s) { return std::string(s.fixed_total_vol ? "true" : "false"); }},
        {"t",
         [](Settings& s, std::string_view v, int line) {
             s.t = parse_double("t", v, line);
             require(s.t >= 0.0, "t", line, "must be non-negative");
         },
         [](const Settings& s) { return format_double(s.t); }},
        {"samples",
         [](Settings& s, std::string_view v, int line) {
             s.samples = parse_uint("samples", v, line);
             require(s.samples >= 1, "samples", line, "must be at least 1");
         },
         [](const Settings& s) { return std::to_string(s.samples); }},
        {"n_per_sum",
         [](Settings& s, std::string_view v, int line) {
             s.n_per_sum = parse_uint("n_per_sum", v, line);
             require(s.n_per_sum >= 1, "n_per_sum", line, "must be at least 1");
         },
         [](const Settings& s) { return std::to_string(s.n_per_sum); }},
        {"repeats",
         [](Settings& s, std::string_view v, int line) {
             s.repeats = parse_uint("repeats", v, line);
             require(s.repeats >= 1, "repeats", line, "must be at least 1");
         },
         [](const Settings& s) { return std::to_string(s.repeats); }},
        {"grid_points",
         [](Settings& s, std::string_view v, int line) {
             s.grid_points = parse_uint("grid_points", v, line);
             require(s.grid_points >= 2, "grid_points", line, "must be at least 2");
         },
         [](const Settings& s) { return std::to_string(s.grid_points); }},
        {"lower",
         [](Settings& s, std::string_view v, int line) {
             s.lower = parse_double("lower", v, line);
             require(s.lower < 0.0, "lower", line, "must be negative");
         },
         [](const Settings& s) { return format_double(s.lower); }},
        {"upper",
         [](Settings& s, std::string_view v, int line) {
             s.upper = parse_double("upper", v, line);
             require(s.upper > 0.0, "upper", line, "must be positive");
         },
         [](const Settings& s) { return format_double(s.upper); }},
        {"step",
         [](Settings& s, std::string_view v, int line) {
             s.step = parse_enum<analytics::StepKind>(
                 "step", v, line,
                 {{"unit", analytics::StepKind::Unit}, {"gaussian", analytics::StepKind::Gaussian}});
         },
         [](const Settings& s) {
             return std::string(s.step == analytics::StepKind::Unit ? "unit" : "gaussian");
         }},
        {"walks",
         [](Settings& s, std::string_view v, int line) {
             s.walks = parse_uint("walks", v, line);
             require(s.walks >= 1, "walks", line, "must be at least 1");
         },
         [](const Settings& s) { return std::to_string(s.walks); }},
        {"barrier_grid",
         [](Settings& s, std::string_view v, int line) {
             s.barrier_grid = parse_list("barrier_grid", v, line);
             for (double k : s.barrier_grid) {
                 require(k >= 1.0, "barrier_grid", line, "barrier half-widths must be at least 1");
             }
         },
         [](const Settings& s) { return list_text(s.barrier_grid); }},
    };
    return specs;
}

const KeySpec& find_key(std::string_view key, int line) {
    for (const auto& spec : key_specs()) {
        if (spec.name == key) return spec;
    }
    throw ConfigError(std::string(key), line, "unknown key");
}

using PresetEntries = std::vector<std::pair<std::string_view, std::string_view>>;

const std::map<std::string_view, PresetEntries>& preset_table() {
    static const std::map<std::string_view, PresetEntries> table = {
        {"fig-bm-vs-gbm-short",
         {{"process", "both"}, {"sigma", "0.001"}, {"steps", "200"}, {"runs", "40000"}}},
        {"fig-bm-vs-gbm-long",
         {{"process", "both"}, {"sigma", "0.015"}, {"steps", "200"}, {"runs", "40000"}}},
        {"fig-lvril-nofee", {{"process", "gbm"}, {"sigma", "0.001"}, {"steps", "1000"}, {"runs", "40000"}}},
        {"fig-lvr-longtime", {{"process", "gbm"}, {"sigma", "0.02"}, {"steps", "1000"}, {"runs", "10000"}}},
        {"fig-sumil",
         {{"process", "bm"}, {"sigma", "0.1"}, {"t", "1"}, {"n_per_sum", "10000"}, {"repeats", "1000"}}},
        {"fig-rwbarrier", {{"step", "unit"}, {"walks", "10000"}, {"barrier_grid", "2,3,5,10,20,30"}}},
        {"fig-lvrfee",
         {{"process", "gbm"}, {"sigma", "0.001"}, {"fee", "0.0002"}, {"steps", "1000"}, {"runs", "10000"}}},
        {"fig-volvsfee", {{"process", "gbm"}, {"sigma", "0.004"}, {"steps", "1000"}, {"runs", "5000"}}},
        {"fig-lvr-vs-fee", {{"process", "gbm"}, {"target", "marginal"}, {"sigma", "0.0002"}, {"steps", "1000"}, {"runs", "10000"}}},
        {"fig-volsim-sigma",
         {{"process", "gbm"}, {"steps", "1000"}, {"runs", "4000"}, {"values", "0.00025,0.0005,0.001,0.002,0.004"}}},
        {"fig-volsim-steps",
         {{"process", "gbm"},
          {"sigma", "0.001"},
          {"steps", "1000"},
          {"runs", "4000"},
          {"values", "125,250,500,1000"},
          {"fixed_total_vol", "true"}}},
        // Absolute volatility 0.01 on p0 = 100 with x0 = 100 units of token x.
        {"bm-absolute-vol",
         {{"process", "bm"},
          {"p0", "100"},
          {"liquidity", "1000"},
          {"sigma", "0.0001"},
          {"steps", "5000"},
          {"t", "5000"},
          {"runs", "40000"}}},
    };
    return table;
}

// Multiples of sigma spanning both fee regimes.
constexpr double kFeeGridRatios[] = {0.0, 0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 14.0, 20.0};
constexpr double kSigmaGrid[] = {0.00025, 0.0005, 0.001, 0.002, 0.004};
constexpr double kStepsGrid[] = {125, 250, 500, 1000};

}  // namespace

const std::vector<std::string_view>& keys() {
    static const std::vector<std::string_view> names = [] {
        std::vector<std::string_view> out;
        for (const auto& spec : key_specs()) out.push_back(spec.name);
        return out;
    }();
    return names;
}

void apply(Settings& s, std::string_view key, std::string_view value, int line) {
    find_key(key, line).set(s, trim(value), line);
}

Settings parse_config(std::string_view text, Settings base) {
    std::set<std::string, std::less<>> seen;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("", line_no, "expected 'key = value', got '" + std::string(line) + "'");
        }
        const std::string_view key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("", line_no, "missing key before '='");
        if (!seen.insert(std::string(key)).second) {
            throw ConfigError(std::string(key), line_no, "key given more than once");
        }
        apply(base, key, line.substr(eq + 1), line_no);
    }
    return base;
}

std::string to_config_text(const Settings& s) {
    std::string out;
    for (const auto& spec : key_specs()) {
        out += std::string(spec.name) + " = " + spec.get(s) + "\n";
    }
    return out;
}

bool operator==(const Settings& a, const Settings& b) {
    return to_config_text(a) == to_config_text(b);
}

const std::vector<std::string_view>& preset_names() {
    static const std::vector<std::string_view> names = [] {
        std::vector<std::string_view> out;
        for (const auto& [name, entries] : preset_table()) out.push_back(name);
        return out;
    }();
    return names;
}

Settings preset(std::string_view name) {
    const auto& table = preset_table();
    const auto it = table.find(name);
    if (it == table.end()) {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + std::string(n);
        throw ConfigError("preset", 0, "unknown preset '" + std::string(name) + "' (known: " + known + ")");
    }
    Settings s;
    for (const auto& [key, value] : it->second) apply(s, key, value);
    return s;
}

std::string_view to_string(ProcessChoice p) noexcept {
    switch (p) {
        case ProcessChoice::GBM: return "gbm";
        case ProcessChoice::BM: return "bm";
        case ProcessChoice::Both: return "both";
    }
    return "gbm";
}

harness::ExperimentConfig to_experiment(const Settings& s, stochastic::ProcessKind kind,
                                        unsigned threads) {
    harness::ExperimentConfig cfg;
    cfg.process.kind = kind;
    cfg.process.p0 = s.p0;
    cfg.process.sigma = s.sigma;
    cfg.process.n_steps = s.steps;
    cfg.liquidity = s.liquidity;
    cfg.fee = s.fee;
    cfg.n_runs = s.runs;
    cfg.seed = s.seed;
    cfg.band_rule = s.band;
    cfg.target = s.target;
    cfg.bins = s.bins;
    cfg.histograms = s.histograms;
    cfg.streaming = s.streaming;
    cfg.memory_budget_bytes = s.memory_budget;
    cfg.threads = threads;
    return cfg;
}

stochastic::ProcessKind single_process(const Settings& s) {
    switch (s.process) {
        case ProcessChoice::GBM: return stochastic::ProcessKind::GBM;
        case ProcessChoice::BM: return stochastic::ProcessKind::BM;
        case ProcessChoice::Both: break;
    }
    throw ConfigError("process", 0, "this command needs a single process (bm or gbm)");
}

analytics::ILDistParams il_params(const Settings& s) {
    analytics::ILDistParams p;
    p.p0 = s.p0;
    p.liquidity = s.liquidity;
    p.sigma = s.sigma;
    p.t = s.t;
    p.process = single_process(s);
    return p;
}

std::vector<double> sweep_grid(const Settings& s, harness::SweepAxis axis) {
    if (!s.values.empty()) return s.values;
    switch (axis) {
        case harness::SweepAxis::Fee: {
            std::vector<double> fees;
            for (double k : kFeeGridRatios) fees.push_back(k * s.sigma);
            return fees;
        }
        case harness::SweepAxis::Sigma: return {std::begin(kSigmaGrid), std::end(kSigmaGrid)};
        case harness::SweepAxis::Steps: return {std::begin(kStepsGrid), std::end(kStepsGrid)};
    }
    return {};
}

void validate(const Settings& s) {
    require(s.lower < 0.0 && s.upper > 0.0, "lower", 0, "barriers must satisfy lower < 0 < upper");
}

}  // namespace ammlab::config
