#include "ammlab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ammlab/analytics.hpp"
#include "ammlab/error.hpp"
#include "ammlab/harness.hpp"

namespace ammlab::cli {
namespace {

using output::CsvTable;
using output::Json;

const std::vector<std::string> kSummaryColumns = {"process", "metric", "mean", "stderr",
                                                  "stddev", "skewness", "min", "max"};
const std::vector<std::string> kScalarColumns = {"process", "name", "value"};
const std::vector<std::string> kRunColumns = {"process", "run",  "il",           "lvr",
                                              "volume",  "fees", "n_arb_events", "final_price"};
const std::vector<std::string> kIlPdfColumns = {"il", "sqrt_il", "pdf", "pdf_sqrt_il"};
const std::vector<std::string> kSampleColumns = {"index", "il"};
const std::vector<std::string> kFirstPassageColumns = {
    "shape",      "k",            "lower",      "upper",           "step",
    "n_walks",    "mean_steps",   "stderr_steps", "frac_lower",    "expected_mean_steps",
    "expected_frac_lower"};

std::vector<std::string> sweep_columns() {
    std::vector<std::string> cols = {"value", "sigma", "n_steps", "fee", "regime"};
    for (const auto name : harness::kMetricNames) {
        cols.push_back(std::string(name) + "_mean");
        cols.push_back(std::string(name) + "_stderr");
    }
    cols.push_back("mean_wait");
    cols.push_back("frac_il_net_negative");
    return cols;
}

std::string join(const std::vector<std::string>& cols) {
    std::string out;
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    return out;
}

std::string_view process_name(stochastic::ProcessKind k) {
    return k == stochastic::ProcessKind::BM ? "bm" : "gbm";
}

std::vector<stochastic::ProcessKind> processes_of(const config::Settings& s) {
    switch (s.process) {
        case config::ProcessChoice::GBM: return {stochastic::ProcessKind::GBM};
        case config::ProcessChoice::BM: return {stochastic::ProcessKind::BM};
        case config::ProcessChoice::Both: return {stochastic::ProcessKind::BM, stochastic::ProcessKind::GBM};
    }
    return {};
}

Json metric_json(const harness::MetricSummary& m) {
    return {{"mean", m.mean},         {"stderr", m.stderr_of_mean}, {"stddev", m.stddev},
            {"skewness", m.skewness}, {"min", m.min},               {"max", m.max}};
}

Json summary_json(const harness::CampaignSummary& s) {
    Json j;
    j["n_runs"] = s.n_runs;
    j["regime"] = std::string(harness::to_string(s.regime));
    for (const auto name : harness::kMetricNames) {
        j["metrics"][std::string(name)] = metric_json(harness::metric(s, name));
    }
    j["mean_wait"] = s.mean_wait;
    j["frac_il_net_negative"] = s.frac_il_net_negative;
    return j;
}

output::Bundle simulate(const config::Settings& s, unsigned threads) {
    output::Bundle b;
    CsvTable summary(kSummaryColumns);
    CsvTable scalars(kScalarColumns);
    CsvTable runs(kRunColumns);
    Json histograms = Json::object();
    Json results = Json::object();

    const double sigma2t = s.sigma * s.sigma * static_cast<double>(s.steps);
    const double closed_form =
        analytics::expected_lvr(s.liquidity, s.p0, s.sigma, static_cast<double>(s.steps));

    for (const auto kind : processes_of(s)) {
        const std::string proc(process_name(kind));
        const harness::CampaignResult r = harness::run_campaign(config::to_experiment(s, kind, threads));

        for (const auto name : harness::kMetricNames) {
            const auto& m = harness::metric(r.summary, name);
            summary.row().add(proc).add(name).add(m.mean).add(m.stderr_of_mean).add(m.stddev)
                .add(m.skewness).add(m.min).add(m.max);
        }
        scalars.row().add(proc).add("n_runs").add(r.summary.n_runs);
        scalars.row().add(proc).add("sigma2t").add(sigma2t);
        scalars.row().add(proc).add("regime").add(harness::to_string(r.summary.regime));
        scalars.row().add(proc).add("expected_lvr_closed_form").add(closed_form);
        scalars.row().add(proc).add("mean_wait").add(r.summary.mean_wait);
        scalars.row().add(proc).add("frac_il_net_negative").add(r.summary.frac_il_net_negative);

        for (std::size_t i = 0; i < r.runs.size(); ++i) {
            const auto& m = r.runs[i];
            runs.row().add(proc).add(std::uint64_t{i}).add(m.il).add(m.lvr).add(m.volume).add(m.fees)
                .add(m.n_arb_events).add(m.final_price);
        }
        for (const auto& [name, h] : r.histograms) histograms[proc][name] = output::histogram_json(h);

        Json res = summary_json(r.summary);
        res["sigma2t"] = sigma2t;
        res["expected_lvr_closed_form"] = closed_form;
        results[proc] = std::move(res);
    }

    b.files["summary.csv"] = summary.str();
    b.files["scalars.csv"] = scalars.str();
    if (!s.streaming) b.files["runs.csv"] = runs.str();
    if (s.histograms) b.files["histograms.json"] = histograms.dump(2) + "\n";
    b.manifest["results"] = std::move(results);
    return b;
}

void add_scalar(CsvTable& t, Json& results, const std::string& name, double v) {
    t.row().add("").add(name).add(v);
    results[name] = v;
}

output::Bundle analytic_il_pdf(const config::Settings& s) {
    const analytics::ILDistParams params = config::il_params(s);
    const analytics::ILDistribution dist(params);
    const double root_scale = std::sqrt(dist.il_of_q(1.0));
    const double q_max = std::max(dist.q_max_below(), dist.q_max_above());
    const double s_max = root_scale * q_max;

    CsvTable table(kIlPdfColumns);
    double mass = 0.0;
    double prev = 0.0;
    const std::uint64_t n = s.grid_points;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double root = s_max * static_cast<double>(i) / static_cast<double>(n - 1);
        const double il = root * root;
        const double density_root = dist.q_density(root / root_scale) / root_scale;
        table.row().add(il).add(root);
        if (il > 0.0) {
            table.add(dist.pdf(il));
        } else {
            table.add("inf");
        }
        table.add(density_root);
        if (i > 0) mass += 0.5 * (prev + density_root) * (s_max / static_cast<double>(n - 1));
        prev = density_root;
    }

    output::Bundle b;
    CsvTable scalars(kScalarColumns);
    Json results;
    add_scalar(scalars, results, "trapezoid_mass", mass);
    add_scalar(scalars, results, "il_mean", dist.mean());
    add_scalar(scalars, results, "il_variance", dist.variance());
    add_scalar(scalars, results, "sqrt_il_max", s_max);
    b.files["il_pdf.csv"] = table.str();
    b.files["scalars.csv"] = scalars.str();
    b.manifest["results"] = std::move(results);
    return b;
}

output::Bundle analytic_il_mean(const config::Settings& s) {
    const analytics::ILDistParams params = config::il_params(s);
    output::Bundle b;
    CsvTable scalars(kScalarColumns);
    Json results;
    add_scalar(scalars, results, "il_mean", analytics::expected_il_quadrature(params));
    add_scalar(scalars, results, "il_mean_leading_order",
               analytics::expected_lvr(s.liquidity, s.p0, s.sigma, s.t));
    add_scalar(scalars, results, "sigma2t", s.sigma * s.sigma * s.t);
    add_scalar(scalars, results, "outside_intermediate_regime",
               analytics::outside_intermediate_regime(s.sigma, s.t) ? 1.0 : 0.0);
    b.files["scalars.csv"] = scalars.str();
    b.manifest["results"] = std::move(results);
    return b;
}

output::Bundle analytic_lvr_mean(const config::Settings& s) {
    output::Bundle b;
    CsvTable scalars(kScalarColumns);
    Json results;
    add_scalar(scalars, results, "lvr_mean", analytics::expected_lvr(s.liquidity, s.p0, s.sigma, s.t));
    add_scalar(scalars, results, "lvr_rate_at_p0",
               analytics::lvr_ode_rhs(s.liquidity, s.sigma * s.p0, s.p0));
    add_scalar(scalars, results, "sigma2t", s.sigma * s.sigma * s.t);
    add_scalar(scalars, results, "outside_intermediate_regime",
               analytics::outside_intermediate_regime(s.sigma, s.t) ? 1.0 : 0.0);
    b.files["scalars.csv"] = scalars.str();
    b.manifest["results"] = std::move(results);
    return b;
}

output::Bundle analytic_sample_il(const config::Settings& s) {
    const analytics::ILDistribution dist(config::il_params(s));
    const std::vector<double> draws = dist.sample(s.samples, s.seed);

    CsvTable table(kSampleColumns);
    stats::MomentAccumulator acc;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        table.row().add(std::uint64_t{i}).add(draws[i]);
        acc.add(draws[i]);
    }
    const stats::KsResult ks = stats::ks_one_sample(draws, [&dist](double x) { return dist.cdf(x); });

    output::Bundle b;
    CsvTable scalars(kScalarColumns);
    Json results;
    add_scalar(scalars, results, "sample_mean", acc.mean());
    add_scalar(scalars, results, "sample_stderr", acc.stderr_of_mean());
    add_scalar(scalars, results, "analytic_mean", dist.mean());
    add_scalar(scalars, results, "ks_statistic", ks.statistic);
    add_scalar(scalars, results, "ks_p_value", ks.p_value);
    b.files["samples.csv"] = table.str();
    b.files["scalars.csv"] = scalars.str();
    if (s.histograms) {
        Json h;
        h["il"] = output::histogram_json(stats::make_histogram(draws, s.bins));
        b.files["histograms.json"] = h.dump(2) + "\n";
    }
    b.manifest["results"] = std::move(results);
    return b;
}

output::Bundle analytic_clt_sum(const config::Settings& s, unsigned threads) {
    const analytics::ILDistParams params = config::il_params(s);
    const analytics::ILDistribution dist(params);
    const stats::Histogram h =
        analytics::clt_sum_experiment(params, s.n_per_sum, s.repeats, s.seed, s.bins, threads);

    output::Bundle b;
    CsvTable scalars(kScalarColumns);
    Json results;
    const double n = static_cast<double>(h.n_total);
    add_scalar(scalars, results, "sum_mean", h.moments.mean);
    add_scalar(scalars, results, "sum_stderr", std::sqrt(h.moments.variance / n));
    add_scalar(scalars, results, "sum_skewness", h.moments.skewness);
    add_scalar(scalars, results, "expected_sum_mean", static_cast<double>(s.n_per_sum) * dist.mean());
    b.files["scalars.csv"] = scalars.str();
    Json hj;
    hj["sum"] = output::histogram_json(h);
    b.files["histograms.json"] = hj.dump(2) + "\n";
    b.manifest["results"] = std::move(results);
    return b;
}

output::Bundle analytic_first_passage(const config::Settings& s, unsigned threads) {
    config::validate(s);
    struct Case {
        std::string shape;
        double k;
        analytics::BarrierSpec spec;
    };
    std::vector<Case> cases;
    if (s.barrier_grid.empty()) {
        cases.push_back({"single", -s.lower, {s.lower, s.upper, s.step}});
    } else {
        for (double k : s.barrier_grid) cases.push_back({"symmetric", k, {-k, k, s.step}});
        for (double k : s.barrier_grid) cases.push_back({"asymmetric", k, {-k, 1.0, s.step}});
    }

    CsvTable table(kFirstPassageColumns);
    std::vector<double> sym_k, sym_mean, asym_k, asym_mean;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const Case& c = cases[i];
        const std::uint64_t seed = cases.size() == 1 ? s.seed : stochastic::derive_seed(s.seed, i);
        const analytics::FirstPassage fp = analytics::first_passage(c.spec, s.walks, seed, threads);

        // Gambler's ruin with unit steps: barriers sit at the next integers.
        double expected_mean = std::numeric_limits<double>::quiet_NaN();
        double expected_lower = std::numeric_limits<double>::quiet_NaN();
        if (c.spec.step_kind == analytics::StepKind::Unit) {
            const double a = std::ceil(-c.spec.lower);
            const double bb = std::ceil(c.spec.upper);
            expected_mean = a * bb;
            expected_lower = bb / (a + bb);
        }
        table.row().add(c.shape).add(c.k).add(c.spec.lower).add(c.spec.upper)
            .add(c.spec.step_kind == analytics::StepKind::Unit ? "unit" : "gaussian")
            .add(s.walks).add(fp.mean_steps).add(fp.stderr_steps).add(fp.frac_lower)
            .add(expected_mean).add(expected_lower);
        if (c.shape == "symmetric") {
            sym_k.push_back(c.k);
            sym_mean.push_back(fp.mean_steps);
        } else if (c.shape == "asymmetric") {
            asym_k.push_back(c.k);
            asym_mean.push_back(fp.mean_steps);
        }
    }

    output::Bundle b;
    b.files["first_passage.csv"] = table.str();
    Json fits = Json::object();
    if (sym_k.size() >= 2) fits["symmetric_exponent"] = output::fit_json(stats::loglog_fit(sym_k, sym_mean));
    if (asym_k.size() >= 2) fits["asymmetric_exponent"] = output::fit_json(stats::loglog_fit(asym_k, asym_mean));
    b.manifest["fits"] = std::move(fits);
    return b;
}

output::Bundle sweep(const config::Settings& s, std::string_view axis_name, unsigned threads) {
    harness::SweepAxis axis;
    if (axis_name == "fee") {
        axis = harness::SweepAxis::Fee;
    } else if (axis_name == "sigma") {
        axis = harness::SweepAxis::Sigma;
    } else if (axis_name == "steps") {
        axis = harness::SweepAxis::Steps;
    } else {
        throw ConfigError("axis", 0, "unknown sweep axis '" + std::string(axis_name) + "'");
    }

    harness::ExperimentConfig base = config::to_experiment(s, config::single_process(s), threads);
    harness::SweepSpec spec;
    spec.axis = axis;
    spec.values = config::sweep_grid(s, axis);
    for (double v : spec.values) {
        if (axis == harness::SweepAxis::Fee && !(v < 1.0)) {
            throw ConfigError("values", 0, "fee grid values must lie in [0, 1)");
        }
        if (axis == harness::SweepAxis::Steps && (v < 1.0 || std::floor(v) != v)) {
            throw ConfigError("values", 0, "step grid values must be positive integers");
        }
    }
    if (axis == harness::SweepAxis::Steps && s.fixed_total_vol) {
        spec.total_variance = s.sigma * s.sigma * static_cast<double>(s.steps);
    }
    base.sweep = spec;
    const harness::SweepResult r = harness::run_sweep(base);

    CsvTable table(sweep_columns());
    for (const auto& row : r.rows) {
        table.row().add(row.value).add(row.sigma).add(row.n_steps).add(row.fee)
            .add(harness::to_string(row.summary.regime));
        for (const auto name : harness::kMetricNames) {
            const auto& m = harness::metric(row.summary, name);
            table.add(m.mean).add(m.stderr_of_mean);
        }
        table.add(row.summary.mean_wait).add(row.summary.frac_il_net_negative);
    }

    output::Bundle b;
    b.files["sweep.csv"] = table.str();
    Json fits = Json::object();
    for (const auto& [name, f] : r.fits) fits[name] = output::fit_json(f);
    Json scalars = Json::object();
    for (const auto& [name, v] : r.scalars) scalars[name] = v;
    b.manifest["results"] = {{"axis", std::string(harness::to_string(axis))},
                             {"grid", spec.values},
                             {"scalars", std::move(scalars)}};
    b.manifest["fits"] = std::move(fits);
    return b;
}

output::Bundle dispatch(const Invocation& inv) {
    const config::Settings& s = inv.settings;
    if (inv.command == "simulate") return simulate(s, inv.threads);
    if (inv.command == "sweep") return sweep(s, inv.subcommand, inv.threads);
    if (inv.command == "analytic") {
        if (inv.subcommand == "il-pdf") return analytic_il_pdf(s);
        if (inv.subcommand == "il-mean") return analytic_il_mean(s);
        if (inv.subcommand == "lvr-mean") return analytic_lvr_mean(s);
        if (inv.subcommand == "sample-il") return analytic_sample_il(s);
        if (inv.subcommand == "clt-sum") return analytic_clt_sum(s, inv.threads);
        if (inv.subcommand == "first-passage") return analytic_first_passage(s, inv.threads);
        throw ConfigError("command", 0, "unknown analytic subcommand '" + inv.subcommand + "'");
    }
    throw ConfigError("command", 0, "unknown command '" + inv.command + "'");
}

// Flags that set one config key each.
struct FlagKey {
    const char* flag;
    const char* key;
    const char* help;
};

constexpr FlagKey kValueFlags[] = {
    {"--process", "process", "price process: gbm, bm or both"},
    {"--p0", "p0", "initial price"},
    {"--L,--liquidity", "liquidity", "pool liquidity L"},
    {"--sigma", "sigma", "relative volatility per step"},
    {"--steps", "steps", "time steps per run"},
    {"--T,--t", "t", "horizon for analytic commands"},
    {"--fee", "fee", "pool fee in [0, 1)"},
    {"--runs", "runs", "number of Monte Carlo runs"},
    {"--seed", "seed", "campaign seed"},
    {"--band", "band", "no-trade band rule: exact or linearized"},
    {"--target", "target", "post-arbitrage pool price: oracle or marginal"},
    {"--bins", "bins", "histogram bins"},
    {"--memory-budget", "memory_budget", "byte budget of the per-run table"},
    {"--values", "values", "comma-separated sweep grid"},
    {"--samples", "samples", "number of IL draws"},
    {"--n-per-sum", "n_per_sum", "IL draws per sum"},
    {"--repeats", "repeats", "number of sums"},
    {"--grid-points", "grid_points", "rows of the IL density table"},
    {"--lower", "lower", "lower absorbing barrier"},
    {"--upper", "upper", "upper absorbing barrier"},
    {"--step", "step", "walk step: unit or gaussian"},
    {"--walks", "walks", "number of walks"},
    {"--barrier-grid", "barrier_grid", "comma-separated barrier half-widths"},
};

struct CommandInputs {
    std::string preset;
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_dir;
    unsigned threads{0};
    std::vector<std::pair<CLI::Option*, const char*>> value_opts;
    std::deque<std::string> values;
    bool streaming{false};
    bool no_histograms{false};
    bool fixed_total_vol{false};
};

void add_common(CLI::App* app, CommandInputs& in) {
    app->add_option("--out", in.out_dir, "output directory (default: $AMM_LAB_OUT or ./amm_lab_out)");
    app->add_option("--threads", in.threads, "worker threads (0 = all cores)");
}

void add_settings_options(CLI::App* app, CommandInputs& in) {
    std::string presets;
    for (const auto& n : config::preset_names()) presets += (presets.empty() ? "" : ", ") + std::string(n);
    app->add_option("--preset", in.preset, "named parameter set: " + presets);
    app->add_option("--config", in.config_path, "key = value config file");
    app->add_option("--set", in.sets, "override one key, as key=value (repeatable)");
    for (const auto& f : kValueFlags) {
        in.values.emplace_back();
        in.value_opts.emplace_back(app->add_option(f.flag, in.values.back(), f.help), f.key);
    }
    app->add_flag("--streaming", in.streaming, "keep no per-run table");
    app->add_flag("--no-histograms", in.no_histograms, "skip histogram output");
    app->add_flag("--fixed-total-vol", in.fixed_total_vol,
                  "steps sweep: rescale sigma so sigma^2 * steps stays fixed");
    add_common(app, in);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config", 0, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

config::Settings resolve_settings(const CommandInputs& in) {
    config::Settings s = in.preset.empty() ? config::Settings{} : config::preset(in.preset);
    if (!in.config_path.empty()) s = config::parse_config(read_file(in.config_path), s);
    for (const auto& kv : in.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError(kv, 0, "--set expects key=value");
        config::apply(s, kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (std::size_t i = 0; i < in.value_opts.size(); ++i) {
        if (in.value_opts[i].first->count() > 0) config::apply(s, in.value_opts[i].second, in.values[i]);
    }
    if (in.streaming) s.streaming = true;
    if (in.no_histograms) s.histograms = false;
    if (in.fixed_total_vol) s.fixed_total_vol = true;
    config::validate(s);
    return s;
}

std::filesystem::path output_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("AMM_LAB_OUT"); env && *env) return env;
    return "amm_lab_out";
}

output::Bundle finish(const Invocation& inv, output::Bundle b) {
    Json m;
    m["tool"] = std::string(kToolName);
    m["version"] = std::string(kVersion);
    m["command"] = inv.command;
    m["subcommand"] = inv.subcommand;
    m["seed"] = inv.settings.seed;
    m["config"] = config::to_config_text(inv.settings);
    m["results"] = b.manifest.contains("results") ? b.manifest["results"] : Json::object();
    m["fits"] = b.manifest.contains("fits") ? b.manifest["fits"] : Json::object();
    b.files["config.txt"] = config::to_config_text(inv.settings);
    Json files = Json::array();
    for (const auto& [name, content] : b.files) files.push_back(name);
    files.push_back("manifest.json");
    m["files"] = std::move(files);
    b.manifest = std::move(m);
    return b;
}

}  // namespace

output::Bundle execute(const Invocation& inv) { return finish(inv, dispatch(inv)); }

Invocation invocation_from_manifest(std::string_view manifest_text) {
    Json m;
    try {
        m = Json::parse(manifest_text);
    } catch (const Json::parse_error& e) {
        throw ConfigError("manifest", 0, std::string("not valid JSON: ") + e.what());
    }
    for (const char* field : {"tool", "command", "subcommand", "config"}) {
        if (!m.contains(field) || !m[field].is_string()) {
            throw ConfigError(field, 0, "manifest lacks a string field");
        }
    }
    if (m["tool"] != std::string(kToolName)) throw ConfigError("tool", 0, "manifest is not from " + std::string(kToolName));
    Invocation inv;
    inv.command = m["command"].get<std::string>();
    inv.subcommand = m["subcommand"].get<std::string>();
    inv.settings = config::parse_config(m["config"].get<std::string>());
    return inv;
}

std::string schema_text() {
    std::string out = "Output files (CSV header shown; floats use 17 significant digits):\n";
    out += "  summary.csv        " + join(kSummaryColumns) + "\n";
    out += "  scalars.csv        " + join(kScalarColumns) + "\n";
    out += "  runs.csv           " + join(kRunColumns) + "\n";
    out += "  sweep.csv          " + join(sweep_columns()) + "\n";
    out += "  il_pdf.csv         " + join(kIlPdfColumns) + "\n";
    out += "  samples.csv        " + join(kSampleColumns) + "\n";
    out += "  first_passage.csv  " + join(kFirstPassageColumns) + "\n";
    out += "  histograms.json    {<process>: {<metric>: {edges, counts, n_total, moments}}}\n";
    out += "  manifest.json      {tool, version, command, subcommand, seed, config, results, fits, files}\n";
    out += "  config.txt         canonical key = value settings\n";
    out += "Exit codes: 0 ok, 1 other failure, 2 config error, 3 memory budget exceeded, 4 numerical failure.\n";
    return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Monte Carlo and analytic toolkit for constant-product AMM loss metrics",
                 std::string(kToolName)};
    app.footer(schema_text());
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::deque<CommandInputs> inputs;
    std::vector<std::pair<CLI::App*, Invocation>> targets;
    auto register_command = [&](CLI::App* sub, std::string command, std::string subcommand) {
        inputs.emplace_back();
        add_settings_options(sub, inputs.back());
        targets.push_back({sub, Invocation{std::move(command), std::move(subcommand), {}, 0}});
    };

    register_command(app.add_subcommand("simulate", "run a Monte Carlo campaign"), "simulate", "");

    auto* analytic = app.add_subcommand("analytic", "closed-form and sampling results");
    analytic->require_subcommand(1);
    const std::pair<const char*, const char*> analytic_kinds[] = {
        {"il-pdf", "tabulate the IL density"},
        {"il-mean", "expected IL by quadrature"},
        {"lvr-mean", "expected LVR in closed form"},
        {"sample-il", "draw IL values by inverse CDF"},
        {"clt-sum", "histogram of sums of IL draws"},
        {"first-passage", "random walk exit times between barriers"},
    };
    for (const auto& [name, help] : analytic_kinds) {
        register_command(analytic->add_subcommand(name, help), "analytic", name);
    }

    auto* sweep_cmd = app.add_subcommand("sweep", "campaigns over a parameter grid");
    sweep_cmd->require_subcommand(1);
    for (const char* axis : {"fee", "sigma", "steps"}) {
        register_command(sweep_cmd->add_subcommand(axis, std::string("sweep over ") + axis), "sweep", axis);
    }

    auto* replay = app.add_subcommand("replay", "rerun the command recorded in a manifest");
    std::string manifest_path;
    CommandInputs replay_inputs;
    replay->add_option("manifest", manifest_path, "path to manifest.json")->required();
    add_common(replay, replay_inputs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        // Help on a subcommand and --version surface here as well.
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        Invocation inv;
        std::string out_flag;
        if (replay->parsed()) {
            inv = invocation_from_manifest(read_file(manifest_path));
            inv.threads = replay_inputs.threads;
            out_flag = replay_inputs.out_dir;
        } else {
            std::size_t i = 0;
            while (i < targets.size() && !targets[i].first->parsed()) ++i;
            if (i == targets.size()) throw ConfigError("command", 0, "no command given");
            inv = targets[i].second;
            inv.settings = resolve_settings(inputs[i]);
            inv.threads = inputs[i].threads;
            out_flag = inputs[i].out_dir;
        }
        const output::Bundle bundle = execute(inv);
        const auto dir = output_dir(out_flag);
        output::write_bundle(bundle, dir);
        out << "wrote " << bundle.files.size() + 1 << " files to " << dir.string() << "\n";
        return kOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const DomainError& e) {
        err << "invalid parameters: " << e.what() << "\n";
        return kConfigError;
    } catch (const ResourceError& e) {
        err << "resource limit: " << e.what() << "\n";
        return kResourceError;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << " (residual " << e.residual() << ")\n";
        return kNumericalError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
}

}  // namespace ammlab::cli
