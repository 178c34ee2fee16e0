// cpnet: command-line front end for the correlation network pipeline.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cpnet/cpnet.hpp"

namespace fs = std::filesystem;
using namespace cpnet;

namespace {

enum Exit { kOk = 0, kValidation = 2, kWindowing = 3, kMissingInput = 4 };

struct Common {
    std::string out;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    bool verbose = false;
};

void add_common(CLI::App* cmd, Common& c) {
    const char* env = std::getenv("CPNET_OUT_DIR");
    c.out = env && *env ? env : "cpnet_out";
    cmd->add_option("--out", c.out, "Output directory (default: $CPNET_OUT_DIR or ./cpnet_out)")->capture_default_str();
    cmd->add_option("--seed", c.seed, "Master seed")->capture_default_str();
    cmd->add_option("--jobs", c.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_flag("--verbose", c.verbose, "Progress messages on stderr");
}

void note(const Common& c, const std::string& msg) {
    if (c.verbose) std::fprintf(stderr, "cpnet: %s\n", msg.c_str());
}

fs::path prepare_out(const Common& c, const CLI::App& root) {
    fs::path dir(c.out);
    fs::create_directories(dir);
    auto cfg = csv::open_output((dir / "run_config.toml").string());
    cfg << root.config_to_str(true, false);
    return dir;
}

std::string window_name(const std::string& stem, std::size_t w) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "_w%04zu.csv", w);
    return stem + buf;
}

void require_file(const std::string& path, const std::string& what) {
    if (!fs::is_regular_file(path)) throw MissingInputError("missing " + what + ": " + path);
}

PriceMatrix load_prices(const std::string& path) {
    require_file(path, "price matrix");
    auto in = csv::open_input(path);
    return read_price_matrix(in);
}

// Files stem_wNNNN.csv in a directory, ordered by window id.
std::vector<std::pair<std::size_t, fs::path>> window_files(const fs::path& dir, const std::string& stem) {
    if (!fs::is_directory(dir)) throw MissingInputError("missing directory: " + dir.string());
    std::vector<std::pair<std::size_t, fs::path>> out;
    const std::string prefix = stem + "_w";
    for (const auto& entry : fs::directory_iterator(dir)) {
        auto name = entry.path().filename().string();
        if (name.rfind(prefix, 0) != 0 || entry.path().extension() != ".csv") continue;
        auto id = csv::to_int(name.substr(prefix.size(), name.size() - prefix.size() - 4));
        if (id && *id >= 0) out.emplace_back(static_cast<std::size_t>(*id), entry.path());
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) throw MissingInputError("no " + prefix + "*.csv files in " + dir.string());
    return out;
}

// Regime presets fill any window parameter the user left at zero.
struct WindowArgs {
    std::string regime = "daily";
    std::size_t formation = 0;
    std::size_t step = 0;
    std::size_t evaluation = 0;
    double theta = 0.0;

    BacktestConfig resolve() const {
        BacktestConfig c;
        if (regime == "daily")
            c = BacktestConfig::daily();
        else if (regime == "highfreq")
            c = BacktestConfig::highfreq();
        else
            throw ConfigError("unknown regime '" + regime + "'");
        if (formation) {
            c.formation = formation;
            if (!step) c.step = regime == "daily" ? formation : std::max<std::size_t>(1, formation / 4);
            if (!evaluation) c.evaluation = formation;
        }
        if (step) c.step = step;
        if (evaluation) c.evaluation = evaluation;
        if (theta > 0.0) c.theta = theta;
        return c;
    }
};

void add_window_options(CLI::App* cmd, WindowArgs& w, bool with_evaluation) {
    cmd->add_option("--regime", w.regime, "daily (L=125, step=L) or highfreq (L=240, step=60, theta=240)")
        ->capture_default_str()
        ->check(CLI::IsMember({"daily", "highfreq"}));
    cmd->add_option("--formation", w.formation, "Formation window length L in returns (0 = regime default)");
    cmd->add_option("--step", w.step, "Window advance (0 = regime default)");
    if (with_evaluation) cmd->add_option("--evaluation", w.evaluation, "Evaluation window length (0 = L)");
    cmd->add_option("--theta", w.theta, "Exponential weight decay (0 = L)");
}

// ---------------------------------------------------------------------------

struct IngestArgs {
    std::string ticks, daily;
    std::string session_start = "09:30", session_end = "15:30";
    std::int64_t tick_length = 30;
    double max_missing = 0.1;
    bool lenient = false;
};

int cmd_ingest(const IngestArgs& a, const Common& c, const CLI::App& root) {
    PriceMatrix raw;
    if (!a.ticks.empty()) {
        require_file(a.ticks, "tick file");
        Session s{parse_clock(a.session_start), parse_clock(a.session_end)};
        auto table = load_tick_data(a.ticks, s, {a.lenient});
        note(c, std::to_string(table.records.size()) + " in-session ticks");
        raw = vwap_series(table, a.tick_length);
    } else {
        require_file(a.daily, "daily close file");
        raw = load_daily_closes(a.daily, {a.lenient});
    }
    auto kept = filter_symbols(raw, a.max_missing);
    auto dir = prepare_out(c, root);
    {
        auto out = csv::open_output((dir / "prices.csv").string());
        write_price_matrix(out, kept);
    }
    auto out = csv::open_output((dir / "ingest_summary.csv").string());
    out << "symbol,status,missing_fraction\n";
    for (std::size_t k = 0; k < raw.cols(); ++k) {
        const auto& s = raw.symbols[k];
        bool flagged = std::find(raw.flagged.begin(), raw.flagged.end(), s) != raw.flagged.end();
        bool keep = std::find(kept.symbols.begin(), kept.symbols.end(), s) != kept.symbols.end();
        const char* status = keep ? "kept" : flagged ? "dropped_no_volume" : raw.missing(0, k) ? "dropped_leading_gap"
                                                                                              : "dropped_missing";
        out << s << ',' << status << ',' << csv::format(raw.missing_fraction(k)) << '\n';
    }
    note(c, std::to_string(kept.cols()) + " of " + std::to_string(raw.cols()) + " symbols kept");
    return kOk;
}

// ---------------------------------------------------------------------------

struct NetworkArgs {
    std::string prices;
    WindowArgs window;
    std::string method = "all";
    std::size_t rombach_samples = 10000;
};

int cmd_network(const NetworkArgs& a, const Common& c, const CLI::App& root) {
    auto prices = load_prices(a.prices);
    auto returns = log_returns(prices);
    auto cfg = a.window.resolve();
    if (cfg.formation < 2 || cfg.step < 1) throw ConfigError("formation must be >= 2 and step >= 1");
    if (returns.rows() < cfg.formation)
        throw ConfigError("timeline too short: need at least " + std::to_string(cfg.formation + 1) + " prices, have " +
                          std::to_string(prices.rows()));
    const std::size_t count = (returns.rows() - cfg.formation) / cfg.step + 1;
    auto dir = prepare_out(c, root);

    NetworkOptions opt;
    opt.profile = a.method != "rombach";
    opt.core_scores = a.method != "rossa";
    opt.hybrid = true;
    opt.rombach_samples = a.rombach_samples;
    opt.theta = cfg.decay();

    std::vector<double> centralization(count, std::nan(""));
    parallel_for(count, c.jobs, [&](std::size_t w) {
        NetworkOptions o = opt;
        o.seed = derive_seed(c.seed, w);
        o.profile = true; // cp-centralization is always reported
        auto net = analyze_window(returns, w * cfg.step, cfg.formation, o);
        {
            auto out = csv::open_output((dir / window_name("pmfg", w)).string());
            write_edge_list(out, net.pmfg.graph);
        }
        {
            auto out = csv::open_output((dir / window_name("pmfg_exp", w)).string());
            write_edge_list(out, net.weighted_pmfg->graph);
        }
        if (opt.profile) {
            auto out = csv::open_output((dir / window_name("profile", w)).string());
            write_profile(out, *net.profile, returns.symbols);
        }
        if (opt.core_scores) {
            auto out = csv::open_output((dir / window_name("core_scores", w)).string());
            write_core_scores(out, *net.core_scores);
        }
        {
            auto out = csv::open_output((dir / window_name("centrality", w)).string());
            write_centrality(out, *net.centrality, *net.hybrid);
        }
        centralization[w] = cp_centralization(*net.profile);
    });

    auto out = csv::open_output((dir / "cp_centralization.csv").string());
    out << "window_id,start,end,C\n";
    for (std::size_t w = 0; w < count; ++w)
        out << w << ',' << returns.timeline[w * cfg.step] << ',' << returns.timeline[w * cfg.step + cfg.formation - 1]
            << ',' << csv::format(centralization[w]) << '\n';
    note(c, std::to_string(count) + " windows written to " + dir.string());
    return kOk;
}

// ---------------------------------------------------------------------------

struct BacktestArgs {
    std::string prices;
    WindowArgs window;
    std::vector<std::size_t> holding;
    std::vector<std::string> strategies{"1", "2", "3", "4", "5", "6"};
    std::vector<std::size_t> sizes{5, 10, 20, 30};
    std::vector<std::string> weightings{"uniform", "markowitz"};
    std::size_t rombach_samples = 10000;
};

int cmd_backtest(const BacktestArgs& a, const Common& c, const CLI::App& root) {
    auto prices = load_prices(a.prices);
    auto returns = log_returns(prices);
    auto cfg = a.window.resolve();
    cfg.holding_periods = a.holding;
    cfg.strategies.clear();
    for (const auto& s : a.strategies) cfg.strategies.push_back(parse_strategy(s));
    cfg.sizes = a.sizes;
    cfg.weightings.clear();
    for (const auto& w : a.weightings) cfg.weightings.push_back(parse_weighting(w));
    cfg.rombach_samples = a.rombach_samples;
    cfg.seed = c.seed;
    cfg.jobs = c.jobs;

    auto t0 = std::chrono::steady_clock::now();
    auto report = run_backtest(cfg, returns, prices);
    auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    auto dir = prepare_out(c, root);
    auto emit = [&](const char* name, auto writer) {
        auto out = csv::open_output((dir / name).string());
        writer(out, report);
    };
    emit("report.csv", [](std::ostream& o, const BacktestReport& r) { write_report(o, r); });
    emit("report_failures.csv", [](std::ostream& o, const BacktestReport& r) { write_report_failures(o, r); });
    emit("window_returns.csv", [](std::ostream& o, const BacktestReport& r) { write_window_returns(o, r); });
    emit("portfolios.csv", [](std::ostream& o, const BacktestReport& r) { write_portfolios(o, r); });
    note(c, std::to_string(report.windows.size()) + " windows in " + std::to_string(secs) + " s");
    return kOk;
}

// ---------------------------------------------------------------------------

struct CrossvalArgs {
    std::string backtest_dir;
    std::size_t windows = 500;
    std::size_t iterations = 1000;
    double p0 = 0.7;
    std::vector<std::size_t> holding{50, 60, 70, 80, 90, 100, 110, 125};
    std::vector<std::string> comparators{"2", "3"};
};

int cmd_crossval(const CrossvalArgs& a, const Common& c, const CLI::App& root) {
    auto path = (fs::path(a.backtest_dir) / "window_returns.csv").string();
    require_file(path, "backtest window returns");
    auto in = csv::open_input(path);
    auto report = read_window_returns(in);
    CrossValOptions opt;
    opt.n_windows = a.windows;
    opt.iterations = a.iterations;
    opt.p0 = a.p0;
    opt.seed = c.seed;
    opt.holding_periods = a.holding;
    opt.comparators.clear();
    for (const auto& s : a.comparators) opt.comparators.push_back(parse_strategy(s));
    auto rows = cross_validate(report, opt);
    auto dir = prepare_out(c, root);
    auto out = csv::open_output((dir / "crossval.csv").string());
    write_crossval(out, rows);
    note(c, std::to_string(rows.size()) + " comparisons");
    return kOk;
}

// ---------------------------------------------------------------------------

struct SignificanceArgs {
    std::string network_dir;
    std::size_t rand = 100;
};

int cmd_significance(const SignificanceArgs& a, const Common& c, const CLI::App& root) {
    auto files = window_files(a.network_dir, "pmfg");
    std::vector<SignificanceReport> results(files.size());
    parallel_for(files.size(), c.jobs, [&](std::size_t i) {
        auto in = csv::open_input(files[i].second.string());
        auto g = correlation_affinity(read_edge_list(in));
        results[i] = significance_test(g, a.rand, derive_seed(c.seed, files[i].first));
    });
    auto dir = prepare_out(c, root);
    {
        auto out = csv::open_output((dir / "significance.csv").string());
        out << "window_id,C,p_value,null_mean,null_std\n";
        for (std::size_t i = 0; i < files.size(); ++i)
            out << files[i].first << ',' << csv::format(results[i].observed) << ',' << csv::format(results[i].p_value)
                << ',' << csv::format(results[i].null_mean()) << ',' << csv::format(results[i].null_std()) << '\n';
    }
    auto out = csv::open_output((dir / "significance_nulls.csv").string());
    out << "window_id,replicate,C\n";
    for (std::size_t i = 0; i < files.size(); ++i)
        for (std::size_t r = 0; r < results[i].null_values.size(); ++r)
            out << files[i].first << ',' << r << ',' << csv::format(results[i].null_values[r]) << '\n';
    std::size_t significant = 0;
    for (const auto& r : results) significant += r.p_value < 0.05 ? 1 : 0;
    note(c, std::to_string(significant) + " of " + std::to_string(results.size()) + " windows significant at 5%");
    return kOk;
}

// ---------------------------------------------------------------------------

struct OccurrenceArgs {
    std::string network_dir;
    std::string sectors;
    std::size_t k = 20;
};

int cmd_occurrence(const OccurrenceArgs& a, const Common& c, const CLI::App& root) {
    auto files = window_files(a.network_dir, "profile");
    std::vector<CorePeripheryProfile> profiles;
    std::vector<std::string> symbols;
    for (const auto& [id, path] : files) {
        auto in = csv::open_input(path.string());
        auto lp = read_profile(in);
        if (symbols.empty())
            symbols = lp.labels;
        else if (symbols != lp.labels)
            throw ValidationError(path.string() + " covers a different symbol set");
        profiles.push_back(std::move(lp.profile));
    }
    SectorMap sectors;
    if (!a.sectors.empty()) {
        require_file(a.sectors, "sector map");
        auto in = csv::open_input(a.sectors);
        sectors = parse_sector_map(in);
    }
    auto rep = occurrence_analysis(profiles, symbols, a.k, sectors);
    for (const auto& w : rep.warnings) std::fprintf(stderr, "cpnet: warning: %s\n", w.c_str());
    auto dir = prepare_out(c, root);
    {
        auto out = csv::open_output((dir / "occurrence_counts.csv").string());
        write_occurrence_counts(out, rep);
    }
    {
        auto out = csv::open_output((dir / "occurrence_runs.csv").string());
        write_occurrence_runs(out, rep);
    }
    {
        auto out = csv::open_output((dir / "occurrence_sectors.csv").string());
        write_occurrence_sectors(out, rep);
    }
    auto out = csv::open_output((dir / "occurrence_membership.csv").string());
    out << "window_id,group,symbol\n";
    for (std::size_t w = 0; w < profiles.size(); ++w) {
        for (auto i : rep.core.members[w]) out << files[w].first << ",core," << symbols[i] << '\n';
        for (auto i : rep.periphery.members[w]) out << files[w].first << ",periphery," << symbols[i] << '\n';
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stock correlation networks: PMFG construction, core-periphery analysis and portfolio backtests"};
    app.set_config("--config", "", "TOML/INI file; keys mirror the long flags, flags win on conflict");
    app.require_subcommand(1);

    Common common;

    IngestArgs ingest;
    auto* ci = app.add_subcommand("ingest", "Load tick or daily data and write a filtered price matrix");
    auto* src = ci->add_option_group("source");
    src->add_option("--ticks", ingest.ticks, "Tick CSV: timestamp,symbol,price,volume");
    src->add_option("--daily", ingest.daily, "Daily CSV: date,symbol,close");
    src->require_option(1);
    ci->add_option("--session-start", ingest.session_start, "Session start HH:MM[:SS]")->capture_default_str();
    ci->add_option("--session-end", ingest.session_end, "Session end HH:MM[:SS]")->capture_default_str();
    ci->add_option("--tick-length", ingest.tick_length, "VWAP interval in seconds")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    ci->add_option("--max-missing", ingest.max_missing, "Drop symbols missing more than this fraction")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    ci->add_flag("--lenient", ingest.lenient, "Ignore unknown input columns");
    add_common(ci, common);

    NetworkArgs network;
    auto* cn = app.add_subcommand("network", "Per-window PMFG, core-periphery profile, core scores and centrality");
    cn->add_option("--prices", network.prices, "Price matrix from ingest")->required();
    add_window_options(cn, network.window, false);
    cn->add_option("--method", network.method, "Core-periphery method: all, rossa or rombach")
        ->capture_default_str()
        ->check(CLI::IsMember({"all", "rossa", "rombach"}));
    cn->add_option("--rombach-samples", network.rombach_samples, "(alpha, beta) samples for core scores")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    add_common(cn, common);

    BacktestArgs backtest;
    auto* cb = app.add_subcommand("backtest", "Rolling-window portfolio backtest");
    cb->add_option("--prices", backtest.prices, "Price matrix from ingest")->required();
    add_window_options(cb, backtest.window, true);
    cb->add_option("--holding", backtest.holding, "Holding periods (default 1..evaluation)");
    cb->add_option("--strategies", backtest.strategies, "Strategies 1-6")->capture_default_str();
    cb->add_option("--sizes", backtest.sizes, "Portfolio sizes m")->capture_default_str();
    cb->add_option("--weightings", backtest.weightings, "uniform and/or markowitz")->capture_default_str();
    cb->add_option("--rombach-samples", backtest.rombach_samples, "(alpha, beta) samples for core scores")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    add_common(cb, common);

    CrossvalArgs crossval;
    auto* cx = app.add_subcommand("crossval", "Resampled proportion tests of Type-1 against comparators");
    cx->add_option("--backtest-dir", crossval.backtest_dir, "Directory holding window_returns.csv")->required();
    cx->add_option("--windows", crossval.windows, "Windows drawn per iteration")->capture_default_str();
    cx->add_option("--iterations", crossval.iterations, "Resampling iterations")->capture_default_str();
    cx->add_option("--p0", crossval.p0, "Null proportion")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    cx->add_option("--holding", crossval.holding, "Holding periods tested")->capture_default_str();
    cx->add_option("--comparators", crossval.comparators, "Comparator strategies")->capture_default_str();
    add_common(cx, common);

    SignificanceArgs significance;
    auto* cs = app.add_subcommand("significance", "Degree-preserving null test of cp-centralization per window");
    cs->add_option("--network-dir", significance.network_dir, "Directory holding pmfg_wNNNN.csv")->required();
    cs->add_option("--rand", significance.rand, "Randomized networks per window")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    add_common(cs, common);

    OccurrenceArgs occurrence;
    auto* co = app.add_subcommand("occurrence", "Top-k core and periphery membership across windows");
    co->add_option("--network-dir", occurrence.network_dir, "Directory holding profile_wNNNN.csv")->required();
    co->add_option("--sectors", occurrence.sectors, "Sector map CSV: symbol,sector");
    co->add_option("--k", occurrence.k, "Group size")->capture_default_str()->check(CLI::PositiveNumber);
    add_common(co, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kValidation;
    }

    try {
        if (*ci) return cmd_ingest(ingest, common, app);
        if (*cn) return cmd_network(network, common, app);
        if (*cb) return cmd_backtest(backtest, common, app);
        if (*cx) return cmd_crossval(crossval, common, app);
        if (*cs) return cmd_significance(significance, common, app);
        if (*co) return cmd_occurrence(occurrence, common, app);
    } catch (const MissingInputError& e) {
        std::fprintf(stderr, "cpnet: %s\n", e.what());
        return kMissingInput;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "cpnet: %s\n", e.what());
        return kWindowing;
    } catch (const Error& e) {
        std::fprintf(stderr, "cpnet: %s\n", e.what());
        return kValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "cpnet: %s\n", e.what());
        return 1;
    }
    return kOk;
}
