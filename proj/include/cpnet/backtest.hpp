#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "cpnet/centrality.hpp"
#include "cpnet/coreperiphery.hpp"
#include "cpnet/corr.hpp"
#include "cpnet/errors.hpp"
#include "cpnet/ingest.hpp"
#include "cpnet/parallel.hpp"
#include "cpnet/pmfg.hpp"
#include "cpnet/portfolio.hpp"
#include "cpnet/seeding.hpp"

namespace cpnet {

enum class Regime { Daily, HighFreq };

struct BacktestConfig {
    Regime regime = Regime::Daily;
    std::size_t formation = 125;  // L, returns per formation window
    std::size_t step = 125;       // window advance
    std::size_t evaluation = 125; // price steps available after formation
    std::vector<std::size_t> holding_periods; // empty -> 1..evaluation
    std::vector<Strategy> strategies{kAllStrategies.begin(), kAllStrategies.end()};
    std::vector<std::size_t> sizes{5, 10, 20, 30};
    std::vector<Weighting> weightings{Weighting::Uniform, Weighting::Markowitz};
    std::uint64_t seed = 0;
    std::size_t rombach_samples = 10000;
    double theta = 0.0; // exponential decay; 0 -> formation length
    std::size_t jobs = 1;

    static BacktestConfig daily() { return {}; }

    static BacktestConfig highfreq() {
        BacktestConfig c;
        c.regime = Regime::HighFreq;
        c.formation = 240;
        c.step = 60;
        c.evaluation = 240;
        c.theta = 240.0;
        return c;
    }

    double decay() const { return theta > 0.0 ? theta : static_cast<double>(formation); }

    std::vector<std::size_t> horizons() const {
        if (!holding_periods.empty()) return holding_periods;
        std::vector<std::size_t> h(evaluation);
        std::iota(h.begin(), h.end(), std::size_t{1});
        return h;
    }

    void validate() const {
        if (formation < 2) throw ConfigError("formation window must hold at least 2 returns");
        if (step < 1) throw ConfigError("window step must be at least 1");
        if (evaluation < 1) throw ConfigError("evaluation window must be at least 1");
        for (auto t : horizons())
            if (t < 1 || t > evaluation)
                throw ConfigError("holding period " + std::to_string(t) + " outside 1.." + std::to_string(evaluation));
        if (strategies.empty() || weightings.empty()) throw ConfigError("no strategies or weightings selected");
        for (auto m : sizes)
            if (m < 1) throw ConfigError("portfolio sizes must be positive");
        if (rombach_samples < 1) throw ConfigError("core scores need at least one sample");
    }
};

// Number of formation windows that fit: floor((n - L - E) / step) + 1.
inline std::size_t window_count(std::size_t n_returns, std::size_t formation, std::size_t evaluation, std::size_t step) {
    if (step == 0 || n_returns < formation + evaluation) return 0;
    return (n_returns - formation - evaluation) / step + 1;
}

// ---------------------------------------------------------------------------
// Per-window network analysis
// ---------------------------------------------------------------------------

struct NetworkOptions {
    bool profile = true;
    bool core_scores = true;
    bool hybrid = true;
    std::size_t rombach_samples = 10000;
    std::uint64_t seed = 0;
    double theta = 0.0; // 0 -> window length
};

struct WindowNetworks {
    CorrelationMatrix corr;
    PmfgGraph pmfg;
    WeightedGraph affinity; // PMFG topology with a_ij = (1 + rho_ij) / 2
    std::optional<CorePeripheryProfile> profile;
    std::optional<CoreScores> core_scores;
    std::optional<CorrelationMatrix> weighted_corr;
    std::optional<PmfgGraph> weighted_pmfg;
    std::optional<CentralityBundle> centrality;
    std::optional<HybridScores> hybrid;
};

// Plain Pearson feeds the profile and core scores; the exponentially
// weighted correlation feeds the hybrid measure.
inline WindowNetworks analyze_window(const ReturnMatrix& returns, std::size_t start, std::size_t length,
                                     const NetworkOptions& opt) {
    if (start + length > returns.rows()) throw RangeError("window exceeds the return timeline");
    auto window = returns.returns.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(length));
    WindowNetworks net;
    net.corr = pearson_matrix(window, returns.symbols);
    net.pmfg = build_pmfg(net.corr, "pearson@" + std::to_string(start));
    net.affinity = correlation_affinity(net.pmfg.graph);
    if (opt.profile) net.profile = rossa_profile(net.affinity);
    if (opt.core_scores) {
        RombachOptions ro;
        ro.samples = opt.rombach_samples;
        ro.seed = opt.seed;
        net.core_scores = rombach_core_scores(net.affinity, ro);
    }
    if (opt.hybrid) {
        auto w = exp_weights(length, opt.theta > 0.0 ? opt.theta : static_cast<double>(length));
        net.weighted_corr = weighted_pearson_matrix(window, w, returns.symbols);
        net.weighted_pmfg = build_pmfg(*net.weighted_corr, "weighted@" + std::to_string(start));
        net.centrality = centrality_bundle(net.weighted_pmfg->graph);
        net.hybrid = hybrid_measure(*net.centrality);
    }
    return net;
}

// ---------------------------------------------------------------------------
// Rolling backtest
// ---------------------------------------------------------------------------

struct CellKey {
    Strategy strategy;
    std::size_t m; // requested size; Type-6 always holds the whole universe
    Weighting weighting;

    auto operator<=>(const CellKey&) const = default;
};

struct CellLog {
    CellKey key;
    bool ok = false;
    std::string reason;
    bool degenerate = false; // markowitz fell back to a single asset
    std::vector<std::string> symbols;
    std::vector<double> weights;
    std::vector<double> returns; // one per configured holding period
};

struct WindowResult {
    std::size_t window_id = 0;
    std::size_t formation_start = 0; // first return row of the window
    std::size_t formation_time = 0;  // price row at which portfolios are formed
    bool ok = false;
    std::string reason;
    std::vector<CellLog> cells;
};

struct CellSummary {
    CellKey key;
    std::size_t size = 0; // actual number of constituents
    std::size_t holding_period = 0;
    bool ok = false;
    std::string reason;
    std::size_t samples = 0;
    double mean = 0.0;
    double std = 0.0;
    double sharpe = 0.0;
};

struct BacktestReport {
    BacktestConfig config;
    std::vector<std::string> symbols;
    std::vector<std::size_t> horizons;
    std::vector<WindowResult> windows;
    std::vector<CellSummary> cells;

    std::vector<CellKey> keys() const {
        std::vector<CellKey> k;
        for (auto s : config.strategies)
            for (auto m : config.sizes)
                for (auto w : config.weightings) k.push_back({s, m, w});
        return k;
    }

    const CellSummary* find(Strategy s, std::size_t m, Weighting w, std::size_t holding) const {
        for (const auto& c : cells)
            if (c.key == CellKey{s, m, w} && c.holding_period == holding) return &c;
        return nullptr;
    }

    std::size_t horizon_index(std::size_t holding) const {
        auto it = std::find(horizons.begin(), horizons.end(), holding);
        if (it == horizons.end()) throw RangeError("holding period " + std::to_string(holding) + " not in report");
        return static_cast<std::size_t>(it - horizons.begin());
    }
};

namespace detail {

inline WindowResult run_window(const BacktestConfig& cfg, const ReturnMatrix& returns, const PriceMatrix& prices,
                               std::size_t window_id, const std::vector<std::size_t>& horizons) {
    WindowResult res;
    res.window_id = window_id;
    res.formation_start = window_id * cfg.step;
    res.formation_time = res.formation_start + cfg.formation;

    auto uses = [&](std::initializer_list<Strategy> list) {
        return std::any_of(cfg.strategies.begin(), cfg.strategies.end(),
                           [&](Strategy s) { return std::find(list.begin(), list.end(), s) != list.end(); });
    };
    NetworkOptions opt;
    opt.profile = uses({Strategy::Type1, Strategy::Type4});
    opt.core_scores = uses({Strategy::Type2, Strategy::Type5});
    opt.hybrid = uses({Strategy::Type3});
    opt.rombach_samples = cfg.rombach_samples;
    opt.seed = derive_seed(cfg.seed, window_id);
    opt.theta = cfg.decay();

    try {
        auto net = analyze_window(returns, res.formation_start, cfg.formation, opt);
        auto window = returns.returns.middleRows(static_cast<Eigen::Index>(res.formation_start),
                                                 static_cast<Eigen::Index>(cfg.formation));
        const auto n = returns.cols();
        Eigen::VectorXd mean = window.colwise().mean().transpose();
        Eigen::VectorXd vol(static_cast<Eigen::Index>(n));
        std::vector<double> sharpe(n);
        for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(n); ++k) {
            double ss = (window.col(k).array() - mean(k)).square().sum();
            vol(k) = std::sqrt(ss / static_cast<double>(cfg.formation - 1));
            sharpe[static_cast<std::size_t>(k)] = mean(k) / vol(k);
        }

        SelectionInputs in;
        in.symbols = returns.symbols;
        in.in_sample_sharpe = sharpe;
        in.profile = net.profile ? &*net.profile : nullptr;
        in.core_scores = net.core_scores ? &*net.core_scores : nullptr;
        in.hybrid = net.hybrid ? &*net.hybrid : nullptr;

        for (auto s : cfg.strategies)
            for (auto m : cfg.sizes) {
                std::vector<std::size_t> chosen;
                std::string why;
                if (s != Strategy::Type6 && m > n)
                    why = "m exceeds universe of " + std::to_string(n);
                else
                    chosen = select_portfolio(s, m, in);
                for (auto w : cfg.weightings) {
                    CellLog log;
                    log.key = {s, m, w};
                    if (!why.empty()) {
                        log.reason = why;
                        res.cells.push_back(std::move(log));
                        continue;
                    }
                    if (w == Weighting::Uniform) {
                        log.weights = uniform_weights(chosen.size());
                    } else {
                        const auto k = static_cast<Eigen::Index>(chosen.size());
                        Eigen::VectorXd er(k), sd(k);
                        Eigen::MatrixXd c(k, k);
                        for (Eigen::Index a = 0; a < k; ++a) {
                            er(a) = mean(static_cast<Eigen::Index>(chosen[a]));
                            sd(a) = vol(static_cast<Eigen::Index>(chosen[a]));
                            for (Eigen::Index b = 0; b < k; ++b) c(a, b) = net.corr(chosen[a], chosen[b]);
                        }
                        auto mk = markowitz_weights(er, sd, c);
                        log.weights = std::move(mk.weights);
                        log.degenerate = mk.degenerate;
                    }
                    for (auto i : chosen) log.symbols.push_back(returns.symbols[i]);
                    for (auto t : horizons)
                        log.returns.push_back(portfolio_return(chosen, log.weights, prices, res.formation_time, t));
                    log.ok = true;
                    res.cells.push_back(std::move(log));
                }
            }
        res.ok = true;
    } catch (const Error& e) {
        res.ok = false;
        res.reason = e.what();
        res.cells.clear();
    }
    return res;
}

} // namespace detail

// Pooled statistics of one cell over a set of windows (ascending ids).
inline CellSummary pooled_cell(const BacktestReport& report, const CellKey& key, std::size_t horizon_index,
                               const std::vector<std::size_t>& window_ids) {
    CellSummary out;
    out.key = key;
    out.holding_period = report.horizons.at(horizon_index);
    std::vector<double> sample;
    std::string reason;
    for (auto id : window_ids) {
        const auto& w = report.windows.at(id);
        if (!w.ok) continue;
        for (const auto& c : w.cells) {
            if (!(c.key == key)) continue;
            if (c.ok) {
                sample.push_back(c.returns[horizon_index]);
                out.size = c.symbols.size();
            } else if (reason.empty()) {
                reason = c.reason;
            }
        }
    }
    out.samples = sample.size();
    if (sample.size() < 2) {
        out.reason = !reason.empty() ? reason : "fewer than 2 evaluated windows";
        out.mean = sample.empty() ? std::nan("") : sample[0];
        out.std = out.sharpe = std::nan("");
        return out;
    }
    try {
        auto rec = sharpe_ratio(sample, out.holding_period);
        out.ok = true;
        out.mean = rec.mean;
        out.std = rec.std;
        out.sharpe = rec.sharpe;
    } catch (const UndefinedSharpeError& e) {
        out.reason = "zero variance across windows";
        out.mean = e.mean();
        out.std = 0.0;
        out.sharpe = std::nan("");
    }
    return out;
}

inline BacktestReport run_backtest(const BacktestConfig& cfg, const ReturnMatrix& returns, const PriceMatrix& prices) {
    cfg.validate();
    if (prices.rows() != returns.rows() + 1 || prices.symbols != returns.symbols)
        throw ConfigError("price and return matrices do not describe the same universe and timeline");
    const std::size_t count = window_count(returns.rows(), cfg.formation, cfg.evaluation, cfg.step);
    if (count == 0)
        throw ConfigError("timeline too short: need at least " + std::to_string(cfg.formation + cfg.evaluation) +
                          " returns (" + std::to_string(cfg.formation + cfg.evaluation + 1) + " prices), have " +
                          std::to_string(returns.rows()));

    BacktestReport report;
    report.config = cfg;
    report.symbols = returns.symbols;
    report.horizons = cfg.horizons();
    report.windows.resize(count);
    parallel_for(count, cfg.jobs, [&](std::size_t w) {
        report.windows[w] = detail::run_window(cfg, returns, prices, w, report.horizons);
    });

    std::vector<std::size_t> all(count);
    std::iota(all.begin(), all.end(), std::size_t{0});
    for (const auto& key : report.keys())
        for (std::size_t h = 0; h < report.horizons.size(); ++h) report.cells.push_back(pooled_cell(report, key, h, all));
    return report;
}

// ---------------------------------------------------------------------------
// Cross-validation by window resampling
// ---------------------------------------------------------------------------

struct ZTest {
    double z = 0.0;
    double p_value = 0.0;
};

// One-sided upper-tail test of H0: p = p0 against p > p0.
inline ZTest proportion_z_test(double p_hat, double p0, std::size_t n) {
    if (!(p0 > 0.0 && p0 < 1.0)) throw DomainError("p0 must lie strictly between 0 and 1");
    if (n < 1) throw DomainError("proportion test needs n >= 1");
    double z = (p_hat - p0) / std::sqrt(p0 * (1.0 - p0) / static_cast<double>(n));
    return {z, 0.5 * std::erfc(z / std::sqrt(2.0))};
}

enum class Metric { Sharpe, MeanReturn, Std };

inline const char* metric_name(Metric m) {
    switch (m) {
    case Metric::Sharpe: return "sharpe";
    case Metric::MeanReturn: return "mean_return";
    case Metric::Std: return "std";
    }
    return "?";
}

struct CrossValOptions {
    std::size_t n_windows = 500;
    std::size_t iterations = 1000;
    double p0 = 0.7;
    std::uint64_t seed = 0;
    std::vector<std::size_t> holding_periods{50, 60, 70, 80, 90, 100, 110, 125};
    Strategy subject = Strategy::Type1;
    std::vector<Strategy> comparators{Strategy::Type2, Strategy::Type3};
    std::vector<Metric> metrics{Metric::Sharpe, Metric::MeanReturn, Metric::Std};
};

struct CrossValRow {
    std::size_t holding_period = 0;
    std::size_t m = 0;
    Weighting weighting = Weighting::Uniform;
    Metric metric = Metric::Sharpe;
    Strategy comparator = Strategy::Type2;
    double p_hat = 0.0;
    double z = 0.0;
    double p_value = 0.0;
    double subject_value = 0.0;    // metric in the final draw
    double comparator_value = 0.0; // metric in the final draw
};

// For each iteration, draws `n_windows` evaluated windows without
// replacement, pools each strategy's holding-period returns over them and
// scores the subject against each comparator (ties count one half). The
// resulting proportions go through proportion_z_test with n = iterations.
inline std::vector<CrossValRow> cross_validate(const BacktestReport& report, const CrossValOptions& opt) {
    std::vector<std::size_t> ok;
    for (const auto& w : report.windows)
        if (w.ok) ok.push_back(w.window_id);
    if (opt.n_windows < 2 || opt.n_windows > ok.size())
        throw DomainError("cannot draw " + std::to_string(opt.n_windows) + " windows from " + std::to_string(ok.size()) +
                          " evaluated windows (need at least 2)");
    if (opt.iterations < 1) throw DomainError("cross-validation needs at least one iteration");

    std::vector<std::size_t> horizons;
    for (auto t : opt.holding_periods)
        if (std::find(report.horizons.begin(), report.horizons.end(), t) != report.horizons.end()) horizons.push_back(t);

    struct Combo {
        std::size_t m;
        Weighting w;
        std::size_t h;
        Metric metric;
        Strategy comp;
        double score = 0.0;
        double last_subject = 0.0;
        double last_comparator = 0.0;
    };
    std::vector<Combo> combos;
    auto evaluated = [&](Strategy s, std::size_t m, Weighting w) {
        for (const auto& c : report.windows[ok.front()].cells)
            if (c.key == CellKey{s, m, w}) return c.ok;
        return false;
    };
    for (auto t : horizons)
        for (auto m : report.config.sizes)
            for (auto w : report.config.weightings) {
                if (!evaluated(opt.subject, m, w)) continue;
                for (auto metric : opt.metrics)
                    for (auto comp : opt.comparators)
                        if (evaluated(comp, m, w)) combos.push_back({m, w, report.horizon_index(t), metric, comp});
            }

    std::mt19937_64 rng(opt.seed);
    std::vector<std::size_t> picked(opt.n_windows);
    for (std::size_t it = 0; it < opt.iterations; ++it) {
        // std::sample keeps the relative order, so picks stay ascending.
        std::sample(ok.begin(), ok.end(), picked.begin(), opt.n_windows, rng);
        std::map<std::tuple<Strategy, std::size_t, Weighting, std::size_t>, CellSummary> cache;
        auto stats = [&](Strategy s, std::size_t m, Weighting w, std::size_t h) -> const CellSummary& {
            auto key = std::make_tuple(s, m, w, h);
            auto found = cache.find(key);
            if (found != cache.end()) return found->second;
            return cache.emplace(key, pooled_cell(report, {s, m, w}, h, picked)).first->second;
        };
        for (auto& c : combos) {
            const auto& a = stats(opt.subject, c.m, c.w, c.h);
            const auto& b = stats(c.comp, c.m, c.w, c.h);
            double x = 0.0, y = 0.0;
            bool lower_better = false;
            switch (c.metric) {
            case Metric::Sharpe: x = a.sharpe, y = b.sharpe; break;
            case Metric::MeanReturn: x = a.mean, y = b.mean; break;
            case Metric::Std: x = a.std, y = b.std, lower_better = true; break;
            }
            c.last_subject = x;
            c.last_comparator = y;
            if (std::isnan(x) || std::isnan(y) || x == y)
                c.score += 0.5;
            else if (lower_better ? x < y : x > y)
                c.score += 1.0;
        }
    }

    std::vector<CrossValRow> rows;
    for (const auto& c : combos) {
        CrossValRow r;
        r.holding_period = report.horizons[c.h];
        r.m = c.m;
        r.weighting = c.w;
        r.metric = c.metric;
        r.comparator = c.comp;
        r.p_hat = c.score / static_cast<double>(opt.iterations);
        auto t = proportion_z_test(r.p_hat, opt.p0, opt.iterations);
        r.z = t.z;
        r.p_value = t.p_value;
        r.subject_value = c.last_subject;
        r.comparator_value = c.last_comparator;
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Dynamic occurrence of core and periphery members
// ---------------------------------------------------------------------------

using SectorMap = std::map<std::string, std::string>;

inline SectorMap parse_sector_map(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw EmptyInputError("sector map is empty");
    auto cols = csv::map_header(csv::split(line), {"symbol", "sector"}, false);
    SectorMap map;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (csv::trim(line).empty()) continue;
        auto f = csv::split(line);
        if (f.size() != 2) throw ParseError(lineno, "expected symbol,sector");
        if (!map.emplace(f[cols[0]], f[cols[1]]).second)
            throw DuplicateKeyError("line " + std::to_string(lineno) + ": duplicate symbol " + f[cols[0]]);
    }
    return map;
}

struct GroupOccurrence {
    std::vector<std::size_t> counts;                     // per symbol
    std::vector<std::vector<std::size_t>> members;       // per window, symbol indices
    std::map<std::size_t, std::size_t> run_lengths;      // consecutive-window run length -> runs
    std::map<std::string, double> sector_fraction;       // sums to 1 when any membership exists
};

struct OccurrenceReport {
    std::vector<std::string> symbols;
    std::vector<std::string> sectors; // per symbol, "Unclassified" when unknown
    std::size_t windows = 0;
    GroupOccurrence core;
    GroupOccurrence periphery;
    std::vector<std::string> warnings;
};

// Core = k largest coreness (later insertion wins ties), periphery = k
// smallest (earlier insertion wins ties). Every profile must cover the
// same symbol list.
inline OccurrenceReport occurrence_analysis(const std::vector<CorePeripheryProfile>& profiles,
                                            const std::vector<std::string>& symbols, std::size_t k,
                                            const SectorMap& sectors) {
    const std::size_t n = symbols.size();
    if (k > n) throw DomainError("k = " + std::to_string(k) + " exceeds universe of " + std::to_string(n));
    OccurrenceReport rep;
    rep.symbols = symbols;
    rep.windows = profiles.size();
    for (const auto& s : symbols) {
        auto it = sectors.find(s);
        if (it == sectors.end()) {
            rep.sectors.push_back("Unclassified");
            rep.warnings.push_back("symbol " + s + " has no sector; bucketed as Unclassified");
        } else {
            rep.sectors.push_back(it->second);
        }
    }
    for (auto* g : {&rep.core, &rep.periphery}) g->counts.assign(n, 0);

    std::vector<std::size_t> insertion(n);
    for (const auto& p : profiles) {
        if (p.size() != n) throw DomainError("profile size does not match the symbol list");
        for (std::size_t r = 0; r < n; ++r) insertion[p.order[r]] = r;
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            if (p.coreness[a] != p.coreness[b]) return p.coreness[a] < p.coreness[b];
            return insertion[a] < insertion[b];
        });
        std::vector<std::size_t> low(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
        std::vector<std::size_t> high(idx.rbegin(), idx.rbegin() + static_cast<std::ptrdiff_t>(k));
        std::sort(low.begin(), low.end());
        std::sort(high.begin(), high.end());
        rep.periphery.members.push_back(low);
        rep.core.members.push_back(high);
    }

    for (auto* g : {&rep.core, &rep.periphery}) {
        std::vector<std::size_t> run(n, 0);
        std::map<std::string, double> by_sector;
        double total = 0.0;
        for (const auto& members : g->members) {
            std::vector<char> in(n, 0);
            for (auto i : members) {
                in[i] = 1;
                ++g->counts[i];
                by_sector[rep.sectors[i]] += 1.0;
                total += 1.0;
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (in[i]) {
                    ++run[i];
                } else if (run[i] > 0) {
                    ++g->run_lengths[run[i]];
                    run[i] = 0;
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            if (run[i] > 0) ++g->run_lengths[run[i]];
        for (auto& [sector, count] : by_sector) g->sector_fraction[sector] = count / total;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// CSV artifacts
// ---------------------------------------------------------------------------

inline void write_report(std::ostream& out, const BacktestReport& r) {
    out << "strategy,m,weighting,holding_period,sharpe,mean_return,std\n";
    for (const auto& c : r.cells)
        out << strategy_name(c.key.strategy) << ',' << c.key.m << ',' << weighting_name(c.key.weighting) << ','
            << c.holding_period << ',' << csv::format(c.ok ? c.sharpe : std::nan("")) << ','
            << csv::format(c.ok ? c.mean : std::nan("")) << ',' << csv::format(c.ok ? c.std : std::nan("")) << '\n';
}

// One row per failed cell, plus one per failed window.
inline void write_report_failures(std::ostream& out, const BacktestReport& r) {
    out << "scope,strategy,m,weighting,holding_period,reason\n";
    for (const auto& w : r.windows)
        if (!w.ok) out << "window " << w.window_id << ",,,,," << w.reason << '\n';
    for (const auto& c : r.cells)
        if (!c.ok)
            out << "cell," << strategy_name(c.key.strategy) << ',' << c.key.m << ',' << weighting_name(c.key.weighting)
                << ',' << c.holding_period << ',' << c.reason << '\n';
}

inline void write_window_returns(std::ostream& out, const BacktestReport& r) {
    out << "window_id,strategy,m,weighting,holding_period,return\n";
    for (const auto& w : r.windows)
        for (const auto& c : w.cells) {
            if (!c.ok) continue;
            for (std::size_t h = 0; h < r.horizons.size(); ++h)
                out << w.window_id << ',' << strategy_name(c.key.strategy) << ',' << c.key.m << ','
                    << weighting_name(c.key.weighting) << ',' << r.horizons[h] << ',' << csv::format(c.returns[h]) << '\n';
        }
}

inline void write_portfolios(std::ostream& out, const BacktestReport& r) {
    out << "window_id,strategy,m,weighting,symbol,weight\n";
    for (const auto& w : r.windows)
        for (const auto& c : w.cells) {
            if (!c.ok) continue;
            for (std::size_t i = 0; i < c.symbols.size(); ++i)
                out << w.window_id << ',' << strategy_name(c.key.strategy) << ',' << c.key.m << ','
                    << weighting_name(c.key.weighting) << ',' << c.symbols[i] << ',' << csv::format(c.weights[i]) << '\n';
        }
}

// Rebuilds the per-window returns of a finished backtest from
// write_window_returns output. Symbols and weights are not restored.
inline BacktestReport read_window_returns(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw EmptyInputError("window returns file is empty");
    auto cols = csv::map_header(csv::split(line), {"window_id", "strategy", "m", "weighting", "holding_period", "return"},
                                false);
    std::map<std::size_t, std::map<CellKey, std::map<std::size_t, double>>> data;
    std::set<Strategy> strategies;
    std::set<std::size_t> sizes, horizons;
    std::set<Weighting> weightings;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (csv::trim(line).empty()) continue;
        auto f = csv::split(line);
        if (f.size() != 6) throw ParseError(lineno, "expected 6 fields");
        auto id = csv::to_int(f[cols[0]]);
        auto m = csv::to_int(f[cols[2]]);
        auto h = csv::to_int(f[cols[4]]);
        auto v = csv::to_double(f[cols[5]]);
        if (!id || !m || !h || !v || *id < 0 || *m < 1 || *h < 1) throw ParseError(lineno, "bad window return row");
        Strategy s;
        Weighting w;
        try {
            s = parse_strategy(f[cols[1]]);
            w = parse_weighting(f[cols[3]]);
        } catch (const Error& e) {
            throw ParseError(lineno, e.what());
        }
        CellKey key{s, static_cast<std::size_t>(*m), w};
        auto& slot = data[static_cast<std::size_t>(*id)][key];
        if (!slot.emplace(static_cast<std::size_t>(*h), *v).second)
            throw DuplicateKeyError("line " + std::to_string(lineno) + ": duplicate window return");
        strategies.insert(s);
        sizes.insert(key.m);
        weightings.insert(w);
        horizons.insert(static_cast<std::size_t>(*h));
    }
    if (data.empty()) throw EmptyInputError("window returns file has no rows");

    BacktestReport r;
    r.config.strategies.assign(strategies.begin(), strategies.end());
    r.config.sizes.assign(sizes.begin(), sizes.end());
    r.config.weightings.assign(weightings.begin(), weightings.end());
    r.horizons.assign(horizons.begin(), horizons.end());
    r.config.holding_periods = r.horizons;
    r.config.evaluation = r.horizons.back();
    r.windows.resize(data.rbegin()->first + 1);
    for (std::size_t id = 0; id < r.windows.size(); ++id) {
        auto& w = r.windows[id];
        w.window_id = id;
        auto it = data.find(id);
        if (it == data.end()) {
            w.reason = "no returns recorded";
            continue;
        }
        w.ok = true;
        for (auto& [key, series] : it->second) {
            if (series.size() != r.horizons.size())
                throw ValidationError("window " + std::to_string(id) + " lacks some holding periods");
            CellLog c;
            c.key = key;
            c.ok = true;
            for (auto& [h, v] : series) c.returns.push_back(v);
            w.cells.push_back(std::move(c));
        }
    }
    std::vector<std::size_t> all;
    for (const auto& w : r.windows) all.push_back(w.window_id);
    for (const auto& key : r.keys())
        for (std::size_t h = 0; h < r.horizons.size(); ++h) r.cells.push_back(pooled_cell(r, key, h, all));
    return r;
}

inline void write_crossval(std::ostream& out, const std::vector<CrossValRow>& rows) {
    out << "holding_period,m,weighting,metric,comparator,p_hat,p_value\n";
    for (const auto& r : rows)
        out << r.holding_period << ',' << r.m << ',' << weighting_name(r.weighting) << ',' << metric_name(r.metric) << ','
            << strategy_name(r.comparator) << ',' << csv::format(r.p_hat) << ',' << csv::format(r.p_value) << '\n';
}

inline void write_occurrence_counts(std::ostream& out, const OccurrenceReport& r) {
    out << "symbol,sector,core_count,periphery_count\n";
    for (std::size_t i = 0; i < r.symbols.size(); ++i)
        out << r.symbols[i] << ',' << r.sectors[i] << ',' << r.core.counts[i] << ',' << r.periphery.counts[i] << '\n';
}

inline void write_occurrence_runs(std::ostream& out, const OccurrenceReport& r) {
    out << "group,run_length,runs\n";
    for (auto [name, g] : {std::pair{"core", &r.core}, std::pair{"periphery", &r.periphery}})
        for (auto [len, count] : g->run_lengths) out << name << ',' << len << ',' << count << '\n';
}

inline void write_occurrence_sectors(std::ostream& out, const OccurrenceReport& r) {
    out << "group,sector,fraction\n";
    for (auto [name, g] : {std::pair{"core", &r.core}, std::pair{"periphery", &r.periphery}})
        for (const auto& [sector, frac] : g->sector_fraction) out << name << ',' << sector << ',' << csv::format(frac) << '\n';
}

} // namespace cpnet
