#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpnet/centrality.hpp"
#include "cpnet/coreperiphery.hpp"
#include "cpnet/errors.hpp"
#include "cpnet/ingest.hpp"

namespace cpnet {

// Type-1: pure periphery by persistence profile, Type-2: pure periphery by
// core score, Type-3: largest hybrid peripherality, Type-4: most core by
// profile, Type-5: most core by core score, Type-6: the whole market.
enum class Strategy { Type1 = 1, Type2, Type3, Type4, Type5, Type6 };
enum class Weighting { Uniform, Markowitz };

inline constexpr std::array<Strategy, 6> kAllStrategies = {Strategy::Type1, Strategy::Type2, Strategy::Type3,
                                                          Strategy::Type4, Strategy::Type5, Strategy::Type6};

inline std::string strategy_name(Strategy s) { return "Type-" + std::to_string(static_cast<int>(s)); }
inline const char* weighting_name(Weighting w) { return w == Weighting::Uniform ? "uniform" : "markowitz"; }

inline Strategy parse_strategy(const std::string& s) {
    std::string digits = s.rfind("Type-", 0) == 0 ? s.substr(5) : s;
    if (digits.size() == 1 && digits[0] >= '1' && digits[0] <= '6') return static_cast<Strategy>(digits[0] - '0');
    throw ConfigError("unknown strategy '" + s + "'");
}

inline Weighting parse_weighting(const std::string& s) {
    if (s == "uniform" || s == "u") return Weighting::Uniform;
    if (s == "markowitz" || s == "m") return Weighting::Markowitz;
    throw ConfigError("unknown weighting '" + s + "'");
}

struct Portfolio {
    std::vector<std::string> symbols;
    std::vector<double> weights;
    Strategy strategy = Strategy::Type6;
    Weighting weighting = Weighting::Uniform;
    std::size_t window_id = 0;
};

struct PerformanceRecord {
    std::size_t holding_period = 0;
    double mean = 0.0;
    double std = 0.0;
    double sharpe = 0.0;
};

// Score objects a strategy may draw on; only the one it needs must be set.
struct SelectionInputs {
    std::span<const std::string> symbols;
    std::span<const double> in_sample_sharpe;
    const CorePeripheryProfile* profile = nullptr;
    const CoreScores* core_scores = nullptr;
    const HybridScores* hybrid = nullptr;
};

namespace detail {

inline double sharpe_key(std::span<const double> sharpe, std::size_t i) {
    double s = i < sharpe.size() ? sharpe[i] : std::numeric_limits<double>::quiet_NaN();
    return std::isnan(s) ? -std::numeric_limits<double>::infinity() : s;
}

// Pure periphery (score ~ 0) by in-sample Sharpe descending, then the
// remaining vertices by ascending score, then Sharpe descending.
inline std::vector<std::size_t> periphery_first(std::span<const double> score, std::size_t m, const SelectionInputs& in) {
    const std::size_t n = score.size();
    std::vector<std::size_t> pure, rest;
    for (std::size_t i = 0; i < n; ++i) (score[i] <= 1e-12 ? pure : rest).push_back(i);
    auto by_sharpe = [&](std::size_t a, std::size_t b) {
        double sa = sharpe_key(in.in_sample_sharpe, a), sb = sharpe_key(in.in_sample_sharpe, b);
        if (sa != sb) return sa > sb;
        return in.symbols[a] < in.symbols[b];
    };
    std::sort(pure.begin(), pure.end(), by_sharpe);
    std::sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
        if (score[a] != score[b]) return score[a] < score[b];
        return by_sharpe(a, b);
    });
    pure.insert(pure.end(), rest.begin(), rest.end());
    pure.resize(m);
    return pure;
}

// Ties go to the smaller `preference` entry when given, else to the
// lexicographically smaller symbol.
inline std::vector<std::size_t> largest(std::span<const double> score, std::size_t m, const SelectionInputs& in,
                                        std::span<const std::size_t> preference = {}) {
    std::vector<std::size_t> idx(score.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (score[a] != score[b]) return score[a] > score[b];
        if (!preference.empty() && preference[a] != preference[b]) return preference[a] < preference[b];
        return in.symbols[a] < in.symbols[b];
    });
    idx.resize(m);
    return idx;
}

} // namespace detail

// Indices (into in.symbols) of the selected constituents.
inline std::vector<std::size_t> select_portfolio(Strategy strategy, std::size_t m, const SelectionInputs& in) {
    const std::size_t n = in.symbols.size();
    if (strategy == Strategy::Type6) {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), std::size_t{0});
        return all;
    }
    if (m < 1 || m > n) throw DomainError("portfolio size " + std::to_string(m) + " outside 1.." + std::to_string(n));
    auto need = [&](const void* p, const char* what) {
        if (!p) throw ConfigError(strategy_name(strategy) + " needs " + what);
    };
    auto check = [&](std::size_t len) {
        if (len != n) throw ConfigError("score vector length does not match the universe");
    };
    switch (strategy) {
    case Strategy::Type1:
        need(in.profile, "a persistence profile");
        check(in.profile->coreness.size());
        return detail::periphery_first(in.profile->coreness, m, in);
    case Strategy::Type2:
        need(in.core_scores, "core scores");
        check(in.core_scores->values.size());
        return detail::periphery_first(in.core_scores->values, m, in);
    case Strategy::Type3:
        need(in.hybrid, "hybrid scores");
        check(in.hybrid->values.size());
        return detail::largest(in.hybrid->values, m, in);
    case Strategy::Type4: {
        need(in.profile, "a persistence profile");
        check(in.profile->coreness.size());
        // equal coreness: the later insertion counts as more core
        std::vector<std::size_t> later_first(n);
        for (std::size_t r = 0; r < n; ++r) later_first[in.profile->order[r]] = n - 1 - r;
        return detail::largest(in.profile->coreness, m, in, later_first);
    }
    case Strategy::Type5:
        need(in.core_scores, "core scores");
        check(in.core_scores->values.size());
        return detail::largest(in.core_scores->values, m, in);
    case Strategy::Type6: break;
    }
    return {};
}

inline std::vector<double> uniform_weights(std::size_t m) {
    if (m == 0) throw DomainError("uniform weights need at least one asset");
    return std::vector<double>(m, 1.0 / static_cast<double>(m));
}

struct MarkowitzResult {
    std::vector<double> weights;
    double sharpe = 0.0;
    // Set when no asset has a positive expected return; the weights are
    // then the single asset with the least negative return/volatility.
    bool degenerate = false;
};

namespace detail {

// Euclidean projection onto the probability simplex.
inline Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
    const auto n = v.size();
    Eigen::VectorXd u = v;
    std::sort(u.data(), u.data() + n, std::greater<>());
    double cumulative = 0.0, theta = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        cumulative += u(j);
        double t = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (u(j) - t > 0.0) theta = t;
    }
    return (v.array() - theta).max(0.0).matrix();
}

struct SharpeObjective {
    const Eigen::VectorXd& mean;
    const Eigen::MatrixXd& cov;

    double value(const Eigen::VectorXd& w) const {
        double var = w.dot(cov * w);
        double r = mean.dot(w);
        if (!(var > 0.0)) return r > 0.0 ? std::numeric_limits<double>::infinity() : r;
        return r / std::sqrt(var);
    }

    Eigen::VectorXd gradient(const Eigen::VectorXd& w) const {
        Eigen::VectorXd cw = cov * w;
        double var = std::max(w.dot(cw), 1e-300);
        double sd = std::sqrt(var);
        return mean / sd - (mean.dot(w) / (var * sd)) * cw;
    }
};

inline Eigen::VectorXd projected_ascent(const SharpeObjective& f, Eigen::VectorXd w) {
    double fw = f.value(w);
    double step = 1.0;
    for (int iter = 0; iter < 5000; ++iter) {
        Eigen::VectorXd g = f.gradient(w);
        bool moved = false;
        for (int tries = 0; tries < 60; ++tries) {
            Eigen::VectorXd cand = project_simplex(w + step * g);
            double fc = f.value(cand);
            if (fc >= fw + 1e-4 * g.dot(cand - w) && fc >= fw) {
                double change = (cand - w).cwiseAbs().maxCoeff();
                w = std::move(cand);
                fw = fc;
                step *= 2.0;
                moved = change > 1e-14;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    return w;
}

// Closed-form optimum restricted to the support of w; accepted only if it
// is strictly positive there.
inline std::optional<Eigen::VectorXd> support_optimum(const SharpeObjective& f, const Eigen::VectorXd& w) {
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w(i) > 1e-9) support.push_back(i);
    const auto k = static_cast<Eigen::Index>(support.size());
    if (k == 0) return std::nullopt;
    Eigen::MatrixXd sub(k, k);
    Eigen::VectorXd r(k);
    for (Eigen::Index a = 0; a < k; ++a) {
        r(a) = f.mean(support[a]);
        for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = f.cov(support[a], support[b]);
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(sub);
    if (ldlt.info() != Eigen::Success) return std::nullopt;
    Eigen::VectorXd y = ldlt.solve(r);
    if (!y.allFinite() || (y.array() <= 0.0).any()) return std::nullopt;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(w.size());
    for (Eigen::Index a = 0; a < k; ++a) out(support[a]) = y(a);
    return out / out.sum();
}

} // namespace detail

// Long-only maximum-Sharpe weights with sigma_p^2 = sum w_i w_j s_i s_j C_ij.
// Projected gradient ascent from the barycenter and up to nine simplex
// vertices, each refined by the closed-form optimum on its support.
inline MarkowitzResult markowitz_weights(const Eigen::VectorXd& expected, const Eigen::VectorXd& vols,
                                         const Eigen::MatrixXd& corr) {
    const auto n = expected.size();
    if (n == 0) throw DomainError("markowitz weights need at least one asset");
    if (vols.size() != n || corr.rows() != n || corr.cols() != n) throw DomainError("markowitz input dimensions differ");
    if ((vols.array() <= 0.0).any()) throw DomainError("volatilities must be positive");

    std::vector<Eigen::Index> by_ratio(static_cast<std::size_t>(n));
    std::iota(by_ratio.begin(), by_ratio.end(), Eigen::Index{0});
    std::stable_sort(by_ratio.begin(), by_ratio.end(), [&](Eigen::Index a, Eigen::Index b) {
        return expected(a) / vols(a) > expected(b) / vols(b);
    });

    if ((expected.array() <= 0.0).all()) {
        MarkowitzResult r{std::vector<double>(static_cast<std::size_t>(n), 0.0), 0.0, true};
        r.weights[static_cast<std::size_t>(by_ratio[0])] = 1.0;
        r.sharpe = expected(by_ratio[0]) / vols(by_ratio[0]);
        return r;
    }

    const Eigen::MatrixXd cov = vols.asDiagonal() * corr * vols.asDiagonal();
    detail::SharpeObjective f{expected, cov};

    std::vector<Eigen::VectorXd> starts;
    starts.push_back(Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
    for (std::size_t k = 0; k < std::min<std::size_t>(9, static_cast<std::size_t>(n)); ++k) {
        if (n == 1) break;
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        v(by_ratio[k]) = 1.0;
        starts.push_back(v);
    }

    Eigen::VectorXd best = starts.front();
    double best_value = f.value(best);
    // Differences near the optimum are rounding noise; the closed-form
    // polish wins those and other candidates must clearly improve.
    auto consider = [&](const Eigen::VectorXd& w, bool exact = false) {
        double v = f.value(w);
        double slack = 1e-12 * std::abs(best_value);
        if (exact ? v >= best_value - slack : v > best_value + slack) {
            best_value = v;
            best = w;
        }
    };
    for (const auto& s : starts) {
        consider(s);
        auto w = detail::projected_ascent(f, s);
        consider(w);
        if (auto polished = detail::support_optimum(f, w)) consider(*polished, true);
    }

    MarkowitzResult r;
    best = best.cwiseMax(0.0);
    best /= best.sum();
    r.weights.assign(best.data(), best.data() + n);
    r.sharpe = f.value(best);
    return r;
}

// R_{t+T} = sum_i w_i ln(S_{t+T,i} / S_{t,i}) over the given price columns.
inline double portfolio_return(std::span<const std::size_t> columns, std::span<const double> weights,
                               const PriceMatrix& prices, std::size_t t, std::size_t holding) {
    if (columns.size() != weights.size()) throw DomainError("weights and columns differ in length");
    if (t + holding >= prices.rows())
        throw RangeError("t + T = " + std::to_string(t + holding) + " beyond the last price row " +
                         std::to_string(prices.rows() - 1));
    double r = 0.0;
    const auto t0 = static_cast<Eigen::Index>(t), t1 = static_cast<Eigen::Index>(t + holding);
    for (std::size_t i = 0; i < columns.size(); ++i) {
        auto c = static_cast<Eigen::Index>(columns[i]);
        r += weights[i] * std::log(prices.prices(t1, c) / prices.prices(t0, c));
    }
    return r;
}

inline double portfolio_return(const Portfolio& p, const PriceMatrix& prices, std::size_t t, std::size_t holding) {
    std::vector<std::size_t> columns;
    for (const auto& s : p.symbols) {
        auto it = std::find(prices.symbols.begin(), prices.symbols.end(), s);
        if (it == prices.symbols.end()) throw DomainError("symbol " + s + " not in price matrix");
        columns.push_back(static_cast<std::size_t>(it - prices.symbols.begin()));
    }
    return portfolio_return(columns, p.weights, prices, t, holding);
}

// Mean over sample standard deviation (n - 1); no risk-free rate.
inline PerformanceRecord sharpe_ratio(std::span<const double> returns, std::size_t holding_period = 0) {
    if (returns.size() < 2) throw DomainError("sharpe ratio needs at least two returns");
    const double n = static_cast<double>(returns.size());
    double mean = std::accumulate(returns.begin(), returns.end(), 0.0) / n;
    double ss = 0.0;
    for (double r : returns) ss += (r - mean) * (r - mean);
    double sd = std::sqrt(ss / (n - 1.0));
    if (sd <= 1e-14 * std::abs(mean) || sd == 0.0) throw UndefinedSharpeError(mean);
    return {holding_period, mean, sd, mean / sd};
}

} // namespace cpnet
