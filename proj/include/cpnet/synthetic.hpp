#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpnet/ingest.hpp"

namespace cpnet::synthetic {

// A one-factor market: a block of symbols loads fully on the factor, the
// remaining symbols carry loadings spaced evenly from beta_low (first
// symbol) to beta_high (last) plus their own noise and drift. Zero
// loadings make them independent. Log returns are Gaussian.
struct PlantedMarket {
    std::size_t block = 10;
    std::size_t independent = 30;
    std::size_t days = 760; // price rows
    double factor_vol = 0.015;
    double block_noise = 0.004;
    double block_drift = 0.0;
    double beta_low = 0.0;
    double beta_high = 0.0;
    double independent_vol = 0.004;
    double independent_drift = 0.0008;
    std::string block_prefix = "MKT";
    std::string independent_prefix = "IDIO";
    std::uint64_t seed = 7;
};

inline std::string symbol_name(const std::string& prefix, std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02zu", i);
    return prefix + buf;
}

// Columns are ordered by symbol name; block symbols are listed first when
// their prefix sorts first.
inline PriceMatrix planted_market(const PlantedMarket& cfg) {
    std::vector<std::string> block, indep;
    for (std::size_t i = 0; i < cfg.block; ++i) block.push_back(symbol_name(cfg.block_prefix, i));
    for (std::size_t i = 0; i < cfg.independent; ++i) indep.push_back(symbol_name(cfg.independent_prefix, i));

    const auto n = static_cast<Eigen::Index>(cfg.block + cfg.independent);
    const auto t = static_cast<Eigen::Index>(cfg.days);
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::MatrixXd logp = Eigen::MatrixXd::Zero(t, n);
    for (Eigen::Index r = 1; r < t; ++r) {
        const double f = z(rng);
        for (Eigen::Index k = 0; k < n; ++k) {
            double ret;
            if (static_cast<std::size_t>(k) < cfg.block) {
                ret = cfg.block_drift + cfg.factor_vol * f + cfg.block_noise * z(rng);
            } else {
                const auto i = static_cast<double>(static_cast<std::size_t>(k) - cfg.block);
                const double span = cfg.independent > 1 ? static_cast<double>(cfg.independent - 1) : 1.0;
                const double beta = cfg.beta_low + (cfg.beta_high - cfg.beta_low) * i / span;
                ret = cfg.independent_drift + beta * cfg.factor_vol * f + cfg.independent_vol * z(rng);
            }
            logp(r, k) = logp(r - 1, k) + ret;
        }
    }

    std::vector<std::string> all = block;
    all.insert(all.end(), indep.begin(), indep.end());
    std::vector<std::size_t> order(all.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return all[a] < all[b]; });

    PriceMatrix pm;
    pm.prices.resize(t, n);
    for (std::size_t c = 0; c < order.size(); ++c) {
        pm.symbols.push_back(all[order[c]]);
        pm.prices.col(static_cast<Eigen::Index>(c)) = 100.0 * logp.col(static_cast<Eigen::Index>(order[c])).array().exp();
    }
    for (Eigen::Index r = 0; r < t; ++r) pm.timeline.push_back("d" + std::to_string(r));
    return pm;
}

// Weekday dates starting 2000-01-03.
inline std::vector<std::string> business_days(std::size_t count) {
    std::vector<std::string> out;
    std::int64_t day = detail::days_from_civil(2000, 1, 3);
    while (out.size() < count) {
        // 1970-01-01 was a Thursday
        const auto weekday = ((day % 7) + 7 + 3) % 7; // 0 = Monday
        if (weekday < 5) out.push_back(format_timestamp(day * 86400).substr(0, 10));
        ++day;
    }
    return out;
}

// Long-format daily closes (date,symbol,close) with six decimals.
inline void write_daily_closes(std::ostream& out, const PriceMatrix& pm) {
    const auto dates = business_days(pm.rows());
    out << "date,symbol,close\n";
    char buf[64];
    for (std::size_t r = 0; r < pm.rows(); ++r)
        for (std::size_t k = 0; k < pm.cols(); ++k) {
            std::snprintf(buf, sizeof buf, "%.6f", pm.prices(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)));
            out << dates[r] << ',' << pm.symbols[k] << ',' << buf << '\n';
        }
}

} // namespace cpnet::synthetic
