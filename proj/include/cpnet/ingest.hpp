#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "cpnet/csv.hpp"
#include "cpnet/errors.hpp"

namespace cpnet {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct TickRecord {
    std::int64_t timestamp = 0; // seconds since epoch, exchange-local clock
    std::string symbol;
    double price = 0.0;
    std::int64_t volume = 0;
};

// Trading session as [start, end) seconds after local midnight.
struct Session {
    std::int64_t start = 9 * 3600 + 30 * 60;
    std::int64_t end = 15 * 3600 + 30 * 60;

    std::int64_t length() const { return end - start; }
};

struct TickTable {
    Session session;
    std::vector<TickRecord> records;
};

struct PriceMatrix {
    std::vector<std::string> symbols;
    std::vector<std::string> timeline;
    Eigen::MatrixXd prices; // rows = time, cols = symbol, NaN = missing
    // Symbols the producer already knows are unusable (e.g. no volume at all).
    std::vector<std::string> flagged;

    std::size_t rows() const { return static_cast<std::size_t>(prices.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(prices.cols()); }
    bool missing(std::size_t t, std::size_t k) const {
        return std::isnan(prices(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)));
    }
    double missing_fraction(std::size_t k) const {
        if (rows() == 0) return 1.0;
        std::size_t n = 0;
        for (std::size_t t = 0; t < rows(); ++t) n += missing(t, k) ? 1 : 0;
        return static_cast<double>(n) / static_cast<double>(rows());
    }
};

struct ReturnMatrix {
    std::vector<std::string> symbols;
    std::vector<std::string> timeline; // label of the later price of each pair
    Eigen::MatrixXd returns;

    std::size_t rows() const { return static_cast<std::size_t>(returns.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(returns.cols()); }
};

struct CsvOptions {
    bool lenient = false;
};

namespace detail {

inline std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    using namespace std::chrono;
    return sys_days{year{y} / month{m} / day{d}}.time_since_epoch().count();
}

inline bool valid_date(int y, unsigned m, unsigned d) {
    using namespace std::chrono;
    return year_month_day{year{y}, month{m}, day{d}}.ok();
}

inline bool parse_digits(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    out = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        out = out * 10 + (s[i] - '0');
    }
    return true;
}

} // namespace detail

// Parses YYYY-MM-DD.
inline std::optional<std::int64_t> parse_iso_date(std::string_view s) {
    int y, m, d;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!detail::parse_digits(s, 0, 4, y) || !detail::parse_digits(s, 5, 2, m) ||
        !detail::parse_digits(s, 8, 2, d))
        return std::nullopt;
    if (!detail::valid_date(y, static_cast<unsigned>(m), static_cast<unsigned>(d))) return std::nullopt;
    return detail::days_from_civil(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

// Integer epoch seconds, or YYYY-MM-DD[T| ]HH:MM:SS with optional fraction
// (truncated) and optional trailing 'Z'. No timezone conversion happens.
inline std::optional<std::int64_t> parse_timestamp(std::string_view s) {
    s = csv::trim(s);
    if (auto v = csv::to_int(s)) return v;
    if (s.size() < 19) return std::nullopt;
    auto days = parse_iso_date(s.substr(0, 10));
    if (!days || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' || s[16] != ':') return std::nullopt;
    int hh, mm, ss;
    if (!detail::parse_digits(s, 11, 2, hh) || !detail::parse_digits(s, 14, 2, mm) ||
        !detail::parse_digits(s, 17, 2, ss) || hh > 23 || mm > 59 || ss > 60)
        return std::nullopt;
    auto rest = s.substr(19);
    if (!rest.empty() && rest.front() == '.') {
        rest.remove_prefix(1);
        while (!rest.empty() && rest.front() >= '0' && rest.front() <= '9') rest.remove_prefix(1);
    }
    if (rest == "Z") rest.remove_prefix(1);
    if (!rest.empty()) return std::nullopt;
    return *days * 86400 + hh * 3600 + mm * 60 + ss;
}

inline std::string format_timestamp(std::int64_t epoch_seconds) {
    using namespace std::chrono;
    auto days = epoch_seconds >= 0 ? epoch_seconds / 86400 : -((-epoch_seconds + 86399) / 86400);
    auto sod = epoch_seconds - days * 86400;
    year_month_day ymd{sys_days{std::chrono::days{days}}};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long long>(sod / 3600), static_cast<long long>((sod / 60) % 60),
                  static_cast<long long>(sod % 60));
    return buf;
}

// HH:MM or HH:MM:SS -> seconds after midnight.
inline std::int64_t parse_clock(std::string_view s) {
    int hh = 0, mm = 0, ss = 0;
    bool ok = (s.size() == 5 || (s.size() == 8 && s[5] == ':')) && s[2] == ':' &&
              detail::parse_digits(s, 0, 2, hh) && detail::parse_digits(s, 3, 2, mm) &&
              (s.size() == 5 || detail::parse_digits(s, 6, 2, ss));
    if (!ok || hh > 24 || mm > 59 || ss > 59) throw ConfigError("bad clock time '" + std::string(s) + "'");
    return hh * 3600 + mm * 60 + ss;
}

inline TickTable parse_tick_data(std::istream& in, Session session, CsvOptions opts = {}) {
    if (session.end <= session.start) throw ConfigError("session end must follow session start");
    std::string line;
    if (!std::getline(in, line) || csv::trim(line).empty()) throw EmptyInputError("tick file is empty");
    auto cols = csv::map_header(csv::split(line), {"timestamp", "symbol", "price", "volume"}, opts.lenient);

    TickTable table{session, {}};
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (csv::trim(line).empty()) continue;
        auto f = csv::split(line);
        if (f.size() <= *std::max_element(cols.begin(), cols.end()))
            throw ParseError(lineno, "expected at least " + std::to_string(cols.size()) + " fields");
        if (!opts.lenient && f.size() != cols.size())
            throw ParseError(lineno, "expected " + std::to_string(cols.size()) + " fields");
        auto ts = parse_timestamp(f[cols[0]]);
        auto price = csv::to_double(f[cols[2]]);
        auto volume = csv::to_int(f[cols[3]]);
        if (!ts) throw ParseError(lineno, "bad timestamp '" + f[cols[0]] + "'");
        if (f[cols[1]].empty()) throw ParseError(lineno, "empty symbol");
        if (!price) throw ParseError(lineno, "bad price '" + f[cols[2]] + "'");
        if (!volume) throw ParseError(lineno, "bad volume '" + f[cols[3]] + "'");
        if (!(*price > 0.0)) throw ValidationError("line " + std::to_string(lineno) + ": price must be positive");
        if (*volume < 0) throw ValidationError("line " + std::to_string(lineno) + ": volume must be non-negative");

        std::int64_t day = *ts >= 0 ? *ts / 86400 : -((-*ts + 86399) / 86400);
        std::int64_t sod = *ts - day * 86400;
        if (sod < session.start || sod >= session.end) continue;
        table.records.push_back({*ts, f[cols[1]], *price, *volume});
    }
    if (lineno == 1) throw EmptyInputError("tick file has no data rows");
    std::stable_sort(table.records.begin(), table.records.end(), [](const TickRecord& a, const TickRecord& b) {
        return std::tie(a.symbol, a.timestamp) < std::tie(b.symbol, b.timestamp);
    });
    return table;
}

inline TickTable load_tick_data(const std::string& path, Session session, CsvOptions opts = {}) {
    auto in = csv::open_input(path);
    return parse_tick_data(in, session, opts);
}

// Volume-weighted average price per symbol and per interval of
// `tick_length` seconds. Every calendar day that has at least one record
// contributes session.length() / tick_length rows. Intervals without
// volume are missing; symbols with no volume at all are flagged.
inline PriceMatrix vwap_series(const TickTable& ticks, std::int64_t tick_length = 30) {
    if (tick_length <= 0) throw DomainError("tick length must be positive");
    const auto& session = ticks.session;
    const std::int64_t per_day = session.length() / tick_length;
    if (per_day <= 0) throw DomainError("tick length exceeds the session");

    std::set<std::int64_t> day_set;
    std::set<std::string> symbol_set;
    for (const auto& r : ticks.records) {
        day_set.insert(r.timestamp >= 0 ? r.timestamp / 86400 : -((-r.timestamp + 86399) / 86400));
        symbol_set.insert(r.symbol);
    }
    std::vector<std::int64_t> days(day_set.begin(), day_set.end());
    PriceMatrix pm;
    pm.symbols.assign(symbol_set.begin(), symbol_set.end());
    const auto rows = static_cast<Eigen::Index>(days.size() * static_cast<std::size_t>(per_day));
    const auto cols = static_cast<Eigen::Index>(pm.symbols.size());
    for (auto d : days)
        for (std::int64_t k = 0; k < per_day; ++k)
            pm.timeline.push_back(format_timestamp(d * 86400 + session.start + k * tick_length));

    Eigen::MatrixXd notional = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::MatrixXd volume = Eigen::MatrixXd::Zero(rows, cols);
    std::map<std::int64_t, Eigen::Index> day_index;
    for (std::size_t i = 0; i < days.size(); ++i) day_index[days[i]] = static_cast<Eigen::Index>(i);

    for (const auto& r : ticks.records) {
        auto day = r.timestamp >= 0 ? r.timestamp / 86400 : -((-r.timestamp + 86399) / 86400);
        auto k = (r.timestamp - day * 86400 - session.start) / tick_length;
        if (k < 0 || k >= per_day) continue;
        auto row = day_index[day] * per_day + k;
        auto col = static_cast<Eigen::Index>(
            std::lower_bound(pm.symbols.begin(), pm.symbols.end(), r.symbol) - pm.symbols.begin());
        notional(row, col) += static_cast<double>(r.volume) * r.price;
        volume(row, col) += static_cast<double>(r.volume);
    }

    pm.prices.resize(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        bool any_volume = false;
        for (Eigen::Index t = 0; t < rows; ++t) {
            if (volume(t, c) > 0.0) {
                pm.prices(t, c) = notional(t, c) / volume(t, c);
                any_volume = true;
            } else {
                pm.prices(t, c) = kMissing;
            }
        }
        if (!any_volume) pm.flagged.push_back(pm.symbols[static_cast<std::size_t>(c)]);
    }
    return pm;
}

inline PriceMatrix parse_daily_closes(std::istream& in, CsvOptions opts = {}) {
    std::string line;
    if (!std::getline(in, line) || csv::trim(line).empty()) throw EmptyInputError("daily file is empty");
    auto cols = csv::map_header(csv::split(line), {"date", "symbol", "close"}, opts.lenient);

    std::map<std::pair<std::string, std::string>, double> quotes;
    std::set<std::string> dates, symbols;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (csv::trim(line).empty()) continue;
        auto f = csv::split(line);
        if (f.size() <= *std::max_element(cols.begin(), cols.end()) || (!opts.lenient && f.size() != cols.size()))
            throw ParseError(lineno, "expected " + std::to_string(cols.size()) + " fields");
        const auto& date = f[cols[0]];
        const auto& sym = f[cols[1]];
        if (!parse_iso_date(date)) throw ParseError(lineno, "bad date '" + date + "'");
        if (sym.empty()) throw ParseError(lineno, "empty symbol");
        auto close = csv::to_double(f[cols[2]]);
        if (!close) throw ParseError(lineno, "bad close '" + f[cols[2]] + "'");
        if (!(*close > 0.0)) throw ValidationError("line " + std::to_string(lineno) + ": close must be positive");
        if (!quotes.emplace(std::make_pair(date, sym), *close).second)
            throw DuplicateKeyError("line " + std::to_string(lineno) + ": duplicate quote for " + sym + " on " + date);
        dates.insert(date);
        symbols.insert(sym);
    }
    if (quotes.empty()) throw EmptyInputError("daily file has no data rows");

    PriceMatrix pm;
    pm.symbols.assign(symbols.begin(), symbols.end());
    pm.timeline.assign(dates.begin(), dates.end());
    pm.prices = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(dates.size()),
                                          static_cast<Eigen::Index>(symbols.size()), kMissing);
    for (const auto& [key, close] : quotes) {
        auto t = std::lower_bound(pm.timeline.begin(), pm.timeline.end(), key.first) - pm.timeline.begin();
        auto k = std::lower_bound(pm.symbols.begin(), pm.symbols.end(), key.second) - pm.symbols.begin();
        pm.prices(t, k) = close;
    }
    return pm;
}

inline PriceMatrix load_daily_closes(const std::string& path, CsvOptions opts = {}) {
    auto in = csv::open_input(path);
    return parse_daily_closes(in, opts);
}

// Drops symbols that are flagged, start with a gap, or miss more than
// `max_missing_fraction` of the timeline; forward-fills the rest.
inline PriceMatrix filter_symbols(const PriceMatrix& prices, double max_missing_fraction) {
    if (!(max_missing_fraction >= 0.0 && max_missing_fraction <= 1.0))
        throw DomainError("max_missing_fraction must lie in [0, 1]");
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < prices.cols(); ++k) {
        bool flagged = std::find(prices.flagged.begin(), prices.flagged.end(), prices.symbols[k]) != prices.flagged.end();
        if (flagged || prices.rows() == 0 || prices.missing(0, k)) continue;
        if (prices.missing_fraction(k) > max_missing_fraction) continue;
        keep.push_back(k);
    }
    if (keep.size() < 3)
        throw InsufficientUniverseError("only " + std::to_string(keep.size()) + " symbols survive filtering; need at least 3");

    PriceMatrix out;
    out.timeline = prices.timeline;
    out.prices.resize(prices.prices.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        out.symbols.push_back(prices.symbols[keep[j]]);
        double last = kMissing;
        for (std::size_t t = 0; t < prices.rows(); ++t) {
            double v = prices.prices(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(keep[j]));
            if (!std::isnan(v)) last = v;
            out.prices(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = last;
        }
    }
    return out;
}

inline ReturnMatrix log_returns(const PriceMatrix& prices) {
    if (prices.rows() < 2) throw DomainError("need at least two price rows");
    for (Eigen::Index t = 0; t < prices.prices.rows(); ++t)
        for (Eigen::Index k = 0; k < prices.prices.cols(); ++k) {
            double v = prices.prices(t, k);
            if (std::isnan(v)) throw DomainError("missing price for " + prices.symbols[static_cast<std::size_t>(k)]);
            if (!(v > 0.0)) throw DomainError("non-positive price for " + prices.symbols[static_cast<std::size_t>(k)]);
        }
    ReturnMatrix r;
    r.symbols = prices.symbols;
    r.timeline.assign(prices.timeline.begin() + 1, prices.timeline.end());
    const auto n = prices.prices.rows() - 1;
    r.returns = (prices.prices.bottomRows(n).array() / prices.prices.topRows(n).array()).log().matrix();
    return r;
}

// Canonical price-matrix CSV: header `label,<symbols...>`, empty cell = missing.
inline void write_price_matrix(std::ostream& out, const PriceMatrix& pm) {
    out << "label";
    for (const auto& s : pm.symbols) out << ',' << s;
    out << '\n';
    for (std::size_t t = 0; t < pm.rows(); ++t) {
        out << pm.timeline[t];
        for (std::size_t k = 0; k < pm.cols(); ++k) {
            out << ',';
            if (!pm.missing(t, k)) out << csv::format(pm.prices(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)));
        }
        out << '\n';
    }
}

inline PriceMatrix read_price_matrix(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || csv::trim(line).empty()) throw EmptyInputError("price matrix is empty");
    auto header = csv::split(line);
    if (header.empty() || header[0] != "label") throw ParseError(1, "price matrix must start with 'label'");
    PriceMatrix pm;
    pm.symbols.assign(header.begin() + 1, header.end());
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (csv::trim(line).empty()) continue;
        auto f = csv::split(line);
        if (f.size() != header.size()) throw ParseError(lineno, "expected " + std::to_string(header.size()) + " fields");
        pm.timeline.push_back(f[0]);
        std::vector<double> row;
        for (std::size_t k = 1; k < f.size(); ++k) {
            if (f[k].empty()) {
                row.push_back(kMissing);
                continue;
            }
            auto v = csv::to_double(f[k]);
            if (!v) throw ParseError(lineno, "bad price '" + f[k] + "'");
            row.push_back(*v);
        }
        rows.push_back(std::move(row));
    }
    pm.prices.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(pm.symbols.size()));
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t k = 0; k < pm.symbols.size(); ++k)
            pm.prices(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = rows[t][k];
    return pm;
}

} // namespace cpnet
