#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <string>
#include <vector>

#include "cpnet/csv.hpp"
#include "cpnet/errors.hpp"
#include "cpnet/graph.hpp"

namespace cpnet {

enum class Measure { Degree = 0, Betweenness, Eccentricity, Closeness, Eigenvector };

inline constexpr std::array<Measure, 5> kAllMeasures = {Measure::Degree, Measure::Betweenness, Measure::Eccentricity,
                                                       Measure::Closeness, Measure::Eigenvector};

inline const char* measure_name(Measure m) {
    switch (m) {
    case Measure::Degree: return "degree";
    case Measure::Betweenness: return "betweenness";
    case Measure::Eccentricity: return "eccentricity";
    case Measure::Closeness: return "closeness";
    case Measure::Eigenvector: return "eigenvector";
    }
    return "?";
}

// Ten numbers per vertex: five measures, weighted and unweighted.
struct CentralityBundle {
    std::vector<std::string> labels;
    std::array<std::vector<double>, 5> weighted;
    std::array<std::vector<double>, 5> unweighted;

    std::size_t size() const { return labels.size(); }
    const std::vector<double>& get(Measure m, bool is_weighted) const {
        return is_weighted ? weighted[static_cast<std::size_t>(m)] : unweighted[static_cast<std::size_t>(m)];
    }
};

struct HybridScores {
    std::vector<std::string> labels;
    std::vector<double> values;
};

namespace detail {

struct PathStats {
    std::vector<double> betweenness;
    std::vector<double> eccentricity;
    std::vector<double> closeness;
};

inline bool nearly_equal(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

// Brandes accumulation over Dijkstra searches; equal-length paths are
// matched with a relative tolerance so that floating-point lengths still
// count ties. Betweenness is the unnormalized undirected pair count.
inline PathStats shortest_path_stats(const WeightedGraph& g, const std::vector<double>& length) {
    const std::size_t n = g.order();
    PathStats out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n), sigma(n), delta(n);
    std::vector<std::vector<std::size_t>> preds(n);
    std::vector<char> done(n);
    std::vector<std::size_t> order;
    using Item = std::pair<double, std::size_t>;

    for (std::size_t s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), inf);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        std::fill(done.begin(), done.end(), 0);
        for (auto& p : preds) p.clear();
        order.clear();
        dist[s] = 0.0;
        sigma[s] = 1.0;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        pq.push({0.0, s});
        while (!pq.empty()) {
            auto [d, v] = pq.top();
            pq.pop();
            if (done[v]) continue;
            done[v] = 1;
            order.push_back(v);
            for (const auto& nb : g.neighbors(v)) {
                auto w = nb.vertex;
                if (done[w]) continue;
                double alt = d + length[nb.edge];
                if (dist[w] == inf || (alt < dist[w] && !nearly_equal(alt, dist[w]))) {
                    dist[w] = alt;
                    sigma[w] = sigma[v];
                    preds[w].assign(1, v);
                    pq.push({alt, w});
                } else if (nearly_equal(alt, dist[w])) {
                    sigma[w] += sigma[v];
                    preds[w].push_back(v);
                }
            }
        }
        if (order.size() != n) throw DisconnectedGraphError("centrality requires a connected graph");
        double total = 0.0, far = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            total += dist[v];
            far = std::max(far, dist[v]);
        }
        out.eccentricity[s] = far;
        out.closeness[s] = total > 0.0 ? 1.0 / total : 0.0;
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            auto w = *it;
            for (auto v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != s) out.betweenness[w] += delta[w];
        }
    }
    for (auto& b : out.betweenness) b /= 2.0;
    return out;
}

// Dominant eigenvector by power iteration on (A + I); the shift keeps the
// iteration convergent on bipartite graphs without changing eigenvectors.
inline std::vector<double> eigenvector_centrality(const WeightedGraph& g, const std::vector<double>& strength) {
    const std::size_t n = g.order();
    std::vector<double> x(n, 1.0), next(n);
    for (int iter = 0; iter < 10000; ++iter) {
        for (std::size_t v = 0; v < n; ++v) {
            double s = x[v];
            for (const auto& nb : g.neighbors(v)) s += strength[nb.edge] * x[nb.vertex];
            next[v] = s;
        }
        double top = *std::max_element(next.begin(), next.end());
        if (!(top > 0.0)) break;
        double change = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            next[v] /= top;
            change = std::max(change, std::abs(next[v] - x[v]));
        }
        x.swap(next);
        if (change < 1e-10) break;
    }
    return x;
}

} // namespace detail

// All ten centralities from explicit per-edge strengths (degree and
// eigenvector) and lengths (betweenness, eccentricity, closeness).
inline CentralityBundle centrality_bundle(const WeightedGraph& g, const std::vector<double>& strength,
                                          const std::vector<double>& length) {
    if (strength.size() != g.size() || length.size() != g.size())
        throw DomainError("per-edge strength/length vectors must match the edge count");
    if (!g.connected()) throw DisconnectedGraphError("centrality requires a connected graph");
    const std::size_t n = g.order();
    CentralityBundle b;
    b.labels = g.labels();
    const std::vector<double> ones(g.size(), 1.0);

    auto degree = [&](const std::vector<double>& s) {
        std::vector<double> d(n, 0.0);
        for (std::size_t v = 0; v < n; ++v)
            for (const auto& nb : g.neighbors(v)) d[v] += s[nb.edge];
        return d;
    };
    auto fill = [&](std::array<std::vector<double>, 5>& dst, const std::vector<double>& s,
                    const std::vector<double>& l) {
        auto paths = detail::shortest_path_stats(g, l);
        dst[static_cast<std::size_t>(Measure::Degree)] = degree(s);
        dst[static_cast<std::size_t>(Measure::Betweenness)] = std::move(paths.betweenness);
        dst[static_cast<std::size_t>(Measure::Eccentricity)] = std::move(paths.eccentricity);
        dst[static_cast<std::size_t>(Measure::Closeness)] = std::move(paths.closeness);
        dst[static_cast<std::size_t>(Measure::Eigenvector)] = detail::eigenvector_centrality(g, s);
    };
    fill(b.weighted, strength, length);
    fill(b.unweighted, ones, ones);
    return b;
}

// Edge weights are correlations: strength 1 + rho, length sqrt(2(1 - rho)).
inline CentralityBundle centrality_bundle(const WeightedGraph& g) {
    std::vector<double> strength, length;
    strength.reserve(g.size());
    length.reserve(g.size());
    for (const auto& e : g.edges()) {
        strength.push_back(1.0 + e.weight);
        length.push_back(std::sqrt(std::max(0.0, 2.0 * (1.0 - e.weight))));
    }
    return centrality_bundle(g, strength, length);
}

// Rank 1 = most central; ties share their average rank.
inline std::vector<double> centrality_ranks(const std::vector<double>& values, bool larger_is_central) {
    const std::size_t n = values.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return larger_is_central ? values[a] > values[b] : values[a] < values[b];
    });
    auto tied = [](double a, double b) { return std::abs(a - b) <= 1e-10 * std::max({1.0, std::abs(a), std::abs(b)}); };
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && tied(values[idx[j - 1]], values[idx[j]])) ++j;
        double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) rank[idx[k]] = avg;
        i = j;
    }
    return rank;
}

// Rank-based hybrid peripherality: small for central vertices, large for
// peripheral ones, always within [0, 2].
inline HybridScores hybrid_measure(const CentralityBundle& b) {
    const std::size_t n = b.size();
    if (n < 2) throw DomainError("hybrid measure needs at least two vertices");
    auto rank = [&](Measure m, bool w) { return centrality_ranks(b.get(m, w), m != Measure::Eccentricity); };
    std::vector<double> first(n, 0.0), second(n, 0.0);
    for (bool w : {true, false}) {
        auto dc = rank(Measure::Degree, w), bc = rank(Measure::Betweenness, w);
        auto ec = rank(Measure::Eccentricity, w), cc = rank(Measure::Closeness, w), ev = rank(Measure::Eigenvector, w);
        for (std::size_t i = 0; i < n; ++i) {
            first[i] += dc[i] + bc[i];
            second[i] += ec[i] + cc[i] + ev[i];
        }
    }
    HybridScores out{b.labels, std::vector<double>(n)};
    const double d = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = (first[i] - 4.0) / (4.0 * d) + (second[i] - 6.0) / (6.0 * d);
    return out;
}

inline void write_centrality(std::ostream& out, const CentralityBundle& b, const HybridScores& p) {
    out << "vertex";
    for (auto m : kAllMeasures) out << ',' << measure_name(m) << "_w," << measure_name(m) << "_u";
    out << ",hybrid\n";
    for (std::size_t i = 0; i < b.size(); ++i) {
        out << b.labels[i];
        for (auto m : kAllMeasures) out << ',' << csv::format(b.get(m, true)[i]) << ',' << csv::format(b.get(m, false)[i]);
        out << ',' << csv::format(p.values[i]) << '\n';
    }
}

} // namespace cpnet
