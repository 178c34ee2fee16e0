#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <istream>
#include <ostream>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "cpnet/csv.hpp"
#include "cpnet/errors.hpp"
#include "cpnet/graph.hpp"
#include "cpnet/seeding.hpp"

namespace cpnet {

// ---------------------------------------------------------------------------
// Random-walk persistence profile
// ---------------------------------------------------------------------------

struct CorePeripheryProfile {
    std::vector<std::size_t> order; // vertices in insertion order
    std::vector<double> phi;        // phi[k] = persistence of the first k+1 vertices
    std::vector<double> coreness;   // per vertex: phi at its insertion step

    std::size_t size() const { return order.size(); }
};

// Transition affinity for correlation-weighted networks: a_ij = (1 + rho_ij) / 2.
inline WeightedGraph correlation_affinity(const WeightedGraph& g) {
    return g.transformed([](double rho) { return (1.0 + rho) / 2.0; });
}

// Probability that a stationary random walker inside `subset` stays there
// after one step: sum_{i,j in S} a_ij / sum_{i in S} strength(i).
inline double persistence_probability(const WeightedGraph& g, const std::vector<std::size_t>& subset) {
    if (subset.empty()) throw DomainError("persistence probability of an empty set");
    std::vector<char> in(g.order(), 0);
    for (auto v : subset) {
        if (v >= g.order()) throw RangeError("vertex out of range");
        in[v] = 1;
    }
    double inside = 0.0, total = 0.0;
    for (std::size_t v = 0; v < g.order(); ++v) {
        if (!in[v]) continue;
        for (const auto& nb : g.neighbors(v)) {
            double w = g.edges()[nb.edge].weight;
            total += w;
            if (in[nb.vertex]) inside += w;
        }
    }
    if (!(total > 0.0)) throw DomainError("subset has zero weighted degree");
    return inside / total;
}

namespace detail {

// Greedy profile growth without the connectivity precondition; the
// significance test runs it on randomized graphs that may split.
inline CorePeripheryProfile rossa_greedy(const WeightedGraph& g) {
    const std::size_t n = g.order();
    std::vector<double> strength(n), link(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) strength[v] = g.strength(v);

    CorePeripheryProfile p;
    p.coreness.assign(n, 0.0);
    std::vector<char> in(n, 0);
    auto admit = [&](std::size_t v) {
        in[v] = 1;
        p.order.push_back(v);
        for (const auto& nb : g.neighbors(v)) link[nb.vertex] += g.edges()[nb.edge].weight;
    };

    std::size_t start = static_cast<std::size_t>(std::min_element(strength.begin(), strength.end()) - strength.begin());
    double inside = 0.0, total = strength[start];
    admit(start);
    p.phi.push_back(0.0);

    std::vector<double> cand(n);
    for (std::size_t k = 1; k < n; ++k) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (in[j]) continue;
            double denom = total + strength[j];
            cand[j] = denom > 0.0 ? (inside + 2.0 * link[j]) / denom : 0.0;
            best = std::min(best, cand[j]);
        }
        std::size_t pick = n;
        for (std::size_t j = 0; j < n; ++j)
            if (!in[j] && cand[j] <= best + 1e-12 && (pick == n || strength[j] < strength[pick])) pick = j;
        inside += 2.0 * link[pick];
        total += strength[pick];
        // The full vertex set persists with probability exactly one.
        double phi = (k == n - 1) ? 1.0 : cand[pick];
        p.phi.push_back(phi);
        p.coreness[pick] = phi;
        admit(pick);
    }
    return p;
}

} // namespace detail

// Core-periphery profile: start from a vertex of least weighted degree and
// repeatedly add the vertex that keeps the set's persistence lowest. Ties
// within 1e-12 go to the least weighted degree, then the smallest index.
inline CorePeripheryProfile rossa_profile(const WeightedGraph& g) {
    if (g.order() < 2) throw DomainError("profile needs at least two vertices");
    if (!g.connected()) throw DisconnectedGraphError("profile requires a connected graph");
    return detail::rossa_greedy(g);
}

// Vertices whose coreness is at most `tol`, in insertion order.
inline std::vector<std::size_t> pure_periphery(const CorePeripheryProfile& p, double tol = 1e-12) {
    std::vector<std::size_t> out;
    for (auto v : p.order)
        if (p.coreness[v] <= tol) out.push_back(v);
    return out;
}

inline double cp_centralization(const CorePeripheryProfile& p) {
    const std::size_t n = p.size();
    if (n < 3) throw DomainError("cp-centralization needs at least three vertices");
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) sum += p.phi[k];
    return 1.0 - 2.0 / static_cast<double>(n - 2) * sum;
}

inline void write_profile(std::ostream& out, const CorePeripheryProfile& p, const std::vector<std::string>& labels) {
    out << "rank,vertex,phi\n";
    for (std::size_t k = 0; k < p.size(); ++k)
        out << k + 1 << ',' << labels[p.order[k]] << ',' << csv::format(p.phi[k]) << '\n';
}

struct LabeledProfile {
    std::vector<std::string> labels; // sorted; vertex ids index into this
    CorePeripheryProfile profile;
};

// Inverse of write_profile. Vertex ids follow sorted label order.
inline LabeledProfile read_profile(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw EmptyInputError("profile file is empty");
    auto cols = csv::map_header(csv::split(line), {"rank", "vertex", "phi"}, false);
    std::vector<std::pair<std::string, double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (csv::trim(line).empty()) continue;
        auto f = csv::split(line);
        if (f.size() != 3) throw ParseError(lineno, "expected rank,vertex,phi");
        auto rank = csv::to_int(f[cols[0]]);
        auto phi = csv::to_double(f[cols[2]]);
        if (!rank || !phi || *rank != static_cast<std::int64_t>(rows.size() + 1))
            throw ParseError(lineno, "bad profile row");
        rows.emplace_back(f[cols[1]], *phi);
    }
    LabeledProfile out;
    for (auto& r : rows) out.labels.push_back(r.first);
    std::sort(out.labels.begin(), out.labels.end());
    if (std::adjacent_find(out.labels.begin(), out.labels.end()) != out.labels.end())
        throw DuplicateKeyError("profile lists a vertex twice");
    auto& p = out.profile;
    p.coreness.assign(rows.size(), 0.0);
    for (auto& [label, phi] : rows) {
        auto v = static_cast<std::size_t>(std::lower_bound(out.labels.begin(), out.labels.end(), label) - out.labels.begin());
        p.order.push_back(v);
        p.phi.push_back(phi);
        p.coreness[v] = phi;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Core scores from transition-function quality maximization
// ---------------------------------------------------------------------------

// Sorted coreness ladder c*_1 <= ... <= c*_N for one (alpha, beta).
inline std::vector<double> rombach_ladder(std::size_t n, double alpha, double beta) {
    const auto b = static_cast<std::size_t>(std::floor(beta * static_cast<double>(n)));
    std::vector<double> c(n);
    for (std::size_t i = 1; i <= n; ++i) {
        if (i <= b)
            c[i - 1] = static_cast<double>(i) * (1.0 - alpha) / (2.0 * static_cast<double>(b));
        else
            c[i - 1] = static_cast<double>(i - b) * (1.0 - alpha) / (2.0 * static_cast<double>(n - b)) + (1.0 + alpha) / 2.0;
    }
    return c;
}

// Q(c) = sum_ij a_ij c_i c_j on a fixed graph.
class RombachQuality {
public:
    explicit RombachQuality(const WeightedGraph& g)
        : n_(g.order()), dense_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_))),
          offsets_(n_ + 1, 0), strength_(n_, 0.0) {
        for (std::size_t v = 0; v < n_; ++v) {
            offsets_[v + 1] = offsets_[v] + g.degree(v);
            for (const auto& nb : g.neighbors(v)) {
                double w = g.edges()[nb.edge].weight;
                targets_.push_back(nb.vertex);
                weights_.push_back(w);
                dense_(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(nb.vertex)) = w;
                strength_[v] += w;
            }
        }
    }

    std::size_t order() const { return n_; }
    double a(std::size_t u, std::size_t v) const {
        return dense_(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v));
    }
    double strength(std::size_t v) const { return strength_[v]; }

    template <class F>
    void for_each_neighbor(std::size_t v, F&& f) const {
        for (std::size_t k = offsets_[v]; k < offsets_[v + 1]; ++k) f(targets_[k], weights_[k]);
    }

    double quality(const std::vector<double>& c) const {
        double q = 0.0;
        for (std::size_t v = 0; v < n_; ++v) {
            double s = 0.0;
            for_each_neighbor(v, [&](std::size_t w, double a) { s += a * c[w]; });
            q += c[v] * s;
        }
        return q;
    }

private:
    std::size_t n_;
    Eigen::MatrixXd dense_;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> targets_;
    std::vector<double> weights_;
    std::vector<double> strength_;
};

struct RombachSolution {
    std::vector<double> coreness; // per vertex
    double quality = 0.0;
};

// Every distinct assignment of the ladder to the vertices. When several
// assignments reach the maximum, their coreness vectors are averaged so
// automorphic vertices receive identical values.
inline RombachSolution rombach_exhaustive(const RombachQuality& q, std::vector<double> ladder) {
    std::sort(ladder.begin(), ladder.end());
    const std::size_t n = q.order();
    RombachSolution best{std::vector<double>(n, 0.0), -std::numeric_limits<double>::infinity()};
    std::size_t ties = 0;
    do {
        double value = q.quality(ladder);
        double tol = 1e-12 * std::max(1.0, std::abs(value));
        if (value > best.quality + tol) {
            best.quality = value;
            best.coreness = ladder;
            ties = 1;
        } else if (std::abs(value - best.quality) <= tol) {
            for (std::size_t i = 0; i < n; ++i) best.coreness[i] += ladder[i];
            ++ties;
        }
    } while (std::next_permutation(ladder.begin(), ladder.end()));
    for (auto& c : best.coreness) c /= static_cast<double>(ties);
    return best;
}

// Simulated annealing over pairwise swaps of the assignment. Starts from
// the strength-sorted assignment, cools geometrically from a temperature
// equal to the spread of sampled swap gains, and returns the best state
// visited.
inline RombachSolution rombach_anneal(const RombachQuality& q, std::vector<double> ladder, std::mt19937_64& rng,
                                      std::size_t proposals_per_vertex = 50) {
    const std::size_t n = q.order();
    std::sort(ladder.begin(), ladder.end());
    std::vector<std::size_t> by_strength(n);
    std::iota(by_strength.begin(), by_strength.end(), std::size_t{0});
    std::stable_sort(by_strength.begin(), by_strength.end(),
                     [&](std::size_t a, std::size_t b) { return q.strength(a) < q.strength(b); });
    std::vector<double> c(n);
    for (std::size_t r = 0; r < n; ++r) c[by_strength[r]] = ladder[r];
    if (n < 2) return {c, q.quality(c)};

    std::vector<double> s(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) q.for_each_neighbor(v, [&](std::size_t w, double a) { s[v] += a * c[w]; });
    double current = 0.0;
    for (std::size_t v = 0; v < n; ++v) current += c[v] * s[v];

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto gain = [&](std::size_t u, std::size_t v) {
        double d = c[v] - c[u];
        return 2.0 * d * (s[u] - s[v]) - 2.0 * d * d * q.a(u, v);
    };
    auto draw_pair = [&]() {
        // both indices from one draw: 32-bit halves scaled by multiply-shift
        const std::uint64_t r = rng();
        const auto u = static_cast<std::size_t>(((r & 0xFFFFFFFFull) * n) >> 32);
        const auto v = static_cast<std::size_t>(((r >> 32) * (n - 1)) >> 32);
        return std::pair{u, v >= u ? v + 1 : v};
    };

    // Initial temperature from the spread of swap gains at the start state.
    const std::size_t probes = std::min<std::size_t>(100, n * (n - 1) / 2);
    double mean = 0.0, sq = 0.0;
    for (std::size_t k = 0; k < probes; ++k) {
        auto [u, v] = draw_pair();
        double g = gain(u, v);
        mean += g;
        sq += g * g;
    }
    mean /= static_cast<double>(probes);
    double temperature = std::sqrt(std::max(0.0, sq / static_cast<double>(probes) - mean * mean));
    if (!(temperature > 0.0)) temperature = 1e-9 * std::max(1.0, std::abs(current));

    const std::size_t proposals = proposals_per_vertex * n;
    const double cooling = std::pow(1e-4, 1.0 / static_cast<double>(std::max<std::size_t>(proposals, 1)));
    RombachSolution best{c, current};
    bool best_stale = false; // c holds a better state than best.coreness
    for (std::size_t step = 0; step < proposals; ++step, temperature *= cooling) {
        auto [u, v] = draw_pair();
        double d = c[v] - c[u];
        if (d == 0.0) continue;
        double delta = gain(u, v);
        if (delta < 0.0 && unit(rng) >= std::exp(delta / temperature)) continue;
        if (best_stale && delta < 0.0) {
            best.coreness = c;
            best_stale = false;
        }
        std::swap(c[u], c[v]);
        q.for_each_neighbor(u, [&](std::size_t w, double a) { s[w] += a * d; });
        q.for_each_neighbor(v, [&](std::size_t w, double a) { s[w] -= a * d; });
        current += delta;
        if (current > best.quality) {
            best.quality = current;
            best_stale = true;
        }
    }
    if (best_stale) best.coreness = c;
    best.quality = q.quality(best.coreness);
    return best;
}

enum class RombachSearch { Auto, Anneal, Exhaustive };

struct RombachOptions {
    std::size_t samples = 10000;
    std::uint64_t seed = 0;
    RombachSearch search = RombachSearch::Auto;
    std::size_t exhaustive_max_order = 8;
    std::size_t proposals_per_vertex = 50;
};

struct CoreScores {
    std::vector<std::string> labels;
    std::vector<double> values;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

// CS(i) = Z * sum over sampled (alpha, beta) of c_i(alpha, beta) * Q(alpha, beta),
// with Z making the largest score exactly one.
inline CoreScores rombach_core_scores(const WeightedGraph& g, const RombachOptions& opt = {}) {
    if (opt.samples < 1) throw DomainError("core scores need at least one (alpha, beta) sample");
    const std::size_t n = g.order();
    RombachQuality q(g);
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const bool exhaustive = opt.search == RombachSearch::Exhaustive ||
                            (opt.search == RombachSearch::Auto && n <= opt.exhaustive_max_order);

    std::vector<double> acc(n, 0.0);
    for (std::size_t k = 0; k < opt.samples; ++k) {
        double alpha = unit(rng);
        double beta = unit(rng);
        auto ladder = rombach_ladder(n, alpha, beta);
        auto sol = exhaustive ? rombach_exhaustive(q, std::move(ladder))
                              : rombach_anneal(q, std::move(ladder), rng, opt.proposals_per_vertex);
        for (std::size_t i = 0; i < n; ++i) acc[i] += sol.coreness[i] * sol.quality;
    }
    CoreScores out{g.labels(), std::vector<double>(n, 0.0), opt.samples, opt.seed};
    double top = n ? *std::max_element(acc.begin(), acc.end()) : 0.0;
    if (top > 0.0)
        for (std::size_t i = 0; i < n; ++i) out.values[i] = acc[i] / top;
    return out;
}

inline void write_core_scores(std::ostream& out, const CoreScores& cs) {
    out << "vertex,core_score\n";
    for (std::size_t i = 0; i < cs.labels.size(); ++i) out << cs.labels[i] << ',' << csv::format(cs.values[i]) << '\n';
}

// ---------------------------------------------------------------------------
// Null model and significance
// ---------------------------------------------------------------------------

// Double-edge swaps (a,b),(c,d) -> (a,d),(c,b), skipped when they would
// create a self-loop or a duplicate edge. The original edge weights are
// then shuffled onto the rewired edges.
inline WeightedGraph degree_preserving_randomize(const WeightedGraph& g, std::size_t n_swaps, std::uint64_t seed) {
    const std::size_t n = g.order();
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<double> weights;
    for (const auto& e : g.edges()) {
        edges.emplace_back(e.u, e.v);
        weights.push_back(e.weight);
    }
    auto key = [n](std::size_t a, std::size_t b) { return std::min(a, b) * n + std::max(a, b); };
    std::unordered_set<std::size_t> present;
    for (auto [u, v] : edges) present.insert(key(u, v));

    std::mt19937_64 rng(seed);
    if (edges.size() >= 2) {
        std::uniform_int_distribution<std::size_t> pick(0, edges.size() - 1);
        std::bernoulli_distribution flip(0.5);
        for (std::size_t k = 0; k < n_swaps; ++k) {
            std::size_t i = pick(rng), j = pick(rng);
            if (i == j) continue;
            auto [a, b] = edges[i];
            auto [c, d] = edges[j];
            if (flip(rng)) std::swap(c, d);
            if (a == c || a == d || b == c || b == d) continue;
            if (present.count(key(a, d)) || present.count(key(c, b))) continue;
            present.erase(key(a, b));
            present.erase(key(c, d));
            present.insert(key(a, d));
            present.insert(key(c, b));
            edges[i] = {a, d};
            edges[j] = {c, b};
        }
    }
    std::shuffle(weights.begin(), weights.end(), rng);
    WeightedGraph out(g.labels());
    for (std::size_t k = 0; k < edges.size(); ++k) out.add_edge(edges[k].first, edges[k].second, weights[k]);
    return out;
}

inline WeightedGraph degree_preserving_randomize(const WeightedGraph& g, std::uint64_t seed) {
    return degree_preserving_randomize(g, 10 * g.size(), seed);
}

struct SignificanceReport {
    double observed = 0.0;
    std::vector<double> null_values;
    double p_value = 0.0;
    std::size_t replicates = 0;

    double null_mean() const {
        return null_values.empty() ? 0.0
                                   : std::accumulate(null_values.begin(), null_values.end(), 0.0) /
                                         static_cast<double>(null_values.size());
    }
    double null_std() const {
        if (null_values.size() < 2) return 0.0;
        double m = null_mean(), ss = 0.0;
        for (double v : null_values) ss += (v - m) * (v - m);
        return std::sqrt(ss / static_cast<double>(null_values.size() - 1));
    }
};

// p-value = fraction of degree-preserving nulls whose cp-centralization
// exceeds the observed one. Differences below 1e-12 count as equal so that
// isomorphic nulls never register as exceedances through rounding.
inline SignificanceReport significance_test(const WeightedGraph& g, std::size_t replicates, std::uint64_t seed) {
    if (replicates < 1) throw DomainError("significance test needs at least one replicate");
    SignificanceReport r;
    r.replicates = replicates;
    r.observed = cp_centralization(rossa_profile(g));
    std::size_t exceed = 0;
    for (std::size_t i = 0; i < replicates; ++i) {
        auto null = degree_preserving_randomize(g, derive_seed(seed, i));
        double c = cp_centralization(detail::rossa_greedy(null));
        r.null_values.push_back(c);
        if (c > r.observed + 1e-12) ++exceed;
    }
    r.p_value = static_cast<double>(exceed) / static_cast<double>(replicates);
    return r;
}

} // namespace cpnet
