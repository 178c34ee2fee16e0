#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "cpnet/corr.hpp"
#include "cpnet/errors.hpp"
#include "cpnet/graph.hpp"
#include "cpnet/planarity.hpp"

namespace cpnet {

struct PmfgGraph {
    WeightedGraph graph;
    std::string source_id;
    std::size_t rejected_edges = 0;
};

namespace detail {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[b] = a;
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

} // namespace detail

// Candidate edges of the complete graph in PMFG visiting order: weight
// descending, ties by (min index, max index) ascending.
inline std::vector<Edge> pmfg_edge_order(const Eigen::MatrixXd& weights) {
    const auto n = static_cast<std::size_t>(weights.rows());
    std::vector<Edge> order;
    order.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            order.push_back({i, j, weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
    std::stable_sort(order.begin(), order.end(), [](const Edge& a, const Edge& b) { return a.weight > b.weight; });
    return order;
}

// Greedy planar filtering: accept each edge, strongest first, iff the
// graph stays planar. Stops once the maximal-planar edge count 3(N-2)
// is reached since no further edge can be planar.
inline PmfgGraph build_pmfg(const CorrelationMatrix& corr, std::string source_id = {}) {
    const std::size_t n = corr.size();
    if (n < 3) throw InsufficientUniverseError("PMFG needs at least 3 vertices, got " + std::to_string(n));
    const std::size_t target = 3 * (n - 2);
    const auto candidates = pmfg_edge_order(corr.coefficients);

    PmfgGraph out{WeightedGraph(corr.symbols), std::move(source_id), 0};
    detail::DisjointSets components(n);
    PlanarityTester tester;
    std::vector<std::pair<std::size_t, std::size_t>> accepted;
    accepted.reserve(target);

    for (const auto& c : candidates) {
        if (accepted.size() == target) break;
        bool keep;
        if (components.find(c.u) != components.find(c.v)) {
            // Joining two planar components with one edge keeps planarity.
            keep = true;
        } else {
            accepted.emplace_back(c.u, c.v);
            keep = tester.test(n, accepted);
            accepted.pop_back();
        }
        if (keep) {
            accepted.emplace_back(c.u, c.v);
            components.unite(c.u, c.v);
            out.graph.add_edge(c.u, c.v, c.weight);
        }
    }
    out.rejected_edges = candidates.size() - out.graph.size();
    if (out.graph.size() != target || !out.graph.connected())
        throw Error("PMFG construction ended with " + std::to_string(out.graph.size()) + " edges, expected " +
                    std::to_string(target));
    return out;
}

} // namespace cpnet
