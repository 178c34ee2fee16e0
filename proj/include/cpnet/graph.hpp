#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cpnet/csv.hpp"
#include "cpnet/errors.hpp"

namespace cpnet {

struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;
    double weight = 0.0;
};

// Simple undirected graph with one real weight per edge. Vertices are
// dense indices 0..n-1 carrying string labels.
class WeightedGraph {
public:
    struct Neighbor {
        std::size_t vertex;
        std::size_t edge;
    };

    WeightedGraph() = default;

    explicit WeightedGraph(std::size_t n) : adjacency_(n) {
        labels_.reserve(n);
        for (std::size_t i = 0; i < n; ++i) labels_.push_back(std::to_string(i));
    }

    explicit WeightedGraph(std::vector<std::string> labels)
        : labels_(std::move(labels)), adjacency_(labels_.size()) {}

    std::size_t order() const { return labels_.size(); }
    std::size_t size() const { return edges_.size(); }

    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(std::size_t v) const { return labels_.at(v); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Neighbor>& neighbors(std::size_t v) const { return adjacency_.at(v); }
    std::size_t degree(std::size_t v) const { return adjacency_.at(v).size(); }

    double strength(std::size_t v) const {
        double s = 0.0;
        for (const auto& nb : adjacency_.at(v)) s += edges_[nb.edge].weight;
        return s;
    }

    std::size_t add_edge(std::size_t u, std::size_t v, double weight = 1.0) {
        if (u >= order() || v >= order()) throw RangeError("edge endpoint out of range");
        if (u == v) throw DomainError("self-loop on vertex " + labels_[u]);
        if (has_edge(u, v)) throw DomainError("duplicate edge " + labels_[u] + "-" + labels_[v]);
        edges_.push_back({std::min(u, v), std::max(u, v), weight});
        auto id = edges_.size() - 1;
        adjacency_[u].push_back({v, id});
        adjacency_[v].push_back({u, id});
        return id;
    }

    std::optional<std::size_t> find_edge(std::size_t u, std::size_t v) const {
        if (u >= order() || v >= order()) return std::nullopt;
        const auto& a = adjacency_[u].size() <= adjacency_[v].size() ? adjacency_[u] : adjacency_[v];
        auto other = adjacency_[u].size() <= adjacency_[v].size() ? v : u;
        for (const auto& nb : a)
            if (nb.vertex == other) return nb.edge;
        return std::nullopt;
    }

    bool has_edge(std::size_t u, std::size_t v) const { return find_edge(u, v).has_value(); }

    double weight(std::size_t u, std::size_t v) const {
        auto e = find_edge(u, v);
        if (!e) throw DomainError("no edge " + std::to_string(u) + "-" + std::to_string(v));
        return edges_[*e].weight;
    }

    void set_weight(std::size_t edge, double w) { edges_.at(edge).weight = w; }

    bool connected() const {
        if (order() == 0) return true;
        std::vector<char> seen(order(), 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            auto v = stack.back();
            stack.pop_back();
            for (const auto& nb : adjacency_[v])
                if (!seen[nb.vertex]) {
                    seen[nb.vertex] = 1;
                    ++count;
                    stack.push_back(nb.vertex);
                }
        }
        return count == order();
    }

    std::vector<std::size_t> degree_sequence() const {
        std::vector<std::size_t> d(order());
        for (std::size_t v = 0; v < order(); ++v) d[v] = degree(v);
        return d;
    }

    // Same topology, weights replaced by f(weight).
    template <class F>
    WeightedGraph transformed(F&& f) const {
        WeightedGraph g = *this;
        for (auto& e : g.edges_) e.weight = f(e.weight);
        return g;
    }

private:
    std::vector<std::string> labels_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Neighbor>> adjacency_;
};

// Edge-list CSV `u,v,weight` with vertex labels.
inline void write_edge_list(std::ostream& out, const WeightedGraph& g) {
    out << "u,v,weight\n";
    for (const auto& e : g.edges()) out << g.label(e.u) << ',' << g.label(e.v) << ',' << csv::format(e.weight) << '\n';
}

// Vertices are numbered in order of first appearance.
inline WeightedGraph read_edge_list(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw EmptyInputError("edge list is empty");
    csv::map_header(csv::split(line), {"u", "v", "weight"}, false);
    std::map<std::string, std::size_t> index;
    std::vector<std::string> labels;
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
    auto vertex = [&](const std::string& s) {
        auto [it, inserted] = index.emplace(s, labels.size());
        if (inserted) labels.push_back(s);
        return it->second;
    };
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (csv::trim(line).empty()) continue;
        auto f = csv::split(line);
        if (f.size() != 3) throw ParseError(lineno, "expected u,v,weight");
        auto w = csv::to_double(f[2]);
        if (!w) throw ParseError(lineno, "bad weight '" + f[2] + "'");
        auto u = vertex(f[0]);
        auto v = vertex(f[1]);
        edges.emplace_back(u, v, *w);
    }
    WeightedGraph g(labels);
    for (auto [u, v, w] : edges) g.add_edge(u, v, w);
    return g;
}

} // namespace cpnet
