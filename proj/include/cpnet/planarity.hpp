#pragma once

#include <algorithm>
#include <climits>
#include <cstddef>
#include <utility>
#include <vector>

#include "cpnet/graph.hpp"

namespace cpnet {

// Linear-time planarity test by the left-right criterion (de Fraysseix,
// Ossona de Mendez, Rosenstiehl; formulation of Brandes). Only the test
// phase is implemented; no embedding is produced.
//
// The object keeps its buffers between calls so repeated tests on graphs
// of similar size do not reallocate.
class PlanarityTester {
public:
    bool test(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
        const std::size_t m = edges.size();
        if (n > 2 && m > 3 * n - 6) return false;
        reset(n, m);
        for (std::size_t i = 0; i < m; ++i) {
            auto [u, v] = edges[i];
            adj_[u].push_back({static_cast<int>(v), static_cast<int>(i)});
            adj_[v].push_back({static_cast<int>(u), static_cast<int>(i)});
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (height_[v] != -1) continue;
            height_[v] = 0;
            roots_.push_back(static_cast<int>(v));
            orient(static_cast<int>(v));
        }
        for (std::size_t v = 0; v < n; ++v)
            std::stable_sort(out_[v].begin(), out_[v].end(),
                             [this](int a, int b) { return nesting_[a] < nesting_[b]; });
        for (int r : roots_)
            if (!run_test(r)) return false;
        return true;
    }

private:
    struct Interval {
        int low = -1;
        int high = -1;
        bool empty() const { return low == -1 && high == -1; }
    };
    struct ConflictPair {
        Interval left;
        Interval right;
    };
    struct Arc {
        int to;
        int id;
    };

    void reset(std::size_t n, std::size_t m) {
        adj_.assign(n, {});
        out_.assign(n, {});
        height_.assign(n, -1);
        parent_edge_.assign(n, -1);
        oriented_.assign(m, 0);
        src_.assign(m, -1);
        dst_.assign(m, -1);
        lowpt_.assign(m, 0);
        lowpt2_.assign(m, 0);
        nesting_.assign(m, 0);
        ref_.assign(m, -1);
        lowpt_edge_.assign(m, -1);
        stack_bottom_.assign(m, 0);
        roots_.clear();
        stack_.clear();
        next_arc_ = 0;
    }

    void orient(int v) {
        const int e = parent_edge_[v];
        for (const auto& a : adj_[v]) {
            if (oriented_[a.id]) continue;
            oriented_[a.id] = 1;
            const int w = a.to;
            const int vw = next_arc_++;
            src_[vw] = v;
            dst_[vw] = w;
            out_[v].push_back(vw);
            lowpt_[vw] = height_[v];
            lowpt2_[vw] = height_[v];
            if (height_[w] == -1) {
                parent_edge_[w] = vw;
                height_[w] = height_[v] + 1;
                orient(w);
            } else {
                lowpt_[vw] = height_[w];
            }
            nesting_[vw] = 2 * lowpt_[vw] + (lowpt2_[vw] < height_[v] ? 1 : 0);
            if (e != -1) {
                if (lowpt_[vw] < lowpt_[e]) {
                    lowpt2_[e] = std::min(lowpt_[e], lowpt2_[vw]);
                    lowpt_[e] = lowpt_[vw];
                } else if (lowpt_[vw] > lowpt_[e]) {
                    lowpt2_[e] = std::min(lowpt2_[e], lowpt_[vw]);
                } else {
                    lowpt2_[e] = std::min(lowpt2_[e], lowpt2_[vw]);
                }
            }
        }
    }

    bool conflicting(const Interval& i, int b) const { return !i.empty() && lowpt_[i.high] > lowpt_[b]; }

    int lowest(const ConflictPair& p) const {
        if (p.left.empty() && p.right.empty()) return INT_MAX;
        if (p.left.empty()) return lowpt_[p.right.low];
        if (p.right.empty()) return lowpt_[p.left.low];
        return std::min(lowpt_[p.left.low], lowpt_[p.right.low]);
    }

    void set_ref(int edge, int value) {
        if (edge != -1) ref_[edge] = value;
    }

    bool run_test(int v) {
        const int e = parent_edge_[v];
        const auto& outs = out_[v];
        for (std::size_t i = 0; i < outs.size(); ++i) {
            const int ei = outs[i];
            const int w = dst_[ei];
            stack_bottom_[ei] = stack_.size();
            if (ei == parent_edge_[w]) {
                if (!run_test(w)) return false;
            } else {
                lowpt_edge_[ei] = ei;
                stack_.push_back({{}, {ei, ei}});
            }
            if (lowpt_[ei] < height_[v]) {
                if (i == 0) {
                    lowpt_edge_[e] = lowpt_edge_[ei];
                } else if (!add_constraints(ei, e)) {
                    return false;
                }
            }
        }
        if (e != -1) remove_back_edges(e);
        return true;
    }

    bool add_constraints(int ei, int e) {
        ConflictPair p;
        // Merge return edges of ei into p.right.
        do {
            ConflictPair q = stack_.back();
            stack_.pop_back();
            if (!q.left.empty()) std::swap(q.left, q.right);
            if (!q.left.empty()) return false;
            if (lowpt_[q.right.low] > lowpt_[e]) {
                if (p.right.empty())
                    p.right = q.right;
                else
                    set_ref(p.right.low, q.right.high);
                p.right.low = q.right.low;
            } else {
                set_ref(q.right.low, lowpt_edge_[e]);
            }
        } while (stack_.size() != stack_bottom_[ei]);

        // Merge conflicting return edges of earlier siblings into p.left.
        while (!stack_.empty() && (conflicting(stack_.back().left, ei) || conflicting(stack_.back().right, ei))) {
            ConflictPair q = stack_.back();
            stack_.pop_back();
            if (conflicting(q.right, ei)) std::swap(q.left, q.right);
            if (conflicting(q.right, ei)) return false;
            set_ref(p.right.low, q.right.high);
            if (q.right.low != -1) p.right.low = q.right.low;
            if (p.left.empty())
                p.left = q.left;
            else
                set_ref(p.left.low, q.left.high);
            p.left.low = q.left.low;
        }
        if (!(p.left.empty() && p.right.empty())) stack_.push_back(p);
        return true;
    }

    void remove_back_edges(int e) {
        const int u = src_[e];
        while (!stack_.empty() && lowest(stack_.back()) == height_[u]) stack_.pop_back();
        if (!stack_.empty()) {
            ConflictPair p = stack_.back();
            stack_.pop_back();
            while (p.left.high != -1 && dst_[p.left.high] == u) p.left.high = ref_[p.left.high];
            if (p.left.high == -1 && p.left.low != -1) {
                ref_[p.left.low] = p.right.low;
                p.left.low = -1;
            }
            while (p.right.high != -1 && dst_[p.right.high] == u) p.right.high = ref_[p.right.high];
            if (p.right.high == -1 && p.right.low != -1) {
                ref_[p.right.low] = p.left.low;
                p.right.low = -1;
            }
            stack_.push_back(p);
        }
        if (lowpt_[e] < height_[u] && !stack_.empty()) {
            const int hl = stack_.back().left.high;
            const int hr = stack_.back().right.high;
            ref_[e] = (hl != -1 && (hr == -1 || lowpt_[hl] > lowpt_[hr])) ? hl : hr;
        }
    }

    std::vector<std::vector<Arc>> adj_;
    std::vector<std::vector<int>> out_;
    std::vector<int> height_, parent_edge_, roots_;
    std::vector<char> oriented_;
    std::vector<int> src_, dst_, lowpt_, lowpt2_, nesting_, ref_, lowpt_edge_;
    std::vector<std::size_t> stack_bottom_;
    std::vector<ConflictPair> stack_;
    int next_arc_ = 0;
};

inline bool is_planar(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    PlanarityTester t;
    return t.test(n, edges);
}

inline bool is_planar(const WeightedGraph& g) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    edges.reserve(g.size());
    for (const auto& e : g.edges()) edges.emplace_back(e.u, e.v);
    return is_planar(g.order(), edges);
}

} // namespace cpnet
