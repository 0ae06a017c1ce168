#pragma once

#include <limits>
#include <queue>
#include <vector>

#include "digraph.hpp"

namespace endmenger {

/// Arc-based Dinic max-flow on the vertex-split transformation. This is the
/// reference implementation the alternating engine is checked against; it
/// shares no code with it.
class SplitMaxFlow {
public:
    static constexpr int kInf = std::numeric_limits<int>::max() / 4;

    explicit SplitMaxFlow(int nodes) : head_(nodes, -1) {}

    int add_node() {
        head_.push_back(-1);
        return static_cast<int>(head_.size()) - 1;
    }

    void add_edge(int u, int v, int cap) {
        to_.push_back(v);
        cap_.push_back(cap);
        next_.push_back(head_[u]);
        head_[u] = static_cast<int>(to_.size()) - 1;
        to_.push_back(u);
        cap_.push_back(0);
        next_.push_back(head_[v]);
        head_[v] = static_cast<int>(to_.size()) - 1;
    }

    int max_flow(int s, int t) {
        int flow = 0;
        while (bfs(s, t)) {
            it_ = head_;
            while (int pushed = dfs(s, t, kInf)) {
                flow += pushed;
                if (flow >= kInf) return kInf;
            }
        }
        return flow;
    }

private:
    bool bfs(int s, int t) {
        level_.assign(head_.size(), -1);
        std::queue<int> q;
        level_[s] = 0;
        q.push(s);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int e = head_[v]; e != -1; e = next_[e])
                if (cap_[e] > 0 && level_[to_[e]] < 0) {
                    level_[to_[e]] = level_[v] + 1;
                    q.push(to_[e]);
                }
        }
        return level_[t] >= 0;
    }

    int dfs(int v, int t, int budget) {
        if (v == t) return budget;
        for (int& e = it_[v]; e != -1; e = next_[e]) {
            int w = to_[e];
            if (cap_[e] > 0 && level_[w] == level_[v] + 1) {
                int pushed = dfs(w, t, std::min(budget, cap_[e]));
                if (pushed > 0) {
                    cap_[e] -= pushed;
                    cap_[e ^ 1] += pushed;
                    return pushed;
                }
            }
        }
        level_[v] = -1;
        return 0;
    }

    std::vector<int> head_, to_, cap_, next_, level_, it_;
};

/// Disjoint paths that use at least one arc, for self-reachability style
/// packing where the source and sink sets overlap: sources attach on the
/// out side of the split, sinks on the in side.
inline int split_max_disjoint_nontrivial_paths(const FiniteDigraph& g,
                                               const std::vector<int>& sources,
                                               const std::vector<int>& sinks) {
    const int n = g.num_nodes();
    SplitMaxFlow f(2 * n + 2);
    const int super_s = 2 * n, super_t = 2 * n + 1;
    for (int v = 0; v < n; ++v)
        f.add_edge(2 * v, 2 * v + 1, g.unbounded[v] ? SplitMaxFlow::kInf : 1);
    for (const auto& [u, v] : g.arcs) f.add_edge(2 * u + 1, 2 * v, SplitMaxFlow::kInf);
    for (int s : sources) f.add_edge(super_s, 2 * s + 1, SplitMaxFlow::kInf);
    for (int t : sinks) f.add_edge(2 * t, super_t, SplitMaxFlow::kInf);
    int v = f.max_flow(super_s, super_t);
    return v >= SplitMaxFlow::kInf ? SplitMaxFlow::kInf : v;
}

/// Maximum number of vertex-disjoint source-sink paths by splitting each
/// node into an in/out pair. Returns kInf when unbounded nodes alone carry
/// a source-sink path.
inline int split_max_disjoint_paths(const FiniteDigraph& g, const std::vector<int>& sources,
                                    const std::vector<int>& sinks) {
    const int n = g.num_nodes();
    SplitMaxFlow f(2 * n + 2);
    const int super_s = 2 * n, super_t = 2 * n + 1;
    for (int v = 0; v < n; ++v)
        f.add_edge(2 * v, 2 * v + 1, g.unbounded[v] ? SplitMaxFlow::kInf : 1);
    for (const auto& [u, v] : g.arcs) f.add_edge(2 * u + 1, 2 * v, SplitMaxFlow::kInf);
    for (int s : sources) f.add_edge(super_s, 2 * s, SplitMaxFlow::kInf);
    for (int t : sinks) f.add_edge(2 * t + 1, super_t, SplitMaxFlow::kInf);
    int v = f.max_flow(super_s, super_t);
    return v >= SplitMaxFlow::kInf ? SplitMaxFlow::kInf : v;
}

}  // namespace endmenger
