#pragma once

#include <set>
#include <string>
#include <vector>

#include "presentation.hpp"

namespace endmenger {

/// Finite vertex-capacitated digraph. Node capacities are 1 or unbounded;
/// unbounded nodes may be shared by any number of otherwise disjoint paths.
struct FiniteDigraph {
    std::vector<std::string> labels;
    std::vector<bool> unbounded;
    std::vector<std::pair<int, int>> arcs;
    std::vector<std::vector<int>> out;  // node -> arc ids leaving it
    std::vector<std::vector<int>> in;   // node -> arc ids entering it

    int num_nodes() const { return static_cast<int>(labels.size()); }
    int num_arcs() const { return static_cast<int>(arcs.size()); }

    int add_node(std::string label, bool unbounded_cap = false) {
        labels.push_back(std::move(label));
        unbounded.push_back(unbounded_cap);
        out.emplace_back();
        in.emplace_back();
        return num_nodes() - 1;
    }

    int add_arc(int u, int v) {
        if (u == v) throw Error("self-loop arc on node " + labels[u]);
        if (u < 0 || v < 0 || u >= num_nodes() || v >= num_nodes())
            throw Error("arc references unknown node");
        arcs.push_back({u, v});
        int id = num_arcs() - 1;
        out[u].push_back(id);
        in[v].push_back(id);
        return id;
    }

    bool has_arc(int u, int v) const {
        for (int a : out[u])
            if (arcs[a].second == v) return true;
        return false;
    }
};

}  // namespace endmenger
