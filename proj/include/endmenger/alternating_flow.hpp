#pragma once

#include <algorithm>
#include <optional>
#include <queue>
#include <set>
#include <variant>
#include <vector>

#include "digraph.hpp"

namespace endmenger {

class MalformedWalk : public Error {
public:
    explicit MalformedWalk(const std::string& what) : Error("malformed walk: " + what) {}
};

class NoFiniteCut : public Error {
public:
    NoFiniteCut() : Error("every source-sink cut requires an unbounded-capacity node") {}
};

/// A directed path as node ids plus the arc ids between them. A single node
/// with no arcs is a zero-length path.
struct Path {
    std::vector<int> nodes;
    std::vector<int> arcs;
};

/// Pairwise vertex-disjoint source-sink paths (unbounded-capacity nodes may
/// be shared).
using PathFamily = std::vector<Path>;

/// Walk x0 e1 x1 ... en xn alternating between fresh arcs (traversed
/// forward) and family arcs (traversed against their orientation).
struct AlternatingWalk {
    std::vector<int> nodes;
    std::vector<int> arcs;
    std::vector<bool> on_family;  // per arc
};

/// Nodes {u_R}: for each family path the deepest vertex the saturated
/// search reached (the path's start when untouched).
struct CutCertificate {
    std::vector<int> nodes;
};

using AugmentResult = std::variant<AlternatingWalk, CutCertificate>;

/// Breadth-first search forest over (vertex, side) states. Side In means
/// "arrived along a forward arc", side Out "ready to leave forward" (after
/// passing through a free vertex or stepping against a family arc).
struct SearchForest {
    struct Node {
        int vertex;
        bool out_side;
        int parent;       // forest node id, -1 for roots
        int via_arc;      // -1 for pass/pivot steps
        bool via_family;  // arc membership when via_arc >= 0
    };
    std::vector<Node> nodes;

    int add(int vertex, bool out_side, int parent, int via_arc, bool via_family) {
        nodes.push_back({vertex, out_side, parent, via_arc, via_family});
        return static_cast<int>(nodes.size()) - 1;
    }
};

namespace flowdetail {

struct FamilyIndex {
    std::vector<bool> arc_on_family;
    std::vector<bool> node_on_family;
    std::vector<bool> node_is_endpoint;       // some path ends here
    std::vector<bool> node_is_start;          // some path starts here
    std::vector<std::vector<int>> family_in;  // family arcs with head v

    FamilyIndex(const FiniteDigraph& g, const PathFamily& fam)
        : arc_on_family(g.num_arcs(), false),
          node_on_family(g.num_nodes(), false),
          node_is_endpoint(g.num_nodes(), false),
          node_is_start(g.num_nodes(), false),
          family_in(g.num_nodes()) {
        for (const auto& p : fam) {
            for (int v : p.nodes) node_on_family[v] = true;
            if (!p.nodes.empty()) {
                node_is_endpoint[p.nodes.back()] = true;
                node_is_start[p.nodes.front()] = true;
            }
            for (int a : p.arcs) {
                arc_on_family[a] = true;
                family_in[g.arcs[a].second].push_back(a);
            }
        }
        for (auto& v : family_in) std::sort(v.begin(), v.end());
    }
};

}  // namespace flowdetail

/// Checks the alternating-walk conditions against a family: family arcs are
/// traversed head-first, fresh arcs tail-first, the walk is a trail, vertices
/// repeat only on the family, and family vertices are entered or left along
/// a family arc. Unbounded vertices are exempt from the occupancy rules.
inline void check_alternating_walk(const FiniteDigraph& g, const PathFamily& family,
                                   const AlternatingWalk& w) {
    if (w.nodes.empty()) throw MalformedWalk("empty");
    if (w.arcs.size() + 1 != w.nodes.size() || w.on_family.size() != w.arcs.size())
        throw MalformedWalk("inconsistent lengths");
    flowdetail::FamilyIndex fam(g, family);
    std::set<int> used_arcs;
    std::map<int, int> seen;
    for (size_t k = 0; k < w.arcs.size(); ++k) {
        int a = w.arcs[k];
        auto [tail, head] = g.arcs[a];
        if (!used_arcs.insert(a).second) throw MalformedWalk("arc repeated");
        if (fam.arc_on_family[a] != w.on_family[k]) throw MalformedWalk("family flag wrong");
        if (w.on_family[k]) {
            if (head != w.nodes[k] || tail != w.nodes[k + 1])
                throw MalformedWalk("family arc not traversed against orientation");
        } else {
            if (tail != w.nodes[k] || head != w.nodes[k + 1])
                throw MalformedWalk("fresh arc not traversed forward");
        }
    }
    for (size_t i = 0; i < w.nodes.size(); ++i) {
        int v = w.nodes[i];
        if (seen.count(v) && !fam.node_on_family[v] && !g.unbounded[v])
            throw MalformedWalk("vertex repeated off the family");
        seen[v] = static_cast<int>(i);
        bool internal = i > 0 && i + 1 < w.nodes.size();
        if (internal && fam.node_on_family[v] && !g.unbounded[v]) {
            if (!w.on_family[i - 1] && !w.on_family[i])
                throw MalformedWalk("family vertex crossed without a family arc");
        }
    }
}

/// One augmentation step: either an alternating walk from an unused source
/// reaching a free sink slot, or the cut certificate that proves the family
/// maximum. Deterministic: breadth-first in node-id order.
inline AugmentResult alternating_augment(const FiniteDigraph& g, const PathFamily& family,
                                         const std::vector<int>& sources,
                                         const std::vector<int>& sinks,
                                         SearchForest* forest_out = nullptr) {
    flowdetail::FamilyIndex fam(g, family);
    std::vector<bool> is_sink(g.num_nodes(), false);
    for (int t : sinks) is_sink[t] = true;

    const int n = g.num_nodes();
    std::vector<int> state_node(2 * n, -1);  // (v, side) -> forest node id
    SearchForest local;
    SearchForest& forest = forest_out ? *forest_out : local;
    std::queue<int> bfs;

    auto visit = [&](int v, bool out_side, int parent, int arc, bool via_family) -> int {
        int key = 2 * v + (out_side ? 1 : 0);
        if (state_node[key] >= 0) return -1;
        int id = forest.add(v, out_side, parent, arc, via_family);
        state_node[key] = id;
        bfs.push(id);
        return id;
    };

    auto pass_free = [&](int v) { return g.unbounded[v] || !fam.node_on_family[v]; };
    auto sink_free = [&](int v) { return g.unbounded[v] || !fam.node_is_endpoint[v]; };
    auto start_free = [&](int v) { return g.unbounded[v] || !fam.node_is_start[v]; };

    std::vector<int> srt = sources;
    std::sort(srt.begin(), srt.end());
    for (int s : srt)
        if (start_free(s)) visit(s, false, -1, -1, false);

    int accept = -1;
    while (!bfs.empty() && accept < 0) {
        int id = bfs.front();
        bfs.pop();
        int v = forest.nodes[id].vertex;
        if (!forest.nodes[id].out_side) {
            if (pass_free(v)) visit(v, true, id, -1, false);
            for (int a : fam.family_in[v]) visit(g.arcs[a].first, true, id, a, true);
        } else {
            if (is_sink[v] && sink_free(v)) {
                accept = id;
                break;
            }
            for (int a : g.out[v])
                if (!fam.arc_on_family[a]) visit(g.arcs[a].second, false, id, a, false);
            if (fam.node_on_family[v]) visit(v, false, id, -1, false);
        }
    }

    if (accept >= 0) {
        AlternatingWalk w;
        std::vector<int> chain;
        for (int id = accept; id >= 0; id = forest.nodes[id].parent) chain.push_back(id);
        std::reverse(chain.begin(), chain.end());
        w.nodes.push_back(forest.nodes[chain[0]].vertex);
        for (size_t i = 1; i < chain.size(); ++i) {
            const auto& nd = forest.nodes[chain[i]];
            if (nd.via_arc < 0) continue;  // pass or pivot: same vertex
            w.arcs.push_back(nd.via_arc);
            w.on_family.push_back(nd.via_family);
            w.nodes.push_back(nd.vertex);
        }
        return w;
    }

    // Saturated: per family path, the deepest vertex the forest reached
    // (sliding forward over unbounded vertices, which cannot be cut).
    std::vector<bool> visited(g.num_nodes(), false);
    for (const auto& nd : forest.nodes) visited[nd.vertex] = true;
    CutCertificate cut;
    for (const auto& p : family) {
        int pick = p.nodes.front();
        int at = 0;
        for (int i = 0; i < static_cast<int>(p.nodes.size()); ++i)
            if (visited[p.nodes[i]]) {
                pick = p.nodes[i];
                at = i;
            }
        while (g.unbounded[pick] && at + 1 < static_cast<int>(p.nodes.size()))
            pick = p.nodes[++at];
        cut.nodes.push_back(pick);
    }
    std::sort(cut.nodes.begin(), cut.nodes.end());
    cut.nodes.erase(std::unique(cut.nodes.begin(), cut.nodes.end()), cut.nodes.end());
    return cut;
}

/// Rebuilds the family from the subgraph induced by the symmetric difference
/// of the walk's arcs and the family's arcs: one more path comes out.
inline PathFamily reroute_by_symmetric_difference(const FiniteDigraph& g, const PathFamily& family,
                                                  const AlternatingWalk& walk,
                                                  const std::vector<int>& sources,
                                                  const std::vector<int>& sinks) {
    check_alternating_walk(g, family, walk);
    std::vector<bool> is_source(g.num_nodes(), false), is_sink(g.num_nodes(), false);
    for (int s : sources) is_source[s] = true;
    for (int t : sinks) is_sink[t] = true;
    if (!is_source[walk.nodes.front()]) throw MalformedWalk("walk does not start in the sources");
    if (!is_sink[walk.nodes.back()]) throw MalformedWalk("walk does not reach the sinks");

    std::set<int> h;  // arcs of the symmetric difference
    for (const auto& p : family) h.insert(p.arcs.begin(), p.arcs.end());
    for (size_t k = 0; k < walk.arcs.size(); ++k) {
        if (walk.on_family[k])
            h.erase(walk.arcs[k]);
        else
            h.insert(walk.arcs[k]);
    }

    std::vector<std::vector<int>> out(g.num_nodes());
    std::vector<int> indeg(g.num_nodes(), 0);
    for (int a : h) {
        out[g.arcs[a].first].push_back(a);
        ++indeg[g.arcs[a].second];
    }
    for (auto& v : out) std::sort(v.begin(), v.end(), std::greater<>());  // pop_back order

    PathFamily result;
    // zero-length paths are arc-free, so the difference cannot touch them
    std::set<int> zero_nodes;
    for (const auto& p : family)
        if (p.arcs.empty()) {
            result.push_back(p);
            zero_nodes.insert(p.nodes[0]);
        }
    if (walk.arcs.empty()) {
        if (zero_nodes.count(walk.nodes[0]) && !g.unbounded[walk.nodes[0]])
            throw MalformedWalk("trivial path already present");
        result.push_back({{walk.nodes[0]}, {}});
    } else {
        // A walk that begins by cancelling the last arc of a path, or ends by
        // cancelling the first arc of one, strands that path's endpoint with
        // its own trivial path.
        flowdetail::FamilyIndex fam(g, family);
        if (walk.on_family.front() && fam.node_is_endpoint[walk.nodes.front()]) {
            int v = walk.nodes.front();
            if (!is_source[v] || !is_sink[v])
                throw MalformedWalk("backward start from a non source/sink vertex");
            result.push_back({{v}, {}});
        }
        if (walk.on_family.back() && fam.node_is_start[walk.nodes.back()]) {
            int v = walk.nodes.back();
            if (!is_source[v] || !is_sink[v])
                throw MalformedWalk("backward finish at a non source/sink vertex");
            result.push_back({{v}, {}});
        }
    }

    std::vector<int> starts;
    for (int v = 0; v < g.num_nodes(); ++v)
        if (is_source[v])
            for (int k = 0; k < static_cast<int>(out[v].size()) - indeg[v]; ++k)
                starts.push_back(v);
    std::sort(starts.begin(), starts.end());

    for (int s : starts) {
        Path p;
        p.nodes.push_back(s);
        int cur = s;
        while (!out[cur].empty()) {
            int a = out[cur].back();
            out[cur].pop_back();
            --indeg[g.arcs[a].second];
            p.arcs.push_back(a);
            cur = g.arcs[a].second;
            p.nodes.push_back(cur);
            // splice out loops through shared unbounded vertices
            for (size_t i = 0; i + 1 < p.nodes.size(); ++i)
                if (p.nodes[i] == cur) {
                    p.nodes.erase(p.nodes.begin() + i + 1, p.nodes.end());
                    p.arcs.erase(p.arcs.begin() + i, p.arcs.end());
                    break;
                }
            if (is_sink[cur] && out[cur].empty()) break;
        }
        // canonical: touch sources only at the start, sinks only at the end
        int last_s = 0;
        for (int i = 0; i < static_cast<int>(p.nodes.size()); ++i)
            if (is_source[p.nodes[i]]) last_s = i;
        int first_t = -1;
        for (int i = last_s; i < static_cast<int>(p.nodes.size()); ++i)
            if (is_sink[p.nodes[i]]) {
                first_t = i;
                break;
            }
        if (first_t < 0) throw Error("rerouted component does not reach the sinks");
        p.nodes = std::vector<int>(p.nodes.begin() + last_s, p.nodes.begin() + first_t + 1);
        p.arcs = std::vector<int>(p.arcs.begin() + last_s, p.arcs.begin() + first_t);
        result.push_back(std::move(p));
    }

    if (result.size() != family.size() + 1)
        throw Error("symmetric difference produced " + std::to_string(result.size()) +
                    " paths, expected " + std::to_string(family.size() + 1));
    std::vector<int> load(g.num_nodes(), 0);
    for (const auto& p : result)
        for (int v : p.nodes)
            if (++load[v] > 1 && !g.unbounded[v]) throw Error("rerouted paths are not disjoint");
    return result;
}

namespace flowdetail {

inline bool unbounded_path_exists(const FiniteDigraph& g, const std::vector<int>& sources,
                                  const std::vector<int>& sinks) {
    std::vector<bool> seen(g.num_nodes(), false), sink(g.num_nodes(), false);
    for (int t : sinks) sink[t] = true;
    std::queue<int> q;
    for (int s : sources)
        if (g.unbounded[s] && !seen[s]) {
            seen[s] = true;
            q.push(s);
        }
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        if (sink[v]) return true;
        for (int a : g.out[v]) {
            int w = g.arcs[a].second;
            if (!seen[w] && g.unbounded[w]) {
                seen[w] = true;
                q.push(w);
            }
        }
    }
    return false;
}

}  // namespace flowdetail

struct MaxPathsResult {
    int count = 0;
    PathFamily family;
    CutCertificate cut;  // filled by the saturated final search
};

/// Maximum family of vertex-disjoint source-sink paths by repeated
/// alternating augmentation. A single shared vertex counts as a path.
inline MaxPathsResult max_vertex_disjoint_paths(const FiniteDigraph& g,
                                                const std::vector<int>& sources,
                                                const std::vector<int>& sinks) {
    if (flowdetail::unbounded_path_exists(g, sources, sinks)) throw NoFiniteCut();
    MaxPathsResult r;
    while (true) {
        auto step = alternating_augment(g, r.family, sources, sinks);
        if (std::holds_alternative<CutCertificate>(step)) {
            r.cut = std::get<CutCertificate>(step);
            break;
        }
        r.family = reroute_by_symmetric_difference(g, r.family, std::get<AlternatingWalk>(step),
                                                   sources, sinks);
    }
    r.count = static_cast<int>(r.family.size());
    return r;
}

/// True when removing `cut` leaves no source-sink path (capacities ignored:
/// a separator is just a vertex set).
inline bool is_vertex_cut(const FiniteDigraph& g, const std::vector<int>& sources,
                          const std::vector<int>& sinks, const std::vector<int>& cut) {
    std::vector<bool> dead(g.num_nodes(), false), seen(g.num_nodes(), false),
        sink(g.num_nodes(), false);
    for (int c : cut) dead[c] = true;
    for (int t : sinks) sink[t] = true;
    std::queue<int> q;
    for (int s : sources)
        if (!dead[s] && !seen[s]) {
            seen[s] = true;
            q.push(s);
        }
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        if (sink[v]) return false;
        for (int a : g.out[v]) {
            int w = g.arcs[a].second;
            if (!dead[w] && !seen[w]) {
                seen[w] = true;
                q.push(w);
            }
        }
    }
    return true;
}

/// Minimum vertex cut between the source and sink sets, reported as the
/// certificate {u_R} of the saturated search. Throws NoFiniteCut when a path
/// through unbounded vertices only exists.
inline std::vector<int> min_vertex_cut(const FiniteDigraph& g, const std::vector<int>& sources,
                                       const std::vector<int>& sinks) {
    auto r = max_vertex_disjoint_paths(g, sources, sinks);
    for (int v : r.cut.nodes)
        if (g.unbounded[v]) throw NoFiniteCut();
    if (static_cast<int>(r.cut.nodes.size()) != r.count)
        throw Error("cut certificate size mismatch");
    if (!is_vertex_cut(g, sources, sinks, r.cut.nodes))
        throw Error("cut certificate does not separate");
    return r.cut.nodes;
}

}  // namespace endmenger
