#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "digraph.hpp"
#include "presentation.hpp"

namespace endmenger {

class LTooSmall : public Error {
public:
    explicit LTooSmall(Index l, Index need)
        : Error("truncation depth " + std::to_string(l) + " below required " +
                std::to_string(need)) {}
};

/// The finite digraph on the core plus ray vertices with index <= L, with
/// every presentation arc whose endpoints both survive. The deep band
/// (L - W, L] of each ray serves as the end proxy region for the search
/// oracle and the gadget compiler.
struct Truncation {
    FiniteDigraph g;
    Index depth = 0;
    Index band_width = 0;
    std::vector<VertexRef> ref_of;        // node id -> presentation vertex
    std::map<VertexRef, int> node_of;

    int node(const VertexRef& v) const {
        auto it = node_of.find(v);
        if (it == node_of.end()) throw Error("vertex not in truncation: " + v.str());
        return it->second;
    }
    bool contains(const VertexRef& v) const { return node_of.count(v) > 0; }
    bool in_band(int n) const {
        const VertexRef& v = ref_of[n];
        return v.is_ray() && v.index > depth - band_width;
    }
};

inline Truncation truncate(const Presentation& p, Index depth) {
    Index need = max_explicit_index(p);
    if (depth < need) throw LTooSmall(depth, need);
    Truncation t;
    t.depth = depth;
    t.band_width = std::min(window_margin(p), depth);

    Presentation q = p;
    q.sort_canonical();
    auto add = [&](const VertexRef& v) {
        t.node_of[v] = t.g.add_node(v.str());
        t.ref_of.push_back(v);
    };
    for (const auto& c : q.cores) add(VertexRef::core(c));
    for (const auto& [id, d] : q.rays)
        for (Index i = 1; i <= depth; ++i) add(VertexRef::ray(id, i));

    auto arc = [&](const VertexRef& a, const VertexRef& b) {
        t.g.add_arc(t.node(a), t.node(b));
    };
    for (const auto& [f, g] : q.core_arcs) arc(VertexRef::core(f), VertexRef::core(g));
    for (const auto& [id, d] : q.rays)
        for (Index i = 1; i < depth; ++i) {
            if (d == RayDir::Out)
                arc(VertexRef::ray(id, i), VertexRef::ray(id, i + 1));
            else
                arc(VertexRef::ray(id, i + 1), VertexRef::ray(id, i));
        }
    for (const auto& r : q.rules)
        for (Index m = 0;; ++m) {
            Index s = r.from_offset + m * r.from_period;
            Index d = r.to_offset + m * r.to_period;
            if (s > depth || d > depth) break;
            arc(VertexRef::ray(r.from_ray, s), VertexRef::ray(r.to_ray, d));
        }
    for (const auto& b : q.core_bundles)
        for (Index m = 0; b.offset + m * b.period <= depth; ++m)
            arc(VertexRef::core(b.core), VertexRef::ray(b.ray, b.offset + m * b.period));
    for (const auto& b : q.ray_bundles)
        for (Index m = 0; b.offset + m * b.period <= depth; ++m)
            arc(VertexRef::ray(b.ray, b.offset + m * b.period), VertexRef::core(b.core));
    for (const auto& [u, v] : q.exceptional_arcs) arc(u, v);
    return t;
}

/// DOT rendering of a truncation; nodes in the deep band are annotated, and
/// callers can tag nodes (e.g. with the end their ray belongs to).
inline std::string to_dot(const Truncation& t,
                          const std::map<std::string, std::string>& ray_tags = {}) {
    std::ostringstream o;
    o << "digraph truncation {\n  rankdir=LR;\n";
    for (int n = 0; n < t.g.num_nodes(); ++n) {
        const VertexRef& v = t.ref_of[n];
        o << "  n" << n << " [label=\"" << v.str();
        if (v.is_ray()) {
            auto it = ray_tags.find(v.name);
            if (it != ray_tags.end()) o << "\\n" << it->second;
        }
        o << "\"";
        if (t.in_band(n)) o << ", style=filled, fillcolor=lightgray";
        if (v.is_core()) o << ", shape=box";
        o << "];\n";
    }
    for (const auto& [u, v] : t.g.arcs) o << "  n" << u << " -> n" << v << ";\n";
    o << "}\n";
    return o.str();
}

}  // namespace endmenger
