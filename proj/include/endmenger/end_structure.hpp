#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alternating_flow.hpp"
#include "digraph.hpp"
#include "presentation.hpp"

namespace endmenger {

class NoStabilization : public Error {
public:
    explicit NoStabilization(Index k_max)
        : Error("value did not stabilize up to window length " + std::to_string(k_max)) {}
};

/// Evaluates f at k and k + step; equal values are accepted, otherwise the
/// window doubles until k_max. Loud failure beats a silently wrong answer.
template <typename F>
auto stabilized_value(F&& f, Index k0, Index step, Index k_max) {
    for (Index k = k0; k <= k_max; k *= 2) {
        auto a = f(k);
        auto b = f(k + step);
        if (a == b) return a;
    }
    throw NoStabilization(k_max);
}

/// Finite digraph on the presentation rays: an arc i -> j for every rule
/// connecting ray i to ray j. Bundles and exceptional arcs are excluded;
/// only rules can carry infinitely many disjoint inter-ray paths.
struct RayReachGraph {
    std::vector<std::string> ray_ids;  // sorted
    std::map<std::string, int> index;
    std::vector<std::set<int>> adj;

    int node(const std::string& ray) const {
        auto it = index.find(ray);
        if (it == index.end()) throw Error("unknown ray: " + ray);
        return it->second;
    }
};

inline RayReachGraph ray_reachability(const Presentation& p) {
    RayReachGraph g;
    for (const auto& [id, d] : p.rays) g.ray_ids.push_back(id);
    std::sort(g.ray_ids.begin(), g.ray_ids.end());
    for (size_t i = 0; i < g.ray_ids.size(); ++i) g.index[g.ray_ids[i]] = static_cast<int>(i);
    g.adj.resize(g.ray_ids.size());
    for (const auto& r : p.rules) g.adj[g.node(r.from_ray)].insert(g.node(r.to_ray));
    return g;
}

/// An end: a strongly connected component of the ray-reachability digraph
/// together with the maximum numbers of disjoint out-/in-rays it carries.
struct End {
    int id = 0;
    std::vector<std::string> member_rays;
    bool has_in_ray = false;
    bool has_out_ray = false;
    int width_out = 0;
    int width_in = 0;
};

/// Query sets resolved against the end structure: explicit vertices plus
/// end ids.
struct ResolvedQuery {
    std::set<VertexRef> vertices;
    std::set<int> ends;

    friend auto operator<=>(const ResolvedQuery&, const ResolvedQuery&) = default;
};

/// Up/down closures: vertices (including dominating core vertices) and ends.
using ClosedSet = ResolvedQuery;

/// End structure of one presentation: ends, the order between them, widths
/// and the derived closure operators. Pure and cacheable.
class EndStructure {
public:
    explicit EndStructure(Presentation pres) : p_(std::move(pres)), gamma_(ray_reachability(p_)) {
        compute_sccs();
        compute_reach();
        compute_ends();
    }

    const Presentation& presentation() const { return p_; }
    const RayReachGraph& gamma() const { return gamma_; }
    const std::vector<End>& ends() const { return ends_; }

    int end_of_ray(const std::string& ray) const { return scc_of_[gamma_.node(ray)]; }
    const End& end(int id) const { return ends_.at(id); }
    int num_ends() const { return static_cast<int>(ends_.size()); }

    /// omega1 <= omega2: the first end's component reaches the second's.
    bool end_leq(int e1, int e2) const { return reach_[e1][e2]; }

    ResolvedQuery resolve(const QuerySet& q) const {
        ResolvedQuery r;
        for (const auto& e : q) {
            if (e.is_vertex())
                r.vertices.insert(e.vertex);
            else
                r.ends.insert(end_of_ray(e.ray));
        }
        return r;
    }

    /// Core vertices receiving (side=in) or emitting (side=out) infinitely
    /// many disjoint paths from/to rays of the given ends.
    std::set<VertexRef> dominating(const ResolvedQuery& q, RayDir side) const {
        std::set<VertexRef> out;
        if (side == RayDir::In) {
            for (const auto& b : p_.ray_bundles) {
                int i = end_of_ray(b.ray);
                for (int a : q.ends)
                    if (reach_[a][i]) out.insert(VertexRef::core(b.core));
            }
        } else {
            for (const auto& b : p_.core_bundles) {
                int j = end_of_ray(b.ray);
                for (int bq : q.ends)
                    if (reach_[j][bq]) out.insert(VertexRef::core(b.core));
            }
        }
        return out;
    }

    /// Up closure: the set itself, every end above one of its ends, and all
    /// in-dominating vertices. Down closure mirrors it.
    ClosedSet closure(const ResolvedQuery& q, bool up) const {
        ClosedSet c;
        c.vertices = q.vertices;
        for (int e = 0; e < num_ends(); ++e)
            for (int a : q.ends)
                if (up ? reach_[a][e] : reach_[e][a]) c.ends.insert(e);
        for (const auto& v : dominating(q, up ? RayDir::In : RayDir::Out)) c.vertices.insert(v);
        return c;
    }

    ClosedSet closure(const QuerySet& q, bool up) const { return closure(resolve(q), up); }

    /// False exactly when some end of A can feed an end of B through
    /// infinitely many disjoint channels; vertex elements never obstruct.
    bool is_dispersed(const ResolvedQuery& a, const ResolvedQuery& b) const {
        for (int ea : a.ends)
            for (int eb : b.ends)
                if (end(ea).has_in_ray && end(eb).has_out_ray && reach_[ea][eb]) return false;
        return true;
    }
    bool is_dispersed(const QuerySet& a, const QuerySet& b) const {
        return is_dispersed(resolve(a), resolve(b));
    }

    int width(int end_id, RayDir dir) const {
        return dir == RayDir::Out ? end(end_id).width_out : end(end_id).width_in;
    }

    /// Max vertex-disjoint boundary crossings of the component's window
    /// strip of length k: out-direction paths must leave through the top,
    /// in-direction paths enter from it.
    int strip_flow(const std::vector<std::string>& rays, RayDir dir, Index k) const {
        Index base = theta(p_) + 1;
        FiniteDigraph g;
        std::map<std::pair<int, Index>, int> node;  // (ray pos, level) -> node
        std::map<std::string, int> pos;
        for (size_t i = 0; i < rays.size(); ++i) pos[rays[i]] = static_cast<int>(i);
        std::vector<std::string> sorted_rays = rays;
        std::sort(sorted_rays.begin(), sorted_rays.end());
        for (const auto& r : sorted_rays)
            for (Index t = 0; t < k; ++t)
                node[{pos[r], base + t}] =
                    g.add_node(r + "@" + std::to_string(base + t));
        auto in_window = [&](Index t) { return t >= base && t < base + k; };
        std::map<std::string, int> boundary;  // virtual node per ray
        auto boundary_node = [&](const std::string& r) {
            auto it = boundary.find(r);
            if (it != boundary.end()) return it->second;
            return boundary[r] = g.add_node(r + "@boundary", true);
        };

        for (const auto& r : rays) {
            RayDir d = p_.ray_dir(r);
            for (Index t = base; t + 1 < base + k; ++t) {
                if (d == RayDir::Out)
                    g.add_arc(node[{pos[r], t}], node[{pos[r], t + 1}]);
                else
                    g.add_arc(node[{pos[r], t + 1}], node[{pos[r], t}]);
            }
            if (d == RayDir::Out && dir == RayDir::Out)
                g.add_arc(node[{pos[r], base + k - 1}], boundary_node(r));
            if (d == RayDir::In && dir == RayDir::In)
                g.add_arc(boundary_node(r), node[{pos[r], base + k - 1}]);
        }
        for (const auto& ru : p_.rules) {
            if (!pos.count(ru.from_ray) || !pos.count(ru.to_ray)) continue;
            for (Index m = 0;; ++m) {
                Index s = ru.from_offset + m * ru.from_period;
                Index t = ru.to_offset + m * ru.to_period;
                if (s >= base + k && t >= base + k) break;
                bool s_in = in_window(s), t_in = in_window(t);
                if (s_in && t_in)
                    g.add_arc(node[{pos[ru.from_ray], s}], node[{pos[ru.to_ray], t}]);
                else if (dir == RayDir::Out && s_in && t >= base + k)
                    g.add_arc(node[{pos[ru.from_ray], s}], boundary_node(ru.to_ray));
                else if (dir == RayDir::In && t_in && s >= base + k)
                    g.add_arc(boundary_node(ru.from_ray), node[{pos[ru.to_ray], t}]);
            }
        }
        std::vector<int> real_nodes, virt;
        for (const auto& [key, n] : node) real_nodes.push_back(n);
        for (const auto& [r, n] : boundary) virt.push_back(n);
        if (virt.empty()) return 0;
        if (dir == RayDir::Out) return max_vertex_disjoint_paths(g, real_nodes, virt).count;
        return max_vertex_disjoint_paths(g, virt, real_nodes).count;
    }

    /// Maximum number of pairwise disjoint rays of the given direction in
    /// the end: the stabilized strip flow.
    int end_width(int end_id, RayDir dir) const { return width(end_id, dir); }

private:
    void compute_sccs() {
        int n = static_cast<int>(gamma_.ray_ids.size());
        std::vector<int> order, comp(n, -1), low(n), num(n, -1), stack;
        std::vector<bool> on_stack(n, false);
        int counter = 0, comps = 0;
        // iterative Tarjan
        for (int root = 0; root < n; ++root) {
            if (num[root] >= 0) continue;
            std::vector<std::pair<int, std::set<int>::const_iterator>> call;
            num[root] = low[root] = counter++;
            stack.push_back(root);
            on_stack[root] = true;
            call.push_back({root, gamma_.adj[root].begin()});
            while (!call.empty()) {
                auto& [v, it] = call.back();
                if (it != gamma_.adj[v].end()) {
                    int w = *it;
                    ++it;
                    if (num[w] < 0) {
                        num[w] = low[w] = counter++;
                        stack.push_back(w);
                        on_stack[w] = true;
                        call.push_back({w, gamma_.adj[w].begin()});
                    } else if (on_stack[w]) {
                        low[v] = std::min(low[v], num[w]);
                    }
                } else {
                    if (low[v] == num[v]) {
                        while (true) {
                            int w = stack.back();
                            stack.pop_back();
                            on_stack[w] = false;
                            comp[w] = comps;
                            if (w == v) break;
                        }
                        ++comps;
                    }
                    int v_done = v;
                    call.pop_back();
                    if (!call.empty())
                        low[call.back().first] = std::min(low[call.back().first], low[v_done]);
                }
            }
        }
        // renumber components by smallest member ray id for stable output
        std::vector<std::string> key(comps);
        for (int v = 0; v < n; ++v) {
            const std::string& r = gamma_.ray_ids[v];
            if (key[comp[v]].empty() || r < key[comp[v]]) key[comp[v]] = r;
        }
        std::vector<int> perm(comps);
        std::vector<int> by_key(comps);
        for (int c = 0; c < comps; ++c) by_key[c] = c;
        std::sort(by_key.begin(), by_key.end(), [&](int a, int b) { return key[a] < key[b]; });
        for (int rank = 0; rank < comps; ++rank) perm[by_key[rank]] = rank;
        scc_of_.resize(n);
        for (int v = 0; v < n; ++v) scc_of_[v] = perm[comp[v]];
        num_sccs_ = comps;
    }

    void compute_reach() {
        reach_.assign(num_sccs_, std::vector<bool>(num_sccs_, false));
        for (int c = 0; c < num_sccs_; ++c) reach_[c][c] = true;
        for (size_t v = 0; v < gamma_.adj.size(); ++v)
            for (int w : gamma_.adj[v]) reach_[scc_of_[v]][scc_of_[w]] = true;
        for (int k = 0; k < num_sccs_; ++k)
            for (int i = 0; i < num_sccs_; ++i)
                if (reach_[i][k])
                    for (int j = 0; j < num_sccs_; ++j)
                        if (reach_[k][j]) reach_[i][j] = true;
    }

    void compute_ends() {
        ends_.resize(num_sccs_);
        for (int c = 0; c < num_sccs_; ++c) ends_[c].id = c;
        for (size_t v = 0; v < gamma_.ray_ids.size(); ++v)
            ends_[scc_of_[v]].member_rays.push_back(gamma_.ray_ids[v]);
        Index w = std::max<Index>(window_margin(p_), 1);
        for (auto& e : ends_) {
            std::sort(e.member_rays.begin(), e.member_rays.end());
            e.width_out = stabilized_value(
                [&](Index k) { return strip_flow(e.member_rays, RayDir::Out, k); }, 4 * w,
                period_lcm(p_), 64 * w);
            e.width_in = stabilized_value(
                [&](Index k) { return strip_flow(e.member_rays, RayDir::In, k); }, 4 * w,
                period_lcm(p_), 64 * w);
            e.has_out_ray = e.width_out >= 1;
            e.has_in_ray = e.width_in >= 1;
        }
    }

    Presentation p_;
    RayReachGraph gamma_;
    std::vector<int> scc_of_;
    int num_sccs_ = 0;
    std::vector<std::vector<bool>> reach_;
    std::vector<End> ends_;
};

}  // namespace endmenger
