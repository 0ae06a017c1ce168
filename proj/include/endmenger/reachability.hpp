#pragma once

#include <map>
#include <queue>
#include <variant>
#include <vector>

#include "presentation.hpp"

namespace endmenger {

/// Endpoint of a reachability query: a concrete vertex, or the tail of a
/// ray meaning "from arbitrarily high indices" (source side) / "to
/// arbitrarily high indices" (target side).
struct Tail {
    std::string ray;
};
using ReachPoint = std::variant<VertexRef, Tail>;

/// Reachability in the presented infinite digraph via saturation over
/// abstract states: every vertex with index below the explicit-zone bound
/// is its own state, and one high state per ray stands for "somewhere above
/// the bound". Out-rays flow explicit -> high, in-rays high -> explicit,
/// rules and bundles connect high states and the explicit zone.
class Reachability {
public:
    explicit Reachability(const Presentation& p) : p_(p), bound_(theta(p)) { build(); }

    Index explicit_bound() const { return bound_; }
    int num_states() const { return static_cast<int>(adj_.size()); }

    int state(const VertexRef& v) const {
        auto it = state_of_.find(v);
        if (it == state_of_.end())
            throw Error("vertex outside the explicit zone: " + v.str());
        return it->second;
    }
    int high_state(const std::string& ray) const {
        auto it = high_of_.find(ray);
        if (it == high_of_.end()) throw Error("unknown ray: " + ray);
        return it->second;
    }
    bool is_high(int s) const { return !ref_of_[s].has_value(); }
    const std::optional<VertexRef>& ref(int s) const { return ref_of_[s]; }
    const std::string& ray_of_high(int s) const { return high_ray_[s]; }

    std::vector<int> states_for(const ReachPoint& pt) const {
        if (std::holds_alternative<Tail>(pt)) return {high_state(std::get<Tail>(pt).ray)};
        const VertexRef& v = std::get<VertexRef>(pt);
        if (v.is_ray() && v.index > bound_) {
            // deep concrete vertex: the high state over-approximates single
            // vertices, so refuse rather than answer wrongly
            throw Error("explicit query above the zone bound: " + v.str());
        }
        return {state(v)};
    }

    std::vector<bool> forward_closure(const std::vector<int>& from) const {
        return closure(from, adj_);
    }
    std::vector<bool> backward_closure(const std::vector<int>& to) const {
        return closure(to, radj_);
    }

    bool reachable(const ReachPoint& src, const ReachPoint& dst) const {
        auto seen = forward_closure(states_for(src));
        for (int s : states_for(dst))
            if (seen[s]) return true;
        return false;
    }

private:
    std::vector<bool> closure(const std::vector<int>& from,
                              const std::vector<std::vector<int>>& adj) const {
        std::vector<bool> seen(adj.size(), false);
        std::queue<int> q;
        for (int s : from)
            if (!seen[s]) {
                seen[s] = true;
                q.push(s);
            }
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int w : adj[v])
                if (!seen[w]) {
                    seen[w] = true;
                    q.push(w);
                }
        }
        return seen;
    }

    void add_state(std::optional<VertexRef> ref, const std::string& high_ray) {
        ref_of_.push_back(std::move(ref));
        high_ray_.push_back(high_ray);
        adj_.emplace_back();
        radj_.emplace_back();
    }

    void arc(int a, int b) {
        if (a == b) return;
        adj_[a].push_back(b);
        radj_[b].push_back(a);
    }

    void build() {
        Presentation q = p_;
        q.sort_canonical();
        for (const auto& c : q.cores) {
            state_of_[VertexRef::core(c)] = num_states();
            add_state(VertexRef::core(c), {});
        }
        for (const auto& [id, d] : q.rays)
            for (Index t = 1; t <= bound_; ++t) {
                state_of_[VertexRef::ray(id, t)] = num_states();
                add_state(VertexRef::ray(id, t), {});
            }
        for (const auto& [id, d] : q.rays) {
            high_of_[id] = num_states();
            add_state(std::nullopt, id);
        }

        auto expl = [&](const VertexRef& v) { return state_of_.at(v); };
        for (const auto& [f, g] : q.core_arcs)
            arc(expl(VertexRef::core(f)), expl(VertexRef::core(g)));
        for (const auto& [u, v] : q.exceptional_arcs) arc(expl(u), expl(v));
        for (const auto& [id, d] : q.rays) {
            for (Index t = 1; t < bound_; ++t) {
                if (d == RayDir::Out)
                    arc(expl(VertexRef::ray(id, t)), expl(VertexRef::ray(id, t + 1)));
                else
                    arc(expl(VertexRef::ray(id, t + 1)), expl(VertexRef::ray(id, t)));
            }
            if (d == RayDir::Out) {
                // climbing past the bound is always possible
                for (Index t = 1; t <= bound_; ++t)
                    arc(expl(VertexRef::ray(id, t)), high_of_[id]);
            } else {
                for (Index t = 1; t <= bound_; ++t)
                    arc(high_of_[id], expl(VertexRef::ray(id, t)));
            }
        }
        for (const auto& r : q.rules) {
            arc(high_of_[r.from_ray], high_of_[r.to_ray]);
            bool to_out = q.ray_dir(r.to_ray) == RayDir::Out;
            bool from_in = q.ray_dir(r.from_ray) == RayDir::In;
            for (Index m = 0;; ++m) {
                Index s = r.from_offset + m * r.from_period;
                Index t = r.to_offset + m * r.to_period;
                if (s > bound_ && t > bound_) break;
                if (s <= bound_ && t <= bound_) {
                    arc(expl(VertexRef::ray(r.from_ray, s)), expl(VertexRef::ray(r.to_ray, t)));
                } else if (s <= bound_) {
                    // landing beyond the zone: an out-ray keeps climbing, an
                    // in-ray walks back down into the zone
                    if (to_out) {
                        arc(expl(VertexRef::ray(r.from_ray, s)), high_of_[r.to_ray]);
                    } else {
                        for (Index tt = 1; tt <= bound_; ++tt)
                            arc(expl(VertexRef::ray(r.from_ray, s)),
                                expl(VertexRef::ray(r.to_ray, tt)));
                    }
                } else {
                    // source beyond the zone, landing inside
                    if (from_in) {
                        arc(high_of_[r.from_ray], expl(VertexRef::ray(r.to_ray, t)));
                    } else {
                        for (Index ss = 1; ss <= bound_; ++ss)
                            arc(expl(VertexRef::ray(r.from_ray, ss)),
                                expl(VertexRef::ray(r.to_ray, t)));
                    }
                }
            }
        }
        for (const auto& b : q.core_bundles) {
            // the core can enter the ray arbitrarily high; for an in-ray the
            // high state then reaches every level, so no extra fan is needed
            arc(expl(VertexRef::core(b.core)), high_of_[b.ray]);
            for (Index m = 0; b.offset + m * b.period <= bound_; ++m)
                arc(expl(VertexRef::core(b.core)),
                    expl(VertexRef::ray(b.ray, b.offset + m * b.period)));
        }
        for (const auto& b : q.ray_bundles) {
            // from arbitrarily high the ray meets a deeper bundle instance
            arc(high_of_[b.ray], expl(VertexRef::core(b.core)));
            for (Index m = 0; b.offset + m * b.period <= bound_; ++m)
                arc(expl(VertexRef::ray(b.ray, b.offset + m * b.period)),
                    expl(VertexRef::core(b.core)));
        }
    }

    Presentation p_;
    Index bound_;
    std::map<VertexRef, int> state_of_;
    std::map<std::string, int> high_of_;
    std::vector<std::optional<VertexRef>> ref_of_;
    std::vector<std::string> high_ray_;
    std::vector<std::vector<int>> adj_;
    std::vector<std::vector<int>> radj_;
};

}  // namespace endmenger
