#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace endmenger {

using Index = std::int64_t;

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public Error {
public:
    ParseError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

enum class RayDir { Out, In };

inline const char* to_string(RayDir d) { return d == RayDir::Out ? "out" : "in"; }

/// A vertex of the presented digraph: either a core vertex or the index-t
/// vertex of a ray (indices are 1-based; an in-ray's endvertex is index 1).
struct VertexRef {
    enum class Kind { Core, RayVertex };
    Kind kind;
    std::string name;  // core name or ray id
    Index index = 0;   // only for RayVertex

    static VertexRef core(std::string n) { return {Kind::Core, std::move(n), 0}; }
    static VertexRef ray(std::string r, Index t) { return {Kind::RayVertex, std::move(r), t}; }

    bool is_core() const { return kind == Kind::Core; }
    bool is_ray() const { return kind == Kind::RayVertex; }

    friend auto operator<=>(const VertexRef&, const VertexRef&) = default;

    std::string str() const {
        if (is_core()) return name;
        return "(" + name + "," + std::to_string(index) + ")";
    }
};

/// Arcs (from_ray, from_offset + m*from_period) -> (to_ray, to_offset + m*to_period)
/// for every m >= 0. Periods on the two sides are independent.
struct RayRule {
    std::string from_ray;
    Index from_period = 1;
    Index from_offset = 1;
    std::string to_ray;
    Index to_period = 1;
    Index to_offset = 1;

    friend auto operator<=>(const RayRule&, const RayRule&) = default;
};

/// Arcs core -> (ray, offset + m*period) for every m >= 0.
struct CoreToRayBundle {
    std::string core;
    std::string ray;
    Index period = 1;
    Index offset = 1;

    friend auto operator<=>(const CoreToRayBundle&, const CoreToRayBundle&) = default;
};

/// Arcs (ray, offset + m*period) -> core for every m >= 0.
struct RayToCoreBundle {
    std::string ray;
    Index period = 1;
    Index offset = 1;
    std::string core;

    friend auto operator<=>(const RayToCoreBundle&, const RayToCoreBundle&) = default;
};

/// Element of a query set: a concrete vertex or "the end whose class
/// contains this ray".
struct QueryElem {
    enum class Kind { Vertex, End };
    Kind kind;
    VertexRef vertex;  // Kind::Vertex
    std::string ray;   // Kind::End

    static QueryElem vert(VertexRef v) { return {Kind::Vertex, std::move(v), {}}; }
    static QueryElem end_of(std::string r) { return {Kind::End, {}, std::move(r)}; }

    bool is_vertex() const { return kind == Kind::Vertex; }
    bool is_end() const { return kind == Kind::End; }

    friend auto operator<=>(const QueryElem&, const QueryElem&) = default;

    std::string str() const {
        if (is_vertex()) return "v:" + vertex.str();
        return "end:" + ray;
    }
};

using QuerySet = std::vector<QueryElem>;

inline QuerySet& canonicalize(QuerySet& q) {
    std::sort(q.begin(), q.end());
    q.erase(std::unique(q.begin(), q.end()), q.end());
    return q;
}

/// Finite description of an infinite digraph: a finite core, a finite list
/// of symbolic rays, and periodic connection rules. The presented digraph
/// D(P) instantiates each ray (out-ray arcs (i,t)->(i,t+1), in-ray arcs
/// (i,t+1)->(i,t)) plus every rule, bundle and exceptional arc.
struct Presentation {
    std::vector<std::string> cores;
    std::vector<std::pair<std::string, std::string>> core_arcs;
    std::vector<std::pair<std::string, RayDir>> rays;
    std::vector<RayRule> rules;
    std::vector<CoreToRayBundle> core_bundles;
    std::vector<RayToCoreBundle> ray_bundles;
    std::vector<std::pair<VertexRef, VertexRef>> exceptional_arcs;
    std::map<std::string, QuerySet> named_sets;

    bool has_core(const std::string& n) const {
        return std::find(cores.begin(), cores.end(), n) != cores.end();
    }
    bool has_ray(const std::string& r) const {
        return std::find_if(rays.begin(), rays.end(),
                            [&](const auto& p) { return p.first == r; }) != rays.end();
    }
    RayDir ray_dir(const std::string& r) const {
        for (const auto& [id, d] : rays)
            if (id == r) return d;
        throw Error("unknown ray: " + r);
    }

    void sort_canonical() {
        std::sort(cores.begin(), cores.end());
        std::sort(core_arcs.begin(), core_arcs.end());
        std::sort(rays.begin(), rays.end());
        std::sort(rules.begin(), rules.end());
        std::sort(core_bundles.begin(), core_bundles.end());
        std::sort(ray_bundles.begin(), ray_bundles.end());
        std::sort(exceptional_arcs.begin(), exceptional_arcs.end());
        for (auto& [k, v] : named_sets) canonicalize(v);
    }

    friend bool operator==(const Presentation&, const Presentation&) = default;
};

// ---------------------------------------------------------------------------
// Structural constants

/// lcm of all rule and bundle periods (1 for none).
inline Index period_lcm(const Presentation& p) {
    Index l = 1;
    auto fold = [&](Index q) { l = std::lcm(l, q); };
    for (const auto& r : p.rules) {
        fold(r.from_period);
        fold(r.to_period);
    }
    for (const auto& b : p.core_bundles) fold(b.period);
    for (const auto& b : p.ray_bundles) fold(b.period);
    return l;
}

/// Largest ray index written explicitly anywhere in the presentation.
inline Index max_explicit_index(const Presentation& p) {
    Index m = 1;
    auto fold = [&](Index i) { m = std::max(m, i); };
    for (const auto& r : p.rules) {
        fold(r.from_offset);
        fold(r.to_offset);
    }
    for (const auto& b : p.core_bundles) fold(b.offset);
    for (const auto& b : p.ray_bundles) fold(b.offset);
    for (const auto& [u, v] : p.exceptional_arcs) {
        if (u.is_ray()) fold(u.index);
        if (v.is_ray()) fold(v.index);
    }
    for (const auto& [k, q] : p.named_sets)
        for (const auto& e : q)
            if (e.is_vertex() && e.vertex.is_ray()) fold(e.vertex.index);
    return m;
}

/// Window margin: all depth-dependent computations must be invariant under
/// shifting by the period lcm; this margin leaves room for that check.
inline Index window_margin(const Presentation& p) {
    return period_lcm(p) * (Index(p.rays.size()) + Index(p.cores.size()) + 2);
}

/// Boundary of the explicit low zone used by the reachability abstraction.
inline Index theta(const Presentation& p) {
    return max_explicit_index(p) + period_lcm(p) + window_margin(p);
}

// ---------------------------------------------------------------------------
// Validation

/// Empty result means the presentation is well formed. Each diagnostic names
/// the violated constraint.
inline std::vector<std::string> validate(const Presentation& p) {
    std::vector<std::string> diag;
    std::set<std::string> core_set(p.cores.begin(), p.cores.end());
    if (core_set.size() != p.cores.size()) diag.push_back("duplicate core name");
    std::set<std::string> ray_set;
    for (const auto& [id, d] : p.rays) {
        if (!ray_set.insert(id).second) diag.push_back("duplicate ray id: " + id);
        if (core_set.count(id)) diag.push_back("name used as both core and ray: " + id);
    }
    auto need_core = [&](const std::string& n, const char* where) {
        if (!core_set.count(n)) diag.push_back(std::string("unknown core in ") + where + ": " + n);
    };
    auto need_ray = [&](const std::string& n, const char* where) {
        if (!ray_set.count(n)) diag.push_back(std::string("unknown ray in ") + where + ": " + n);
    };
    for (const auto& [f, g] : p.core_arcs) {
        need_core(f, "corearc");
        need_core(g, "corearc");
        if (f == g) diag.push_back("self-loop corearc: " + f);
    }
    for (const auto& r : p.rules) {
        need_ray(r.from_ray, "rule");
        need_ray(r.to_ray, "rule");
        if (r.from_period < 1 || r.to_period < 1) diag.push_back("rule period < 1");
        if (r.from_offset < 1 || r.to_offset < 1) diag.push_back("rule offset < 1");
        if (r.from_ray == r.to_ray) {
            // self-loop instance: from_offset + m*from_period == to_offset + m*to_period
            Index dp = r.to_period - r.from_period;
            Index dr = r.from_offset - r.to_offset;
            if (dp == 0) {
                if (dr == 0) diag.push_back("self-loop instance in rule on ray " + r.from_ray);
            } else if (dr % dp == 0 && dr / dp >= 0) {
                diag.push_back("self-loop instance in rule on ray " + r.from_ray);
            }
        }
    }
    for (const auto& b : p.core_bundles) {
        need_core(b.core, "bundle");
        need_ray(b.ray, "bundle");
        if (b.period < 1 || b.offset < 1) diag.push_back("bundle period/offset < 1");
    }
    for (const auto& b : p.ray_bundles) {
        need_core(b.core, "bundle");
        need_ray(b.ray, "bundle");
        if (b.period < 1 || b.offset < 1) diag.push_back("bundle period/offset < 1");
    }
    auto need_ref = [&](const VertexRef& v, const char* where) {
        if (v.is_core())
            need_core(v.name, where);
        else {
            need_ray(v.name, where);
            if (v.index < 1) diag.push_back(std::string("ray index < 1 in ") + where);
        }
    };
    for (const auto& [u, v] : p.exceptional_arcs) {
        need_ref(u, "arc");
        need_ref(v, "arc");
        if (u == v) diag.push_back("self-loop arc: " + u.str());
    }
    for (const auto& [name, q] : p.named_sets)
        for (const auto& e : q) {
            if (e.is_vertex())
                need_ref(e.vertex, "set");
            else
                need_ray(e.ray, "set");
        }

    // Duplicate arcs after instantiation: by periodicity it suffices to
    // compare instances inside a window of two period-lcms.
    if (diag.empty()) {
        Index span = max_explicit_index(p) + 2 * period_lcm(p) + 2;
        std::set<std::pair<VertexRef, VertexRef>> seen;
        auto add = [&](VertexRef a, VertexRef b, const char* what) {
            if (a == b) return;
            if (!seen.insert({a, b}).second)
                diag.push_back(std::string("duplicate arc from ") + what + ": " + a.str() +
                               " -> " + b.str());
        };
        for (const auto& [id, d] : p.rays) {
            for (Index t = 1; t < span; ++t) {
                if (d == RayDir::Out)
                    add(VertexRef::ray(id, t), VertexRef::ray(id, t + 1), "ray");
                else
                    add(VertexRef::ray(id, t + 1), VertexRef::ray(id, t), "ray");
            }
        }
        for (const auto& [f, g] : p.core_arcs) add(VertexRef::core(f), VertexRef::core(g), "corearc");
        for (const auto& r : p.rules)
            for (Index m = 0;; ++m) {
                Index s = r.from_offset + m * r.from_period;
                Index t = r.to_offset + m * r.to_period;
                if (s > span && t > span) break;
                if (s <= span && t <= span)
                    add(VertexRef::ray(r.from_ray, s), VertexRef::ray(r.to_ray, t), "rule");
            }
        for (const auto& b : p.core_bundles)
            for (Index m = 0; b.offset + m * b.period <= span; ++m)
                add(VertexRef::core(b.core), VertexRef::ray(b.ray, b.offset + m * b.period),
                    "bundle");
        for (const auto& b : p.ray_bundles)
            for (Index m = 0; b.offset + m * b.period <= span; ++m)
                add(VertexRef::ray(b.ray, b.offset + m * b.period), VertexRef::core(b.core),
                    "bundle");
        for (const auto& [u, v] : p.exceptional_arcs) add(u, v, "arc");
    }
    return diag;
}

inline bool is_valid(const Presentation& p) { return validate(p).empty(); }

// ---------------------------------------------------------------------------
// Reversal

/// D(reverse(P)) is the reversal of D(P): out-rays become in-rays and every
/// rule, bundle and arc flips.
inline Presentation reverse(const Presentation& p) {
    Presentation r;
    r.cores = p.cores;
    for (const auto& [f, g] : p.core_arcs) r.core_arcs.push_back({g, f});
    for (const auto& [id, d] : p.rays)
        r.rays.push_back({id, d == RayDir::Out ? RayDir::In : RayDir::Out});
    for (const auto& ru : p.rules)
        r.rules.push_back({ru.to_ray, ru.to_period, ru.to_offset, ru.from_ray, ru.from_period,
                           ru.from_offset});
    for (const auto& b : p.core_bundles) r.ray_bundles.push_back({b.ray, b.period, b.offset, b.core});
    for (const auto& b : p.ray_bundles) r.core_bundles.push_back({b.core, b.ray, b.period, b.offset});
    for (const auto& [u, v] : p.exceptional_arcs) r.exceptional_arcs.push_back({v, u});
    r.named_sets = p.named_sets;
    r.sort_canonical();
    return r;
}

// ---------------------------------------------------------------------------
// Surgery: deleting finite vertex sets and truncating ray tails.

/// Describes what a surgery removed and how surviving vertices were renamed,
/// so query results can be translated between the old and new presentation.
struct SurgeryMap {
    std::set<std::string> dead_cores;
    std::map<std::string, std::set<Index>> deleted_idx;  // per ray, removed indices
    std::map<std::string, Index> tail_shift;             // ray -> T: old t maps to t-T
    std::map<std::string, Index> tail_cut;               // ray -> F: ray removed from F on
    std::map<VertexRef, VertexRef> stub_names;           // old ray vertex -> stub core

    /// Old-presentation vertex to its new name, or nullopt when deleted.
    std::optional<VertexRef> to_new(const VertexRef& v) const {
        if (v.is_core()) {
            if (dead_cores.count(v.name)) return std::nullopt;
            return v;
        }
        auto di = deleted_idx.find(v.name);
        if (di != deleted_idx.end() && di->second.count(v.index)) return std::nullopt;
        auto st = stub_names.find(v);
        if (st != stub_names.end()) return st->second;
        auto tc = tail_cut.find(v.name);
        if (tc != tail_cut.end() && v.index >= tc->second) return std::nullopt;
        auto ts = tail_shift.find(v.name);
        if (ts != tail_shift.end()) return VertexRef::ray(v.name, v.index - ts->second);
        return v;
    }

    /// New-presentation vertex back to its old name.
    VertexRef to_old(const VertexRef& v) const {
        if (v.is_core()) {
            for (const auto& [oldref, stub] : stub_names)
                if (stub == v) return oldref;
            return v;
        }
        auto ts = tail_shift.find(v.name);
        if (ts != tail_shift.end()) return VertexRef::ray(v.name, v.index + ts->second);
        return v;
    }
};

struct SurgeryResult {
    Presentation p;
    SurgeryMap map;
};

namespace detail {

inline std::string fresh_core_name(const Presentation& p, const std::set<std::string>& taken,
                                   std::string base) {
    while (p.has_core(base) || p.has_ray(base) || taken.count(base)) base += "'";
    return base;
}

}  // namespace detail

/// Removes a finite set of vertices and, optionally, whole ray tails
/// {(i,t): t >= F}. A ray with deleted low vertices keeps its identity: the
/// surviving prefix turns into stub core vertices and the tail is re-indexed
/// from 1. A ray with a deleted tail disappears entirely (its stub remains).
inline SurgeryResult apply_surgery(const Presentation& p, const std::vector<VertexRef>& removed,
                                   const std::map<std::string, Index>& tail_cuts = {}) {
    SurgeryResult out;
    SurgeryMap& m = out.map;
    for (const auto& v : removed) {
        if (v.is_core())
            m.dead_cores.insert(v.name);
        else {
            if (!p.has_ray(v.name)) throw Error("surgery on unknown ray: " + v.name);
            auto tc = tail_cuts.find(v.name);
            if (tc != tail_cuts.end() && v.index >= tc->second) continue;  // subsumed
            m.deleted_idx[v.name].insert(v.index);
        }
    }
    for (const auto& [ray, from] : tail_cuts) {
        if (!p.has_ray(ray)) throw Error("surgery on unknown ray: " + ray);
        if (from < 1) throw Error("tail cut index must be >= 1");
        m.tail_cut[ray] = from;
    }

    // Per-ray stub extent: indices 1..stub_top(ray) become cores (minus deleted).
    auto stub_top = [&](const std::string& ray) -> Index {
        auto tc = m.tail_cut.find(ray);
        if (tc != m.tail_cut.end()) return tc->second - 1;
        auto di = m.deleted_idx.find(ray);
        if (di == m.deleted_idx.end() || di->second.empty()) return 0;
        return *di->second.rbegin() - 1;  // everything below the deepest deletion
    };
    auto is_deleted_idx = [&](const std::string& ray, Index t) {
        auto di = m.deleted_idx.find(ray);
        if (di != m.deleted_idx.end() && di->second.count(t)) return true;
        auto tc = m.tail_cut.find(ray);
        return tc != m.tail_cut.end() && t >= tc->second;
    };

    Presentation& q = out.p;
    std::set<std::string> taken;
    for (const auto& c : p.cores)
        if (!m.dead_cores.count(c)) q.cores.push_back(c);
    for (const auto& [id, d] : p.rays) {
        Index top = stub_top(id);
        for (Index t = 1; t <= top; ++t) {
            if (is_deleted_idx(id, t)) continue;
            std::string stub = detail::fresh_core_name(p, taken, id + "." + std::to_string(t));
            taken.insert(stub);
            m.stub_names[VertexRef::ray(id, t)] = VertexRef::core(stub);
            q.cores.push_back(stub);
        }
        if (!m.tail_cut.count(id)) {
            if (top > 0 || is_deleted_idx(id, top + 1)) {
                // tail survives re-indexed; deepest deletion is at top+1
                Index deepest = m.deleted_idx[id].empty() ? 0 : *m.deleted_idx[id].rbegin();
                m.tail_shift[id] = deepest;
            }
            q.rays.push_back({id, p.ray_dir(id)});
        }
    }

    // Maps an old vertex into the new presentation, nullopt when deleted.
    auto map_ref = [&](const VertexRef& v) { return m.to_new(v); };
    auto add_arc = [&](const VertexRef& a, const VertexRef& b) {
        auto na = map_ref(a), nb = map_ref(b);
        if (!na || !nb || *na == *nb) return;
        if (na->is_core() && nb->is_core())
            q.core_arcs.push_back({na->name, nb->name});
        else
            q.exceptional_arcs.push_back({*na, *nb});
    };

    for (const auto& [f, g] : p.core_arcs) add_arc(VertexRef::core(f), VertexRef::core(g));
    for (const auto& [u, v] : p.exceptional_arcs) add_arc(u, v);

    // Ray arcs inside the explicit (stub) zone.
    for (const auto& [id, d] : p.rays) {
        Index top = stub_top(id);
        Index shift = m.tail_shift.count(id) ? m.tail_shift[id] : 0;
        Index expl = std::max(top, shift) + 1;  // deepest old index needing explicit handling
        for (Index t = 1; t < expl; ++t) {
            VertexRef a = d == RayDir::Out ? VertexRef::ray(id, t) : VertexRef::ray(id, t + 1);
            VertexRef b = d == RayDir::Out ? VertexRef::ray(id, t + 1) : VertexRef::ray(id, t);
            add_arc(a, b);
        }
    }

    // Rules: explicit low instances materialize as arcs, the residual tail of
    // instances re-anchors as a rule with shifted offsets.
    auto ray_alive = [&](const std::string& id) { return !m.tail_cut.count(id); };
    auto shift_of = [&](const std::string& id) {
        auto it = m.tail_shift.find(id);
        return it == m.tail_shift.end() ? Index(0) : it->second;
    };
    for (const auto& r : p.rules) {
        Index sf = shift_of(r.from_ray), st = shift_of(r.to_ray);
        Index cf = m.tail_cut.count(r.from_ray) ? m.tail_cut[r.from_ray]
                                                : std::numeric_limits<Index>::max();
        Index ct = m.tail_cut.count(r.to_ray) ? m.tail_cut[r.to_ray]
                                              : std::numeric_limits<Index>::max();
        // first m where both endpoints lie in the surviving, re-indexed tails
        Index m0 = 0;
        auto deep_ok = [&](Index mm) {
            Index s = r.from_offset + mm * r.from_period;
            Index t = r.to_offset + mm * r.to_period;
            return s > sf && t > st;
        };
        if (ray_alive(r.from_ray) && ray_alive(r.to_ray)) {
            while (!deep_ok(m0)) ++m0;
            q.rules.push_back({r.from_ray, r.from_period, r.from_offset + m0 * r.from_period - sf,
                               r.to_ray, r.to_period, r.to_offset + m0 * r.to_period - st});
        } else {
            m0 = std::numeric_limits<Index>::max();
        }
        for (Index mm = 0; mm < m0; ++mm) {
            Index s = r.from_offset + mm * r.from_period;
            Index t = r.to_offset + mm * r.to_period;
            if (s >= cf || t >= ct) break;  // beyond a cut, so are all later instances
            add_arc(VertexRef::ray(r.from_ray, s), VertexRef::ray(r.to_ray, t));
        }
    }
    for (const auto& b : p.core_bundles) {
        if (m.dead_cores.count(b.core)) continue;
        Index sh = shift_of(b.ray);
        if (ray_alive(b.ray)) {
            Index m0 = 0;
            while (b.offset + m0 * b.period <= sh) ++m0;
            q.core_bundles.push_back({b.core, b.ray, b.period, b.offset + m0 * b.period - sh});
            for (Index mm = 0; mm < m0; ++mm)
                add_arc(VertexRef::core(b.core), VertexRef::ray(b.ray, b.offset + mm * b.period));
        } else {
            for (Index mm = 0; b.offset + mm * b.period < m.tail_cut[b.ray]; ++mm)
                add_arc(VertexRef::core(b.core), VertexRef::ray(b.ray, b.offset + mm * b.period));
        }
    }
    for (const auto& b : p.ray_bundles) {
        if (m.dead_cores.count(b.core)) continue;
        Index sh = shift_of(b.ray);
        if (ray_alive(b.ray)) {
            Index m0 = 0;
            while (b.offset + m0 * b.period <= sh) ++m0;
            q.ray_bundles.push_back({b.ray, b.period, b.offset + m0 * b.period - sh, b.core});
            for (Index mm = 0; mm < m0; ++mm)
                add_arc(VertexRef::ray(b.ray, b.offset + mm * b.period), VertexRef::core(b.core));
        } else {
            for (Index mm = 0; b.offset + mm * b.period < m.tail_cut[b.ray]; ++mm)
                add_arc(VertexRef::ray(b.ray, b.offset + mm * b.period), VertexRef::core(b.core));
        }
    }

    // Query sets: deleted elements drop out, surviving ones are renamed.
    for (const auto& [name, qs] : p.named_sets) {
        QuerySet nq;
        for (const auto& e : qs) {
            if (e.is_end()) {
                if (ray_alive(e.ray)) nq.push_back(e);
            } else if (auto nv = map_ref(e.vertex)) {
                nq.push_back(QueryElem::vert(*nv));
            }
        }
        q.named_sets[name] = std::move(nq);
    }

    q.sort_canonical();
    return out;
}

/// Deletes a finite vertex set. Ends are unchanged: every ray keeps its
/// identity, so end ids carry over directly.
inline SurgeryResult delete_vertices(const Presentation& p, const std::vector<VertexRef>& s) {
    return apply_surgery(p, s, {});
}

/// Maps a query set through a surgery (deleted vertices drop out).
inline QuerySet map_query(const QuerySet& q, const SurgeryMap& m) {
    QuerySet out;
    for (const auto& e : q) {
        if (e.is_end()) {
            if (!m.tail_cut.count(e.ray)) out.push_back(e);
        } else if (auto nv = m.to_new(e.vertex)) {
            out.push_back(QueryElem::vert(*nv));
        }
    }
    canonicalize(out);
    return out;
}

// ---------------------------------------------------------------------------
// Instance format

namespace detail {

inline std::vector<std::string> tokens(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == '#') break;
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

inline bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '\''))
            return false;
    return !std::isdigit(static_cast<unsigned char>(s[0]));
}

inline VertexRef parse_ref(const std::string& tok, int line) {
    if (!tok.empty() && tok.front() == '(') {
        auto comma = tok.find(',');
        if (comma == std::string::npos || tok.back() != ')')
            throw ParseError(line, "malformed ray vertex: " + tok);
        std::string ray = tok.substr(1, comma - 1);
        std::string num = tok.substr(comma + 1, tok.size() - comma - 2);
        if (!valid_name(ray)) throw ParseError(line, "bad ray name: " + ray);
        try {
            return VertexRef::ray(ray, std::stoll(num));
        } catch (const std::exception&) {
            throw ParseError(line, "bad ray index: " + num);
        }
    }
    if (!valid_name(tok)) throw ParseError(line, "bad vertex name: " + tok);
    return VertexRef::core(tok);
}

inline Index parse_nat(const std::string& tok, int line) {
    try {
        Index v = std::stoll(tok);
        if (v < 1) throw ParseError(line, "expected positive integer, got " + tok);
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError(line, "expected integer, got " + tok);
    }
}

}  // namespace detail

/// Parses the line-oriented instance format. Declarations:
///   core f | corearc f g | ray b out|in
///   rule b P R -> u P' R'
///   bundle f -> u P R | bundle b P R -> f
///   arc REF -> REF
///   set NAME v:REF end:RAY ...
inline Presentation parse_instance(const std::string& text) {
    Presentation p;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = detail::tokens(line);
        if (t.empty()) continue;
        const std::string& kw = t[0];
        auto expect = [&](size_t n) {
            if (t.size() != n) throw ParseError(lineno, "malformed '" + kw + "' declaration");
        };
        if (kw == "core") {
            expect(2);
            if (!detail::valid_name(t[1])) throw ParseError(lineno, "bad core name: " + t[1]);
            p.cores.push_back(t[1]);
        } else if (kw == "corearc") {
            expect(3);
            p.core_arcs.push_back({t[1], t[2]});
        } else if (kw == "ray") {
            expect(3);
            if (!detail::valid_name(t[1])) throw ParseError(lineno, "bad ray name: " + t[1]);
            if (t[2] != "out" && t[2] != "in")
                throw ParseError(lineno, "ray orientation must be 'out' or 'in'");
            p.rays.push_back({t[1], t[2] == "out" ? RayDir::Out : RayDir::In});
        } else if (kw == "rule") {
            expect(8);
            if (t[4] != "->") throw ParseError(lineno, "expected '->' in rule");
            p.rules.push_back({t[1], detail::parse_nat(t[2], lineno), detail::parse_nat(t[3], lineno),
                               t[5], detail::parse_nat(t[6], lineno),
                               detail::parse_nat(t[7], lineno)});
        } else if (kw == "bundle") {
            if (t.size() == 6 && t[2] == "->") {
                // core -> ray P R
                p.core_bundles.push_back({t[1], t[3], detail::parse_nat(t[4], lineno),
                                          detail::parse_nat(t[5], lineno)});
            } else if (t.size() == 6 && t[4] == "->") {
                // ray P R -> core
                p.ray_bundles.push_back({t[1], detail::parse_nat(t[2], lineno),
                                         detail::parse_nat(t[3], lineno), t[5]});
            } else {
                throw ParseError(lineno, "malformed 'bundle' declaration");
            }
        } else if (kw == "arc") {
            expect(4);
            if (t[2] != "->") throw ParseError(lineno, "expected '->' in arc");
            p.exceptional_arcs.push_back(
                {detail::parse_ref(t[1], lineno), detail::parse_ref(t[3], lineno)});
        } else if (kw == "set") {
            if (t.size() < 2) throw ParseError(lineno, "malformed 'set' declaration");
            if (!detail::valid_name(t[1])) throw ParseError(lineno, "bad set name: " + t[1]);
            QuerySet q;
            for (size_t i = 2; i < t.size(); ++i) {
                if (t[i].starts_with("v:"))
                    q.push_back(QueryElem::vert(detail::parse_ref(t[i].substr(2), lineno)));
                else if (t[i].starts_with("end:"))
                    q.push_back(QueryElem::end_of(t[i].substr(4)));
                else
                    throw ParseError(lineno, "set element must be v:REF or end:RAY, got " + t[i]);
            }
            canonicalize(q);
            p.named_sets[t[1]] = std::move(q);
        } else {
            throw ParseError(lineno, "unknown declaration: " + kw);
        }
    }
    p.sort_canonical();
    return p;
}

inline std::string serialize_instance(const Presentation& p0) {
    Presentation p = p0;
    p.sort_canonical();
    std::ostringstream out;
    for (const auto& c : p.cores) out << "core " << c << "\n";
    for (const auto& [id, d] : p.rays) out << "ray " << id << " " << to_string(d) << "\n";
    for (const auto& [f, g] : p.core_arcs) out << "corearc " << f << " " << g << "\n";
    for (const auto& r : p.rules)
        out << "rule " << r.from_ray << " " << r.from_period << " " << r.from_offset << " -> "
            << r.to_ray << " " << r.to_period << " " << r.to_offset << "\n";
    for (const auto& b : p.core_bundles)
        out << "bundle " << b.core << " -> " << b.ray << " " << b.period << " " << b.offset << "\n";
    for (const auto& b : p.ray_bundles)
        out << "bundle " << b.ray << " " << b.period << " " << b.offset << " -> " << b.core << "\n";
    for (const auto& [u, v] : p.exceptional_arcs)
        out << "arc " << u.str() << " -> " << v.str() << "\n";
    for (const auto& [name, q] : p.named_sets) {
        out << "set " << name;
        for (const auto& e : q) out << " " << e.str();
        out << "\n";
    }
    return out.str();
}

}  // namespace endmenger
