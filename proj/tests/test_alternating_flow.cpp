#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include <endmenger/alternating_flow.hpp>
#include <endmenger/split_maxflow.hpp>

using namespace endmenger;

namespace {

FiniteDigraph random_digraph(std::mt19937_64& rng, int max_n, bool with_unbounded,
                             std::vector<int>& sources, std::vector<int>& sinks) {
    auto pick = [&](int n) { return int(rng() % n); };
    FiniteDigraph g;
    int n = 2 + pick(max_n - 1);
    for (int i = 0; i < n; ++i)
        g.add_node("v" + std::to_string(i), with_unbounded && pick(6) == 0);
    int arcs = pick(3 * n) + 1;
    std::set<std::pair<int, int>> seen;
    for (int i = 0; i < arcs; ++i) {
        int u = pick(n), v = pick(n);
        if (u == v || !seen.insert({u, v}).second) continue;
        g.add_arc(u, v);
    }
    std::set<int> s, t;
    int ns = 1 + pick(3), nt = 1 + pick(3);
    for (int i = 0; i < ns; ++i) s.insert(pick(n));
    for (int i = 0; i < nt; ++i) t.insert(pick(n));
    sources.assign(s.begin(), s.end());
    sinks.assign(t.begin(), t.end());
    return g;
}

}  // namespace

TEST_CASE("single arc yields one path") {
    FiniteDigraph g;
    int s = g.add_node("s"), t = g.add_node("t");
    g.add_arc(s, t);
    auto r = max_vertex_disjoint_paths(g, {s}, {t});
    REQUIRE(r.count == 1);
    REQUIRE(r.family[0].nodes == std::vector<int>{s, t});
    auto cut = min_vertex_cut(g, {s}, {t});
    CHECK(cut.size() == 1);
    CHECK((cut[0] == s || cut[0] == t));
}

TEST_CASE("a shared source/sink vertex is a zero-length path") {
    FiniteDigraph g;
    int v = g.add_node("v"), w = g.add_node("w");
    g.add_arc(v, w);
    auto r = max_vertex_disjoint_paths(g, {v}, {v});
    REQUIRE(r.count == 1);
    CHECK(r.family[0].nodes == std::vector<int>{v});
    CHECK(r.family[0].arcs.empty());
}

TEST_CASE("alternating_augment basics") {
    FiniteDigraph g;
    int s = g.add_node("s"), a = g.add_node("a"), t = g.add_node("t");
    g.add_arc(s, a);
    g.add_arc(a, t);
    SECTION("empty family gives a plain path walk") {
        auto res = alternating_augment(g, {}, {s}, {t});
        REQUIRE(std::holds_alternative<AlternatingWalk>(res));
        auto w = std::get<AlternatingWalk>(res);
        CHECK(w.nodes == std::vector<int>{s, a, t});
        CHECK(w.on_family == std::vector<bool>{false, false});
    }
    SECTION("maximum family gives a cut certificate of equal size") {
        auto r = max_vertex_disjoint_paths(g, {s}, {t});
        auto res = alternating_augment(g, r.family, {s}, {t});
        REQUIRE(std::holds_alternative<CutCertificate>(res));
        CHECK(std::get<CutCertificate>(res).nodes.size() == r.family.size());
    }
}

TEST_CASE("reroute grows the family by one") {
    FiniteDigraph g;
    int s = g.add_node("s"), a = g.add_node("a"), t = g.add_node("t");
    int sa = g.add_arc(s, a);
    int at = g.add_arc(a, t);
    AlternatingWalk w{{s, a, t}, {sa, at}, {false, false}};
    auto fam = reroute_by_symmetric_difference(g, {}, w, {s}, {t});
    REQUIRE(fam.size() == 1);
    CHECK(fam[0].nodes == std::vector<int>{s, a, t});
    SECTION("violating the walk conditions is rejected") {
        AlternatingWalk bad{{s, a, t}, {sa, at}, {true, false}};
        CHECK_THROWS_AS(reroute_by_symmetric_difference(g, {}, bad, {s}, {t}), MalformedWalk);
        AlternatingWalk reversed{{t, a, s}, {at, sa}, {false, false}};
        CHECK_THROWS_AS(reroute_by_symmetric_difference(g, {}, reversed, {s}, {t}),
                        MalformedWalk);
    }
}

TEST_CASE("ladder rung reroute") {
    // two rows of 12, rungs bottom->top, sinks deep on the top row
    FiniteDigraph g;
    const int L = 12;
    std::vector<int> b(L), u(L);
    for (int i = 0; i < L; ++i) b[i] = g.add_node("b" + std::to_string(i + 1));
    for (int i = 0; i < L; ++i) u[i] = g.add_node("u" + std::to_string(i + 1));
    for (int i = 0; i + 1 < L; ++i) g.add_arc(b[i], b[i + 1]);
    std::vector<int> uarc(L - 1);
    for (int i = 0; i + 1 < L; ++i) uarc[i] = g.add_arc(u[i], u[i + 1]);
    for (int i = 0; i < L; ++i) g.add_arc(b[i], u[i]);
    std::vector<int> S{b[0], u[0]}, T{u[L - 2], u[L - 1]};

    PathFamily top(1);
    top[0].nodes.assign(u.begin(), u.end());
    top[0].arcs = uarc;
    auto res = alternating_augment(g, top, S, T);
    REQUIRE(std::holds_alternative<AlternatingWalk>(res));
    auto w = std::get<AlternatingWalk>(res);
    // the walk must climb the bottom row, cross a rung and step back once
    CHECK(std::count(w.on_family.begin(), w.on_family.end(), true) == 1);
    auto fam = reroute_by_symmetric_difference(g, top, w, S, T);
    REQUIRE(fam.size() == 2);
    CHECK(max_vertex_disjoint_paths(g, S, T).count == 2);
    CHECK(split_max_disjoint_paths(g, S, T) == 2);
}

TEST_CASE("search forest satisfies the growth invariants") {
    FiniteDigraph g;
    const int L = 6;
    std::vector<int> b(L), u(L);
    for (int i = 0; i < L; ++i) b[i] = g.add_node("b" + std::to_string(i));
    for (int i = 0; i < L; ++i) u[i] = g.add_node("u" + std::to_string(i));
    for (int i = 0; i + 1 < L; ++i) g.add_arc(b[i], b[i + 1]);
    std::vector<int> uarc(L - 1);
    for (int i = 0; i + 1 < L; ++i) uarc[i] = g.add_arc(u[i], u[i + 1]);
    for (int i = 0; i < L; ++i) g.add_arc(b[i], u[i]);
    PathFamily top(1);
    top[0].nodes.assign(u.begin(), u.end());
    top[0].arcs = uarc;

    SearchForest forest;
    alternating_augment(g, top, {b[0], u[0]}, {u[L - 1]}, &forest);

    // arc map injectivity
    std::set<int> used;
    for (const auto& nd : forest.nodes)
        if (nd.via_arc >= 0) CHECK(used.insert(nd.via_arc).second);

    // every rooted path's image is an alternating walk
    for (size_t id = 0; id < forest.nodes.size(); ++id) {
        std::vector<int> chain;
        for (int cur = int(id); cur >= 0; cur = forest.nodes[cur].parent) chain.push_back(cur);
        std::reverse(chain.begin(), chain.end());
        AlternatingWalk w;
        w.nodes.push_back(forest.nodes[chain[0]].vertex);
        for (size_t i = 1; i < chain.size(); ++i) {
            const auto& nd = forest.nodes[chain[i]];
            if (nd.via_arc < 0) continue;
            w.arcs.push_back(nd.via_arc);
            w.on_family.push_back(nd.via_family);
            w.nodes.push_back(nd.vertex);
        }
        CHECK_NOTHROW(check_alternating_walk(g, top, w));
    }
}

TEST_CASE("unbounded capacity") {
    SECTION("paths through unbounded vertices may share them") {
        FiniteDigraph g;
        int s1 = g.add_node("s1"), s2 = g.add_node("s2"), x = g.add_node("x", true),
            t1 = g.add_node("t1"), t2 = g.add_node("t2");
        g.add_arc(s1, x);
        g.add_arc(s2, x);
        g.add_arc(x, t1);
        g.add_arc(x, t2);
        auto r = max_vertex_disjoint_paths(g, {s1, s2}, {t1, t2});
        CHECK(r.count == 2);
        auto cut = min_vertex_cut(g, {s1, s2}, {t1, t2});
        CHECK(cut.size() == 2);
        for (int v : cut) CHECK_FALSE(g.unbounded[v]);
    }
    SECTION("a fully unbounded route has no finite cut") {
        FiniteDigraph g;
        int s = g.add_node("s", true), t = g.add_node("t", true);
        g.add_arc(s, t);
        CHECK_THROWS_AS(min_vertex_cut(g, {s}, {t}), NoFiniteCut);
    }
}

TEST_CASE("random digraphs: engine equals split-flow oracle and finite Menger holds") {
    std::mt19937_64 rng(20250811);
    int checked = 0;
    for (int iter = 0; iter < 300; ++iter) {
        std::vector<int> S, T;
        auto g = random_digraph(rng, 20, iter % 3 == 0, S, T);
        int oracle = split_max_disjoint_paths(g, S, T);
        CAPTURE(iter, g.num_nodes(), g.num_arcs());
        if (oracle >= SplitMaxFlow::kInf) {
            CHECK_THROWS_AS(max_vertex_disjoint_paths(g, S, T), NoFiniteCut);
            continue;
        }
        auto r = max_vertex_disjoint_paths(g, S, T);
        REQUIRE(r.count == oracle);
        auto cut = min_vertex_cut(g, S, T);
        CHECK(int(cut.size()) == r.count);
        CHECK(is_vertex_cut(g, S, T, cut));
        // family is disjoint outside unbounded vertices and respects S/T
        std::vector<int> load(g.num_nodes(), 0);
        for (const auto& p : r.family) {
            for (int v : p.nodes) ++load[v];
            CHECK(std::find(S.begin(), S.end(), p.nodes.front()) != S.end());
            CHECK(std::find(T.begin(), T.end(), p.nodes.back()) != T.end());
        }
        for (int v = 0; v < g.num_nodes(); ++v)
            if (!g.unbounded[v]) CHECK(load[v] <= 1);
        ++checked;
    }
    CHECK(checked > 200);
}
