#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <endmenger/presentation.hpp>
#include <endmenger/truncation.hpp>

#include "helpers.hpp"

using namespace endmenger;

TEST_CASE("fixtures parse and validate") {
    for (const char* name : {"ladder", "single", "chord", "domcore", "twoend"}) {
        auto p = load_fixture(name);
        CAPTURE(name);
        CHECK(validate(p).empty());
    }
}

TEST_CASE("validate flags unknown rays and self-loop instances") {
    SECTION("rule referencing unknown ray") {
        auto p = parse_instance("ray b out\nrule b 1 1 -> u 1 1\n");
        auto d = validate(p);
        REQUIRE_FALSE(d.empty());
        CHECK(d[0].find("unknown ray") != std::string::npos);
    }
    SECTION("self-loop instance when both sides coincide") {
        auto p = parse_instance("ray r out\nrule r 1 2 -> r 1 2\n");
        auto d = validate(p);
        REQUIRE_FALSE(d.empty());
        CHECK(d[0].find("self-loop instance") != std::string::npos);
    }
    SECTION("self-loop instance with distinct periods crossing") {
        // offsets 4+m vs 1+2m meet at m=3
        auto p = parse_instance("ray r out\nrule r 1 4 -> r 2 1\n");
        auto d = validate(p);
        REQUIRE_FALSE(d.empty());
        CHECK(d[0].find("self-loop instance") != std::string::npos);
    }
    SECTION("chord rule on a single ray is fine") {
        CHECK(validate(load_fixture("chord")).empty());
    }
    SECTION("duplicate instantiated arcs are flagged") {
        auto p = parse_instance("ray r out\nray s out\nrule r 1 1 -> s 1 1\nrule r 2 1 -> s 2 1\n");
        auto d = validate(p);
        REQUIRE_FALSE(d.empty());
        CHECK(d[0].find("duplicate arc") != std::string::npos);
    }
}

TEST_CASE("reverse is an involution and flips orientations") {
    for (const char* name : {"ladder", "single", "chord", "domcore", "twoend"}) {
        auto p = load_fixture(name);
        CAPTURE(name);
        CHECK(reverse(reverse(p)) == p);
    }
    auto r = reverse(load_fixture("ladder"));
    CHECK(r.ray_dir("b") == RayDir::In);
    CHECK(r.ray_dir("u") == RayDir::In);
    REQUIRE(r.rules.size() == 1);
    CHECK(r.rules[0].from_ray == "u");
    CHECK(r.rules[0].to_ray == "b");
}

TEST_CASE("delete_vertices with empty set is the identity") {
    auto p = load_fixture("ladder");
    auto res = delete_vertices(p, {});
    CHECK(res.p == p);
}

TEST_CASE("delete_vertices re-indexes a single ray") {
    auto p = load_fixture("single");
    auto res = delete_vertices(p, {VertexRef::ray("r", 1)});
    CHECK(res.p.rays.size() == 1);
    CHECK(res.p.cores.empty());  // index 1 deleted leaves no stub
    CHECK(res.map.to_new(VertexRef::ray("r", 5)) == VertexRef::ray("r", 4));
    CHECK_FALSE(res.map.to_new(VertexRef::ray("r", 1)).has_value());
    CHECK(res.map.to_old(VertexRef::ray("r", 4)) == VertexRef::ray("r", 5));
}

TEST_CASE("delete_vertices splits a ray into stubs and a tail") {
    auto p = load_fixture("ladder");
    auto res = delete_vertices(p, {VertexRef::ray("b", 3)});
    // stub vertices for (b,1),(b,2), tail re-indexed from old index 4
    CHECK(res.p.cores.size() == 2);
    CHECK(res.p.rays.size() == 2);
    auto s1 = res.map.to_new(VertexRef::ray("b", 1));
    REQUIRE(s1.has_value());
    CHECK(s1->is_core());
    CHECK(res.map.to_new(VertexRef::ray("b", 4)) == VertexRef::ray("b", 1));
    // rule instances hitting the stub become explicit arcs, the rest re-anchor
    REQUIRE(res.p.rules.size() == 1);
    CHECK(res.p.rules[0].from_offset == 1);
    CHECK(res.p.rules[0].to_offset == 4);
    CHECK(res.p.exceptional_arcs.size() == 2);  // (b.1)->(u,1), (b.2)->(u,2)
    CHECK(validate(res.p).empty());
}

TEST_CASE("delete_vertices commutes with truncate beyond deleted indices") {
    auto p = load_fixture("chord");
    auto res = delete_vertices(p, {VertexRef::ray("r", 2)});
    REQUIRE(validate(res.p).empty());
    Index L = 12;
    auto t_after = truncate(res.p, L - 2);
    auto t_before = truncate(p, L);
    auto in_new_depth = [&](const VertexRef& v) { return !v.is_ray() || v.index <= L - 2; };
    std::set<std::pair<VertexRef, VertexRef>> expect, got;
    for (const auto& [u, v] : t_before.g.arcs) {
        auto nu = res.map.to_new(t_before.ref_of[u]);
        auto nv = res.map.to_new(t_before.ref_of[v]);
        if (nu && nv && in_new_depth(*nu) && in_new_depth(*nv)) expect.insert({*nu, *nv});
    }
    for (const auto& [u, v] : t_after.g.arcs) got.insert({t_after.ref_of[u], t_after.ref_of[v]});
    CHECK(expect == got);
}

TEST_CASE("apply_surgery can cut a whole tail") {
    auto p = load_fixture("single");
    auto res = apply_surgery(p, {}, {{"r", 4}});
    CHECK(res.p.rays.empty());
    CHECK(res.p.cores.size() == 3);
    CHECK(res.p.core_arcs.size() == 2);  // the stub path r.1 -> r.2 -> r.3
    CHECK_FALSE(res.map.to_new(VertexRef::ray("r", 9)).has_value());
    CHECK(validate(res.p).empty());
}

TEST_CASE("parse/serialize round trip") {
    SECTION("ladder fixture") {
        auto text = read_file(std::string(EM_FIXTURE_DIR) + "/ladder.red");
        auto p = parse_instance(text);
        CHECK(parse_instance(serialize_instance(p)) == p);
    }
    SECTION("empty file is a valid empty presentation") {
        auto p = parse_instance("");
        CHECK(validate(p).empty());
        CHECK(p.cores.empty());
        CHECK(p.rays.empty());
    }
    SECTION("parse errors carry line numbers") {
        try {
            parse_instance("core f\nray b sideways\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
}

TEST_CASE("truncate produces the expected finite digraphs") {
    SECTION("single ray at depth 5 is a path of 5 nodes") {
        auto t = truncate(load_fixture("single"), 5);
        CHECK(t.g.num_nodes() == 5);
        CHECK(t.g.num_arcs() == 4);
    }
    SECTION("ladder at depth 4 has 8 ray nodes and 4 rungs") {
        auto t = truncate(load_fixture("ladder"), 4);
        CHECK(t.g.num_nodes() == 8);
        CHECK(t.g.num_arcs() == 3 + 3 + 4);
    }
    SECTION("arc count matches the closed form from the rules") {
        auto p = load_fixture("chord");
        Index L = 17;
        auto t = truncate(p, L);
        Index expect = L - 1;  // ray arcs
        for (const auto& r : p.rules) {
            Index k = std::min((L - r.from_offset) / r.from_period,
                               (L - r.to_offset) / r.to_period);
            if (k >= 0) expect += k + 1;
        }
        CHECK(t.g.num_arcs() == expect);
    }
    SECTION("truncation nests: depth L is an induced restriction of depth L+1") {
        auto p = load_fixture("chord");
        auto small = truncate(p, 10);
        auto big = truncate(p, 11);
        int inside = 0;
        for (const auto& [u, v] : big.g.arcs)
            if (small.contains(big.ref_of[u]) && small.contains(big.ref_of[v])) ++inside;
        CHECK(inside == small.g.num_arcs());
    }
    SECTION("too small a depth throws") {
        auto p = load_fixture("chord");  // max explicit index 3
        CHECK_THROWS_AS(truncate(p, 2), LTooSmall);
    }
}

TEST_CASE("fuzzed serialize/parse round trips preserve the truncation") {
    // light structural fuzz: random small presentations, round-trip, compare
    std::mt19937_64 rng(7);
    auto pick = [&](Index n) { return Index(rng() % n); };
    for (int iter = 0; iter < 50; ++iter) {
        Presentation p;
        int nray = 1 + int(pick(3));
        for (int i = 0; i < nray; ++i)
            p.rays.push_back({"r" + std::to_string(i), pick(2) ? RayDir::Out : RayDir::In});
        int ncore = int(pick(3));
        for (int i = 0; i < ncore; ++i) p.cores.push_back("c" + std::to_string(i));
        for (int i = 0; i + 1 < ncore; ++i)
            p.core_arcs.push_back({"c" + std::to_string(i), "c" + std::to_string(i + 1)});
        for (int i = 0; i < 2; ++i) {
            RayRule r{"r" + std::to_string(pick(nray)), 1 + pick(2), 1 + pick(3),
                      "r" + std::to_string(pick(nray)), 1 + pick(2), 1 + pick(3)};
            p.rules.push_back(r);
        }
        p.sort_canonical();
        if (!validate(p).empty()) continue;
        auto q = parse_instance(serialize_instance(p));
        REQUIRE(q == p);
        auto t1 = truncate(p, 10);
        auto t2 = truncate(q, 10);
        CHECK(t1.g.num_nodes() == t2.g.num_nodes());
        CHECK(t1.g.arcs == t2.g.arcs);
    }
}
