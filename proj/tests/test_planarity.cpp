#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "esr/planarity.hpp"

using namespace esr;

namespace {

SimpleGraph complete(int n) {
    SimpleGraph g;
    g.n = n;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) g.add_edge(a, b);
    return g;
}

SimpleGraph k33() {
    SimpleGraph g;
    g.n = 6;
    for (int a = 0; a < 3; ++a)
        for (int b = 3; b < 6; ++b) g.add_edge(a, b);
    return g;
}

SimpleGraph petersen() {
    SimpleGraph g;
    g.n = 10;
    for (int i = 0; i < 5; ++i) {
        g.add_edge(i, (i + 1) % 5);
        g.add_edge(i, i + 5);
        g.add_edge(i + 5, (i + 2) % 5 + 5);
    }
    return g;
}

SimpleGraph cube() {
    SimpleGraph g;
    g.n = 8;
    for (int v = 0; v < 8; ++v)
        for (int bit : {1, 2, 4})
            if (v < (v ^ bit)) g.add_edge(v, v ^ bit);
    return g;
}

// Exhaustive oracle for graphs on 6 vertices: nonplanar iff the graph
// contains K5 on some 5 vertices, K3,3 on some bipartition, or a K5
// subdivision with a single degree-2 subdivision vertex.
bool oracle_planar6(const std::set<std::pair<int, int>>& edges) {
    auto has = [&](int a, int b) {
        return edges.count({std::min(a, b), std::max(a, b)}) > 0;
    };
    // K5 on a 5-subset
    for (int skip = 0; skip < 6; ++skip) {
        bool all = true;
        for (int a = 0; a < 6 && all; ++a)
            for (int b = a + 1; b < 6 && all; ++b)
                if (a != skip && b != skip && !has(a, b)) all = false;
        if (all) return false;
    }
    // K3,3 over every 3+3 split
    for (int mask = 0; mask < 64; ++mask) {
        if (__builtin_popcount(mask) != 3) continue;
        bool all = true;
        for (int a = 0; a < 6 && all; ++a)
            for (int b = 0; b < 6 && all; ++b)
                if ((mask >> a & 1) && !(mask >> b & 1) && !has(a, b)) all = false;
        if (all) return false;
    }
    // K5 with exactly one subdivided edge: branch vertices = all but w
    for (int w = 0; w < 6; ++w) {
        std::vector<int> branch;
        for (int v = 0; v < 6; ++v)
            if (v != w) branch.push_back(v);
        for (size_t i = 0; i < 5; ++i)
            for (size_t j = i + 1; j < 5; ++j) {
                int a = branch[i], b = branch[j];
                bool all = has(a, w) && has(b, w);
                for (size_t x = 0; x < 5 && all; ++x)
                    for (size_t y = x + 1; y < 5 && all; ++y) {
                        if (x == i && y == j) continue;
                        if (!has(branch[x], branch[y])) all = false;
                    }
                if (all) return false;
            }
    }
    return true;
}

} // namespace

TEST_CASE("textbook graphs") {
    CHECK(planarity_test(complete(4)).planar);
    auto k5 = planarity_test(complete(5));
    CHECK_FALSE(k5.planar);
    CHECK(k5.witness_kind == "K5");
    CHECK(k5.witness_edges.size() == 10);

    auto k33_res = planarity_test(k33());
    CHECK_FALSE(k33_res.planar);
    CHECK(k33_res.witness_kind == "K3,3");
    CHECK(k33_res.witness_edges.size() == 9);

    CHECK_FALSE(planarity_test(petersen()).planar);
    CHECK(planarity_test(cube()).planar);
}

TEST_CASE("k5 minus an edge is planar") {
    SimpleGraph g = complete(5);
    g.edges.pop_back();
    CHECK(planarity_test(g).planar);
}

TEST_CASE("disconnected graphs and trees") {
    SimpleGraph g;
    g.n = 7;
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(3, 4);
    g.add_edge(4, 5);
    g.add_edge(5, 3);
    CHECK(planarity_test(g).planar);
    SimpleGraph empty;
    empty.n = 4;
    CHECK(planarity_test(empty).planar);
}

TEST_CASE("witness is a minimal nonplanar subgraph") {
    // K5 and K3,3 joined by a path: witness should be one of the two
    SimpleGraph g;
    g.n = 12;
    for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b) g.add_edge(a, b);
    for (int a = 5; a < 8; ++a)
        for (int b = 8; b < 11; ++b) g.add_edge(a, b);
    g.add_edge(4, 11);
    g.add_edge(11, 5);
    auto res = planarity_test(g);
    CHECK_FALSE(res.planar);
    CHECK((res.witness_edges.size() == 10 || res.witness_edges.size() == 9));
    // the witness itself must be nonplanar and edge-minimal
    SimpleGraph w;
    w.n = 12;
    w.edges = res.witness_edges;
    CHECK_FALSE(planarity_test(w).planar);
    for (size_t i = 0; i < w.edges.size(); ++i) {
        SimpleGraph sub = w;
        sub.edges.erase(sub.edges.begin() + static_cast<long>(i));
        CHECK(planarity_test(sub).planar);
    }
}

TEST_CASE("exhaustive agreement with the 6-vertex oracle") {
    // all graphs on 6 labeled vertices
    std::vector<std::pair<int, int>> all_edges;
    for (int a = 0; a < 6; ++a)
        for (int b = a + 1; b < 6; ++b) all_edges.push_back({a, b});
    REQUIRE(all_edges.size() == 15);
    for (int mask = 0; mask < (1 << 15); ++mask) {
        SimpleGraph g;
        g.n = 6;
        std::set<std::pair<int, int>> edges;
        for (int i = 0; i < 15; ++i)
            if (mask >> i & 1) {
                g.edges.push_back(all_edges[static_cast<size_t>(i)]);
                edges.insert(all_edges[static_cast<size_t>(i)]);
            }
        bool expect = oracle_planar6(edges);
        bool got = planarity_test(g).planar;
        if (expect != got) {
            CAPTURE(mask);
            REQUIRE(expect == got);
        }
    }
}
