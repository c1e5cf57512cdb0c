#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "esr/io.hpp"
#include "esr/reduction.hpp"

#ifndef CORPUS_DIR
#define CORPUS_DIR "."
#endif

using namespace esr;

namespace {

X3CInstance load_corpus(const std::string& name) {
    return x3c_from_json(read_file(std::string(CORPUS_DIR) + "/" + name));
}

void check_chain_distances(const std::vector<TripleCoords>& triples, const Vec3& from,
                           const Vec3& to, double eps) {
    for (size_t z = 0; z < triples.size(); ++z) {
        const Vec3& g_prev = z == 0 ? from : triples[z - 1].gamma;
        const Vec3& g_cur = z + 1 == triples.size() ? to : triples[z].gamma;
        CHECK(distance(triples[z].alpha, triples[z].beta) == doctest::Approx(eps).epsilon(1e-9));
        CHECK(distance(triples[z].alpha, g_cur) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(distance(triples[z].beta, g_cur) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(distance(triples[z].alpha, g_prev) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(distance(triples[z].beta, g_prev) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

} // namespace

TEST_CASE("hop count at the default pair spacing") {
    double eps = 0.0005;
    double d = std::sqrt(1.0 - 0.25 * eps * eps);
    CHECK(10.0 / d > 10.0);
    CHECK(10.0 / d < 11.0);
    Tolerance tol;
    auto triples = place_chain({0, 0, 0}, {10, 0, 0}, {0, 0, -1}, eps, tol);
    CHECK(triples.size() == 11);
}

TEST_CASE("zero-slack chain lies straight") {
    double eps = 0.0005;
    double d = std::sqrt(1.0 - 0.25 * eps * eps);
    Tolerance tol;
    Vec3 to{5 * d, 0, 0};
    auto triples = place_chain({0, 0, 0}, to, {0, 0, -1}, eps, tol);
    REQUIRE(triples.size() == 5);
    for (size_t z = 0; z + 1 < triples.size(); ++z) {
        CHECK(triples[z].gamma.y == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(std::abs(triples[z].gamma.x - d * (z + 1)) < 1e-9);
    }
    check_chain_distances(triples, {0, 0, 0}, to, eps);
}

TEST_CASE("chain distances hold exactly for assorted chords") {
    Tolerance tol;
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> len(9.0, 500.0);
    for (int t = 0; t < 12; ++t) {
        double eps = 0.0005;
        double L = len(rng);
        Vec3 from{3.0, -2.0, 7.0};
        Vec3 to = from + Vec3{L, 0, 0};
        auto triples = place_chain(from, to, {0, 0, 1}, eps, tol);
        CHECK(static_cast<double>(triples.size()) >= L);
        check_chain_distances(triples, from, to, eps);
        // slack below one hop
        double d = std::sqrt(1.0 - 0.25 * eps * eps);
        CHECK(triples.size() * d - L < d);
        CHECK(triples.size() * d >= L);
    }
}

TEST_CASE("chain endpoints are reproduced within solver tolerance") {
    Tolerance tol;
    double eps = 0.0005;
    Vec3 from{0, 0, 0}, to{0, 37, 0};
    auto triples = place_chain(from, to, {1, 0, 0}, eps, tol);
    // gamma polyline walks from -> to with uniform hops
    double d = std::sqrt(1.0 - 0.25 * eps * eps);
    Vec3 prev = from;
    for (size_t z = 0; z + 1 < triples.size(); ++z) {
        CHECK(distance(prev, triples[z].gamma) == doctest::Approx(d).epsilon(1e-9));
        prev = triples[z].gamma;
    }
    CHECK(distance(prev, to) == doctest::Approx(d).epsilon(1e-7));
}

TEST_CASE("place_chain rejects bad inputs") {
    Tolerance tol;
    CHECK_THROWS_AS(place_chain({0, 0, 0}, {0.5, 0, 0}, {0, 0, 1}, 0.0005, tol),
                    std::invalid_argument); // too short
    CHECK_THROWS_AS(place_chain({0, 0, 0}, {10, 0, 0}, {1, 0, 0}, 0.0005, tol),
                    std::invalid_argument); // bend not perpendicular
    CHECK_THROWS_AS(place_chain({0, 0, 0}, {10, 0, 0}, {0, 0, 1}, 0.01, tol),
                    std::invalid_argument); // epsilon out of range
}

TEST_CASE("sample6 reduction has the expected vertex-agent counts") {
    auto inst = load_corpus("sample6.json");
    auto drawing = drawing_from_json(read_file(std::string(CORPUS_DIR) + "/sample6_drawing.json"));
    auto res = reduce_with_drawing(inst, drawing, 0.0005, 0);
    const Game& game = res.game;
    CHECK(game.agent_count() % 3 == 0);
    CHECK(game.room_size == 3);
    CHECK(game.epsilon == 0.0005);

    int elements = 0, bends = 0, sets = 0, centers = 0, leaves = 0;
    for (const auto& a : game.agents) {
        if (a.kind == AgentKind::element) ++elements;
        if (a.kind == AgentKind::bend) ++bends;
        if (a.kind == AgentKind::set_agent) ++sets;
        if (a.kind == AgentKind::center) ++centers;
        if (a.kind == AgentKind::leaf) ++leaves;
    }
    CHECK(elements == 6);
    CHECK(bends == 5);
    CHECK(sets == 18);
    CHECK(centers == 3);
    CHECK(leaves == 6);

    // layer placement claims
    double z_top = res.artifacts.z_top;
    CHECK(z_top == 70.0);
    for (const auto& a : game.agents) {
        if (a.kind == AgentKind::element || a.kind == AgentKind::bend ||
            a.kind == AgentKind::set_agent)
            CHECK(a.pos.z == 0.0);
        if (a.kind == AgentKind::center || a.kind == AgentKind::tree || a.kind == AgentKind::leaf)
            CHECK(a.pos.z == z_top);
    }
    for (const auto& path : res.artifacts.ascending) {
        CHECK(game.pos(path.u_prime_id).z == doctest::Approx(10.0 * path.element));
        CHECK(game.pos(path.l_prime_id).z == doctest::Approx(10.0 * path.element));
    }

    // set gadget triangles are unit equilateral
    for (const auto& [j, tri] : res.artifacts.set_triangle) {
        CHECK(distance(game.pos(tri[0]), game.pos(tri[1])) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(distance(game.pos(tri[0]), game.pos(tri[2])) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(distance(game.pos(tri[1]), game.pos(tri[2])) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("sample6 reduction is deterministic") {
    auto inst = load_corpus("sample6.json");
    auto res1 = reduce(inst, 0.0005, 7);
    auto res2 = reduce(inst, 0.0005, 7);
    CHECK(game_to_json(res1.game) == game_to_json(res2.game));
    CHECK(artifacts_to_json(res1.game, res1.artifacts) ==
          artifacts_to_json(res2.game, res2.artifacts));
}

TEST_CASE("sample6 reduction passes the full validation") {
    auto inst = load_corpus("sample6.json");
    auto drawing = drawing_from_json(read_file(std::string(CORPUS_DIR) + "/sample6_drawing.json"));
    auto res = reduce_with_drawing(inst, drawing, 0.0005, 0);
    Tolerance tol;
    auto rep = validate_reduction(res.game, res.artifacts, tol);
    CHECK(rep.triples_checked > 0);
    CHECK(rep.triple_violations == 0);
    CHECK(rep.max_triple_error < 1e-6);
    CHECK(rep.edges_ok);
    CHECK(rep.min_cost_violations == 0);
    CHECK(rep.preferred_mismatches == 0);
    CHECK(rep.gap > 0.01);
    for (const auto& n : rep.notes) {
        CAPTURE(n);
        CHECK(n.empty());
    }
    CHECK(rep.ok);
}

TEST_CASE("validation notices a displaced gamma agent") {
    auto inst = load_corpus("sample6.json");
    auto drawing = drawing_from_json(read_file(std::string(CORPUS_DIR) + "/sample6_drawing.json"));
    auto res = reduce_with_drawing(inst, drawing, 0.0005, 0);
    // displace one interior gamma by 0.5
    for (const auto& chain : res.artifacts.chains) {
        if (chain.n_hat >= 3) {
            int id = chain.gammas[0];
            res.game.agents[static_cast<size_t>(id)].pos.z -= 0.5;
            break;
        }
    }
    Tolerance tol;
    auto rep = validate_reduction(res.game, res.artifacts, tol);
    CHECK_FALSE(rep.ok);
    CHECK(rep.triple_violations > 0);
}

TEST_CASE("artifacts json round trip") {
    auto inst = load_corpus("sample6.json");
    auto drawing = drawing_from_json(read_file(std::string(CORPUS_DIR) + "/sample6_drawing.json"));
    auto res = reduce_with_drawing(inst, drawing, 0.0005, 0);
    auto text = artifacts_to_json(res.game, res.artifacts);
    auto back = artifacts_from_json(text);
    CHECK(game_to_json(back.game) == game_to_json(res.game));
    CHECK(artifacts_to_json(back.game, back.artifacts) == text);
}

TEST_CASE("snowflake accounting across sizes") {
    struct Case {
        int m, floor_k, replacements;
    };
    // leaf count must equal m; replacements (m - 3*2^k)/3
    for (Case c : {Case{6, 1, 0}, Case{12, 2, 0}, Case{21, 2, 3}, Case{24, 3, 0}}) {
        // the top layer only depends on |X| and |C| = |X|; reuse any instance
        // by building a synthetic one is heavy, so check the tree builder
        // through a full reduction for corpus sizes and the formula otherwise
        int fk = 0;
        while (3 * (1 << (fk + 1)) <= c.m) ++fk;
        CHECK(fk == c.floor_k);
        CHECK((c.m - 3 * (1 << fk)) / 3 == c.replacements);
    }
    auto inst = load_corpus("sample6.json");
    auto res = reduce(inst, 0.0005, 0);
    CHECK(res.artifacts.snowflake.floor_k == 1);
    CHECK(res.artifacts.snowflake.replacements == 0);
    CHECK(res.artifacts.snowflake.leaves.size() == 6);
    int leaf_count = 0;
    for (const auto& node : res.artifacts.snowflake.nodes)
        if (node.is_leaf) ++leaf_count;
    CHECK(leaf_count == 6);
}

TEST_CASE("layer counts partition the agent set and gammas stay on their side") {
    auto inst = load_corpus("sample6.json");
    auto drawing = drawing_from_json(read_file(std::string(CORPUS_DIR) + "/sample6_drawing.json"));
    auto res = reduce_with_drawing(inst, drawing, 0.0005, 0);
    CHECK(res.artifacts.counts.total() == res.game.agent_count());

    double z_top = res.artifacts.z_top;
    for (const auto& chain : res.artifacts.chains) {
        for (int z = 1; z < chain.n_hat; ++z) {
            double gz = res.game.pos(chain.gammas[static_cast<size_t>(z) - 1]).z;
            if (chain.layer == Layer::bottom) CHECK(gz <= 1e-9);
            if (chain.layer == Layer::top) CHECK(gz >= z_top - 1e-9);
        }
    }
}

TEST_CASE("top layer edge lengths follow the formula") {
    auto inst = load_corpus("sample6.json");
    auto res = reduce(inst, 0.0005, 0);
    const auto& snow = res.artifacts.snowflake;
    for (const auto& node : snow.nodes) {
        if (node.is_leaf) continue;
        for (int child : node.children) {
            double len = distance(node.pos, snow.nodes[static_cast<size_t>(child)].pos);
            double expect = 10.0 * (6 + 6) + std::pow(4.0, snow.floor_k - node.depth + 2);
            CHECK(len == doctest::Approx(expect).epsilon(1e-9));
        }
    }
}
