#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "esr/io.hpp"
#include "esr/outcomes.hpp"
#include "esr/popularity.hpp"

#ifndef CORPUS_DIR
#define CORPUS_DIR "."
#endif

using namespace esr;

namespace {

ReductionResult sample6_reduction() {
    auto inst = x3c_from_json(read_file(std::string(CORPUS_DIR) + "/sample6.json"));
    auto drawing = drawing_from_json(read_file(std::string(CORPUS_DIR) + "/sample6_drawing.json"));
    return reduce_with_drawing(inst, drawing, 0.0005, 0);
}

// An isolated chain as its own game: the triples of a freshly placed chain
// plus exactly one retained endpoint (the other endpoint is imagined to be
// roomed elsewhere, as happens inside the construction).
Game isolated_chain_game(int n_hat, bool retain_from, std::vector<Room>& expected) {
    double eps = 0.0005;
    double d = std::sqrt(1.0 - 0.25 * eps * eps);
    double L = d * n_hat - 0.2; // forces exactly n_hat hops with a slight arc
    Tolerance tol;
    Vec3 from{0, 0, 0}, to{L, 0, 0};
    auto triples = place_chain(from, to, {0, 0, -1}, eps, tol);
    REQUIRE(static_cast<int>(triples.size()) == n_hat);

    Game g;
    g.room_size = 3;
    g.epsilon = eps;
    auto add = [&](const std::string& label, AgentKind kind, const Vec3& pos) {
        int id = g.agent_count();
        g.agents.push_back({id, label, kind, pos});
        return id;
    };
    std::vector<int> alphas, betas, gammas; // gammas: z = 0..n_hat (endpoint slots)
    gammas.resize(static_cast<size_t>(n_hat) + 1, -1);
    if (retain_from) gammas[0] = add("from", AgentKind::gamma, from);
    for (int z = 1; z <= n_hat; ++z) {
        alphas.push_back(add("alpha" + std::to_string(z), AgentKind::alpha,
                             triples[static_cast<size_t>(z) - 1].alpha));
        betas.push_back(add("beta" + std::to_string(z), AgentKind::beta,
                            triples[static_cast<size_t>(z) - 1].beta));
        if (z < n_hat)
            gammas[static_cast<size_t>(z)] =
                add("gamma" + std::to_string(z), AgentKind::gamma,
                    triples[static_cast<size_t>(z) - 1].gamma);
    }
    if (!retain_from) gammas[static_cast<size_t>(n_hat)] = add("to", AgentKind::gamma, to);
    g.check();

    expected.clear();
    for (int z = 1; z <= n_hat; ++z) {
        int gamma_id = retain_from ? gammas[static_cast<size_t>(z) - 1]
                                   : gammas[static_cast<size_t>(z)];
        Room r{alphas[static_cast<size_t>(z) - 1], betas[static_cast<size_t>(z) - 1], gamma_id};
        std::sort(r.begin(), r.end());
        expected.push_back(r);
    }
    std::sort(expected.begin(), expected.end());
    return g;
}

} // namespace

TEST_CASE("permanent popular outcome is a valid all-best partition") {
    auto res = sample6_reduction();
    Tolerance tol;
    auto pp = permanent_popular(res.game, res.artifacts);
    CHECK(validate_outcome(res.game, pp).ok);
    auto ab = verify_all_best(res.game, pp, tol);
    for (const auto& off : ab.offenders) {
        CAPTURE(res.game.agents[static_cast<size_t>(off.id)].label);
        CHECK(off.cost <= off.min_cost + tol.dist_eq);
    }
    CHECK(ab.ok);

    // every alpha/beta agent pays 1+eps, everyone else pays 2
    auto where = room_of_agent(res.game, pp);
    for (const auto& a : res.game.agents) {
        double cost =
            room_cost(res.game, a.id, pp.rooms[static_cast<size_t>(where[static_cast<size_t>(a.id)])]);
        if (a.kind == AgentKind::alpha || a.kind == AgentKind::beta)
            CHECK(std::abs(cost - 1.0005) < 1e-6);
        else
            CHECK(std::abs(cost - 2.0) < 1e-6);
    }
}

TEST_CASE("reduced outcome for the known cover is all-best and distinct") {
    auto res = sample6_reduction();
    Tolerance tol;
    auto sols = solve_exact_cover(res.artifacts.instance, 0);
    CoverSolution known{0, 5};
    REQUIRE(std::find(sols.begin(), sols.end(), known) != sols.end());
    auto pi_s = reduced_outcome(res.game, res.artifacts, known);
    CHECK(validate_outcome(res.game, pi_s).ok);
    CHECK(verify_all_best(res.game, pi_s, tol).ok);

    auto pp = permanent_popular(res.game, res.artifacts);
    CHECK_FALSE(pp == pi_s);

    auto margin = popularity_margin(res.game, pp, pi_s, tol);
    CHECK(margin.margin == 0);
    CHECK(margin.improvers_forward.empty());
    CHECK(margin.improvers_backward.empty());
}

TEST_CASE("non-solutions are rejected") {
    auto res = sample6_reduction();
    CHECK_THROWS_AS(reduced_outcome(res.game, res.artifacts, CoverSolution{0, 1}),
                    std::invalid_argument);
}

TEST_CASE("classification recovers the construction") {
    auto res = sample6_reduction();
    Tolerance tol;
    auto pp = permanent_popular(res.game, res.artifacts);
    auto cls_pp = classify_all_best(res.game, res.artifacts, pp, tol);
    CHECK(cls_pp.is_permanent_popular);

    for (const auto& sol : solve_exact_cover(res.artifacts.instance, 0)) {
        auto pi_s = reduced_outcome(res.game, res.artifacts, sol);
        auto cls = classify_all_best(res.game, res.artifacts, pi_s, tol);
        CHECK_FALSE(cls.is_permanent_popular);
        CHECK(cls.solution == sol);
    }
}

TEST_CASE("scrambling rooms breaks the all-best property") {
    auto res = sample6_reduction();
    Tolerance tol;
    auto pp = permanent_popular(res.game, res.artifacts);
    REQUIRE(pp.rooms.size() > 2);
    std::swap(pp.rooms[0][0], pp.rooms[1][0]);
    CHECK(validate_outcome(res.game, pp).ok);
    auto ab = verify_all_best(res.game, pp, tol);
    CHECK_FALSE(ab.ok);
    CHECK(ab.offenders.size() >= 1);
    CHECK_THROWS(classify_all_best(res.game, res.artifacts, pp, tol));
}

TEST_CASE("random partitions are almost never all-best") {
    auto res = sample6_reduction();
    Tolerance tol;
    std::mt19937_64 rng(3);
    std::vector<int> ids;
    for (const auto& a : res.game.agents) ids.push_back(a.id);
    std::shuffle(ids.begin(), ids.end(), rng);
    Outcome random_pi;
    for (size_t i = 0; i < ids.size(); i += 3)
        random_pi.rooms.push_back({ids[i], ids[i + 1], ids[i + 2]});
    CHECK_FALSE(verify_all_best(res.game, random_pi, tol).ok);
}

TEST_CASE("chain tiling uniqueness for small isolated chains") {
    Tolerance tol;
    for (int n_hat : {2, 3, 4}) {
        for (bool retain_from : {true, false}) {
            std::vector<Room> expected;
            Game g = isolated_chain_game(n_hat, retain_from, expected);
            long long all_best_found = 0;
            Outcome all_best;
            enumerate_outcomes(g, 15, [&](const Outcome& o) {
                if (verify_all_best(g, o, tol).ok) {
                    ++all_best_found;
                    all_best = o;
                    all_best.canonicalize();
                }
                return true;
            });
            CAPTURE(n_hat);
            CAPTURE(retain_from);
            CHECK(all_best_found == 1);
            CHECK(all_best.rooms == expected);
        }
    }
}

TEST_CASE("strict existence decision on sample6 and cubes12") {
    auto res = sample6_reduction();
    auto strict = decide_strict_popular_exists(res.game, res.artifacts);
    CHECK_FALSE(strict.exists); // sample6 has covers, so pi_S disproves strictness
    REQUIRE(strict.pi_s.has_value());
    Tolerance tol;
    auto pp = permanent_popular(res.game, res.artifacts);
    auto margin = popularity_margin(res.game, pp, *strict.pi_s, tol);
    CHECK(margin.margin == 0);

    auto cubes = x3c_from_json(read_file(std::string(CORPUS_DIR) + "/cubes12.json"));
    auto res2 = reduce(cubes, 0.0005, 0);
    auto strict2 = decide_strict_popular_exists(res2.game, res2.artifacts);
    CHECK(strict2.exists);
    CHECK(strict2.search_exhausted);
    // pi_pp still exists for the unsolvable instance
    auto pp2 = permanent_popular(res2.game, res2.artifacts);
    CHECK(verify_all_best(res2.game, pp2, tol).ok);
}

TEST_CASE("gadget-replaced snowflake still yields both canonical outcomes") {
    // 21 elements: floor(k) = 2 with three leaves replaced by depth-2
    // gadgets, and one component of 7 elements makes covers impossible
    auto inst = x3c_from_json(read_file(std::string(CORPUS_DIR) + "/sample21.json"));
    auto res = reduce(inst, 0.0005, 0);
    CHECK(res.artifacts.snowflake.floor_k == 2);
    CHECK(res.artifacts.snowflake.replacements == 3);
    CHECK(res.artifacts.snowflake.leaves.size() == 21);

    Tolerance tol;
    auto rep = validate_reduction(res.game, res.artifacts, tol);
    for (const auto& n : rep.notes) CAPTURE(n);
    CHECK(rep.ok);

    auto pp = permanent_popular(res.game, res.artifacts);
    CHECK(verify_all_best(res.game, pp, tol).ok);
    auto cls = classify_all_best(res.game, res.artifacts, pp, tol);
    CHECK(cls.is_permanent_popular);

    auto strict = decide_strict_popular_exists(res.game, res.artifacts);
    CHECK(strict.exists);
}

TEST_CASE("local search repairs a scrambled chain tiling") {
    Tolerance tol;
    std::vector<Room> expected;
    Game g = isolated_chain_game(4, true, expected);
    Outcome tiled{expected};
    REQUIRE(verify_all_best(g, tiled, tol).ok);
    // displace two agents across neighboring rooms
    Outcome scrambled = tiled;
    std::swap(scrambled.rooms[0][0], scrambled.rooms[1][1]);
    REQUIRE_FALSE(verify_all_best(g, scrambled, tol).ok);
    auto found = search_improving_outcome(g, scrambled, 100000, 11, tol);
    REQUIRE(found.has_value());
    CHECK(found->second.margin > 0);
}

TEST_CASE("tile_chain covers each interior agent exactly once") {
    auto res = sample6_reduction();
    for (const auto& chain : res.artifacts.chains) {
        for (auto tiling : {ChainTiling::forward, ChainTiling::backward}) {
            Outcome o;
            tile_chain(chain, tiling, o);
            CHECK(static_cast<int>(o.rooms.size()) == chain.n_hat);
            std::set<int> used;
            for (const auto& room : o.rooms)
                for (int id : room) used.insert(id);
            // 3*n_hat agents participate: n_hat pairs, n_hat-1 interior
            // gammas, and exactly one endpoint
            CHECK(used.size() == static_cast<size_t>(3 * chain.n_hat));
            CHECK(used.count(tiling == ChainTiling::forward ? chain.from_id : chain.to_id) == 1);
        }
        break; // one chain suffices for the structural shape
    }
}
