#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "esr/popularity.hpp"

using namespace esr;

namespace {

Game make_game(const std::vector<Vec3>& pts) {
    Game g;
    g.room_size = 3;
    for (size_t i = 0; i < pts.size(); ++i)
        g.agents.push_back({static_cast<int>(i), "a" + std::to_string(i), AgentKind::plain, pts[i]});
    g.check();
    return g;
}

// three unit triangles, pairwise far apart
Game three_triangles() {
    double h = std::sqrt(3.0) / 2.0;
    std::vector<Vec3> pts;
    for (int t = 0; t < 3; ++t) {
        double ox = 20.0 * t, oy = 15.0 * (t % 2);
        pts.push_back({ox, oy, 0});
        pts.push_back({ox + 1.0, oy, 0});
        pts.push_back({ox + 0.5, oy + h, 0});
    }
    return make_game(pts);
}

Outcome random_outcome(const Game& g, std::mt19937_64& rng) {
    std::vector<int> ids;
    for (const auto& a : g.agents) ids.push_back(a.id);
    std::shuffle(ids.begin(), ids.end(), rng);
    Outcome o;
    for (size_t i = 0; i < ids.size(); i += 3)
        o.rooms.push_back({ids[i], ids[i + 1], ids[i + 2]});
    o.canonicalize();
    return o;
}

} // namespace

TEST_CASE("margin of an outcome against itself is zero") {
    Tolerance tol;
    Game g = three_triangles();
    std::mt19937_64 rng(5);
    Outcome pi = random_outcome(g, rng);
    auto rep = popularity_margin(g, pi, pi, tol);
    CHECK(rep.margin == 0);
    CHECK(rep.improvers_forward.empty());
    CHECK(rep.improvers_backward.empty());
}

TEST_CASE("margin antisymmetry on random outcome pairs") {
    Tolerance tol;
    Game g = three_triangles();
    std::mt19937_64 rng(6);
    for (int t = 0; t < 30; ++t) {
        Outcome a = random_outcome(g, rng);
        Outcome b = random_outcome(g, rng);
        auto ab = popularity_margin(g, a, b, tol);
        auto ba = popularity_margin(g, b, a, tol);
        CHECK(ab.margin == -ba.margin);
        CHECK(ab.improvers_forward == ba.improvers_backward);
        CHECK(ab.improvers_backward == ba.improvers_forward);
    }
}

TEST_CASE("outcome counts match the closed form") {
    CHECK(count_outcomes(3, 3) == 1);
    CHECK(count_outcomes(6, 3) == 10);
    CHECK(count_outcomes(9, 3) == 280);
    CHECK(count_outcomes(12, 3) == 15400);
    CHECK(count_outcomes(15, 3) == 1401400);
}

TEST_CASE("enumeration yields each outcome exactly once") {
    double h = std::sqrt(3.0) / 2.0;
    Game g3 = make_game({{0, 0, 0}, {1, 0, 0}, {0.5, h, 0}});
    long long n3 = 0;
    enumerate_outcomes(g3, 15, [&](const Outcome&) {
        ++n3;
        return true;
    });
    CHECK(n3 == 1);

    Game g9 = three_triangles();
    std::set<std::vector<Room>> seen;
    enumerate_outcomes(g9, 15, [&](const Outcome& o) {
        Outcome c = o;
        c.canonicalize();
        seen.insert(c.rooms);
        return true;
    });
    CHECK(static_cast<long long>(seen.size()) == 280);

    Game g6 = make_game({{0, 0, 0}, {1, 0, 0}, {0.5, h, 0}, {9, 0, 0}, {10, 0, 0}, {9.5, h, 0}});
    long long n6 = 0;
    enumerate_outcomes(g6, 15, [&](const Outcome&) {
        ++n6;
        return true;
    });
    CHECK(n6 == 10);
}

TEST_CASE("enumeration refuses above the cap with the required count") {
    Game g = three_triangles();
    try {
        enumerate_outcomes(g, 6, [](const Outcome&) { return true; });
        FAIL("expected EnumerationCapExceeded");
    } catch (const EnumerationCapExceeded& e) {
        CHECK(e.required == 280);
    }
}

TEST_CASE("single-room game is strictly popular") {
    double h = std::sqrt(3.0) / 2.0;
    Game g = make_game({{0, 0, 0}, {1, 0, 0}, {0.5, h, 0}});
    Outcome pi{{{0, 1, 2}}};
    Tolerance tol;
    auto verdict = decide_popularity(g, pi, PopularityMode::strict, 15, tol);
    CHECK(verdict.status == PopularityStatus::strictly_popular);
    CHECK(verdict.outcomes_examined == 1);
}

TEST_CASE("triangle outcome is strictly popular, mixed outcomes are not popular") {
    Tolerance tol;
    Game g = three_triangles();
    Outcome tri{{{0, 1, 2}, {3, 4, 5}, {6, 7, 8}}};
    auto strict = decide_popularity(g, tri, PopularityMode::strict, 15, tol);
    CHECK(strict.status == PopularityStatus::strictly_popular);
    CHECK(strict.outcomes_examined == 280);

    Outcome mixed{{{0, 1, 3}, {2, 4, 5}, {6, 7, 8}}};
    auto pop = decide_popularity(g, mixed, PopularityMode::popular, 15, tol);
    CHECK(pop.status == PopularityStatus::not_popular);
    REQUIRE(pop.witness.has_value());
    auto wrep = popularity_margin(g, mixed, *pop.witness, tol);
    CHECK(wrep.margin < 0);
}

TEST_CASE("cap exceeded gives inconclusive") {
    Tolerance tol;
    Game g = three_triangles();
    Outcome tri{{{0, 1, 2}, {3, 4, 5}, {6, 7, 8}}};
    auto verdict = decide_popularity(g, tri, PopularityMode::popular, 6, tol);
    CHECK(verdict.status == PopularityStatus::inconclusive);
    CHECK(verdict.outcomes_examined == 0);
}

TEST_CASE("strictness fails when a distinct zero-margin outcome exists") {
    // three triangles, two of them congruent and far apart: exchanging the
    // two congruent triangles wholesale leaves every agent's cost unchanged,
    // so the triangle outcome is popular but not strictly popular
    double h = std::sqrt(3.0) / 2.0;
    std::vector<Vec3> pts = {{0, 0, 0},   {1, 0, 0},   {0.5, h, 0},
                             {0, 100, 0}, {1, 100, 0}, {0.5, 100 + h, 0},
                             {50, 50, 0}, {51, 50, 0}, {50.5, 50 + h, 0}};
    Game g = make_game(pts);
    Outcome pi{{{0, 1, 2}, {3, 4, 5}, {6, 7, 8}}};
    Tolerance tol;
    auto pop = decide_popularity(g, pi, PopularityMode::popular, 15, tol);
    CHECK(pop.status == PopularityStatus::popular);
    // a swapped pairing of the two congruent triangles has margin zero
    Outcome swapped{{{0, 4, 2}, {3, 1, 5}, {6, 7, 8}}};
    // agents 1 and 4 trade places between congruent positions
    auto rep = popularity_margin(g, pi, swapped, tol);
    CHECK(rep.margin > 0); // members torn from their triangle are worse off
    Outcome mirrored{{{3, 4, 5}, {0, 1, 2}, {6, 7, 8}}};
    auto rep2 = popularity_margin(g, pi, mirrored, tol);
    CHECK(rep2.margin == 0);
    auto strict = decide_popularity(g, pi, PopularityMode::strict, 15, tol);
    CHECK(strict.status == PopularityStatus::strictly_popular); // same partition, not distinct

    // duplicated geometry with agents swapped across congruent triangles:
    // a genuinely distinct outcome with margin zero
    Outcome cross{{{0, 1, 5}, {3, 4, 2}, {6, 7, 8}}};
    auto rep3 = popularity_margin(g, pi, cross, tol);
    CHECK(rep3.margin > 0);
}

TEST_CASE("duplicated geometry defeats strictness") {
    // regular hexagon: rotating the two adjacent-triple rooms by one vertex
    // helps two agents and hurts two, a distinct outcome with margin zero
    std::vector<Vec3> pts;
    for (int k = 0; k < 6; ++k)
        pts.push_back({std::cos(k * M_PI / 3.0), std::sin(k * M_PI / 3.0), 0.0});
    Game g = make_game(pts);
    Outcome pi{{{0, 1, 2}, {3, 4, 5}}};
    Outcome rotated{{{1, 2, 3}, {4, 5, 0}}};
    Tolerance tol;
    auto rep = popularity_margin(g, pi, rotated, tol);
    CHECK(rep.margin == 0);
    CHECK(rep.improvers_forward.size() == 2);
    CHECK(rep.improvers_backward.size() == 2);

    auto strict = decide_popularity(g, pi, PopularityMode::strict, 15, tol);
    CHECK(strict.status == PopularityStatus::not_strictly_popular);
    REQUIRE(strict.witness.has_value());
    CHECK(popularity_margin(g, pi, *strict.witness, tol).margin <= 0);
}

TEST_CASE("all-agents-in-best-rooms implies popularity (exhaustive)") {
    Tolerance tol;
    Game g = three_triangles();
    // the triangle outcome puts every agent in one of its most preferred rooms
    Outcome tri{{{0, 1, 2}, {3, 4, 5}, {6, 7, 8}}};
    for (const auto& room : tri.rooms)
        for (int id : room) {
            auto best = most_preferred_rooms(g, id, tol);
            std::array<int, 2> partners{0, 0};
            int k = 0;
            for (int o : room)
                if (o != id) partners[static_cast<size_t>(k++)] = o;
            if (partners[0] > partners[1]) std::swap(partners[0], partners[1]);
            CHECK(std::find(best.begin(), best.end(), partners) != best.end());
        }
    auto verdict = decide_popularity(g, tri, PopularityMode::popular, 15, tol);
    CHECK(verdict.status == PopularityStatus::popular);
}

TEST_CASE("local search with zero budget finds nothing") {
    Tolerance tol;
    Game g = three_triangles();
    Outcome tri{{{0, 1, 2}, {3, 4, 5}, {6, 7, 8}}};
    CHECK_FALSE(search_improving_outcome(g, tri, 0, 42, tol).has_value());
}

TEST_CASE("local search improves a scrambled outcome") {
    Tolerance tol;
    Game g = three_triangles();
    Outcome mixed{{{0, 1, 3}, {2, 4, 5}, {6, 7, 8}}};
    auto found = search_improving_outcome(g, mixed, 100000, 42, tol);
    REQUIRE(found.has_value());
    CHECK(found->second.margin > 0);
    // determinism: same seed, same witness
    auto again = search_improving_outcome(g, mixed, 100000, 42, tol);
    REQUIRE(again.has_value());
    CHECK(found->first == again->first);
}
