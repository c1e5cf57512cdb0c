#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "esr/io.hpp"

using namespace esr;

namespace {

Game random_game(uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-1e3, 1e3);
    Game g;
    g.room_size = 3;
    g.epsilon = 0.0005;
    for (int i = 0; i < 9; ++i)
        g.agents.push_back({i, "agent_" + std::to_string(i), AgentKind::plain,
                            {coord(rng), coord(rng), coord(rng)}});
    return g;
}

} // namespace

TEST_CASE("game json round trip is bit exact") {
    Game g = random_game(5);
    auto text = game_to_json(g);
    Game back = game_from_json(text);
    REQUIRE(back.agents.size() == g.agents.size());
    for (size_t i = 0; i < g.agents.size(); ++i) {
        CHECK(back.agents[i].pos.x == g.agents[i].pos.x);
        CHECK(back.agents[i].pos.y == g.agents[i].pos.y);
        CHECK(back.agents[i].pos.z == g.agents[i].pos.z);
        CHECK(back.agents[i].label == g.agents[i].label);
        CHECK(back.agents[i].kind == g.agents[i].kind);
    }
    CHECK(game_to_json(back) == text);
}

TEST_CASE("unknown fields are rejected") {
    Game g = random_game(6);
    auto text = game_to_json(g);
    auto hacked = text;
    hacked.insert(hacked.find("\"room_size\""), "\"extra\": 1, ");
    CHECK_THROWS_AS(game_from_json(hacked), std::invalid_argument);
    CHECK_THROWS(outcome_from_json("{\"format_version\":1, \"game_fingerprint\":\"x\", "
                                   "\"rooms\":[], \"oops\": 2}",
                                   ""));
    CHECK_THROWS(x3c_from_json("{\"format_version\":1, \"universe_size\":6, \"sets\":[], "
                               "\"bogus\": []}"));
}

TEST_CASE("fingerprints bind outcomes to games") {
    Game g = random_game(7);
    std::string fp = game_fingerprint(g);
    CHECK(fp.size() == 16);
    Outcome o{{{0, 1, 2}, {3, 4, 5}, {6, 7, 8}}};
    auto text = outcome_to_json(o, fp);
    auto back = outcome_from_json(text, fp);
    CHECK(back == o); // canonical form in, canonical out

    Game other = random_game(8);
    std::string fp2 = game_fingerprint(other);
    CHECK(fp != fp2);
    CHECK_THROWS_AS(outcome_from_json(text, fp2), std::invalid_argument);
    CHECK_NOTHROW(outcome_from_json(text, "")); // no game to check against
}

TEST_CASE("outcome serialization canonicalizes room order") {
    Game g = random_game(9);
    std::string fp = game_fingerprint(g);
    Outcome scrambled{{{5, 3, 4}, {2, 0, 1}, {8, 6, 7}}};
    Outcome sorted_rooms{{{0, 1, 2}, {3, 4, 5}, {6, 7, 8}}};
    CHECK(outcome_to_json(scrambled, fp) == outcome_to_json(sorted_rooms, fp));
}

TEST_CASE("xyz export has one line per agent") {
    Game g = random_game(10);
    auto text = points_to_xyz(g);
    size_t lines = 0, pos = 0;
    while ((pos = text.find('\n', pos)) != std::string::npos) {
        ++lines;
        ++pos;
    }
    CHECK(lines == g.agents.size());
    CHECK(text.find("agent_0") != std::string::npos);
}

TEST_CASE("x3c json round trip") {
    X3CInstance in;
    in.universe_size = 6;
    in.sets = {{1, 2, 3}, {4, 5, 6}};
    auto text = x3c_to_json(in);
    auto back = x3c_from_json(text);
    CHECK(back.universe_size == 6);
    CHECK(back.sets == in.sets);
}
