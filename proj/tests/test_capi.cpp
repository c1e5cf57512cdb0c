// Exercises the shared-library C interface end to end on the corpus
// instance: every handle type, the error paths, and the JSON results.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "esr.h"

#ifndef CORPUS_DIR
#define CORPUS_DIR "."
#endif

using nlohmann::json;

namespace {

std::string corpus(const std::string& name) { return std::string(CORPUS_DIR) + "/" + name; }

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("esr_capi_" + name)).string();
}

std::string grab(char* s) {
    REQUIRE(s != nullptr);
    std::string out = s;
    esr_string_free(s);
    return out;
}

} // namespace

TEST_CASE("error paths set messages and codes") {
    esr_x3c* inst = nullptr;
    CHECK(esr_x3c_load("/no/such/file.json", &inst) == ESR_EIO);
    CHECK(std::string(esr_last_error()).find("file") != std::string::npos);
    CHECK(esr_x3c_load(nullptr, &inst) == ESR_EINVAL);
    CHECK(esr_x3c_validate(nullptr, nullptr) == ESR_EINVAL);
}

TEST_CASE("full pipeline through the C interface") {
    esr_x3c* inst = nullptr;
    REQUIRE(esr_x3c_load(corpus("sample6.json").c_str(), &inst) == ESR_OK);

    char* rep = nullptr;
    REQUIRE(esr_x3c_validate(inst, &rep) == ESR_OK);
    auto jval = json::parse(grab(rep));
    CHECK(jval["is_pcx3c"] == true);

    REQUIRE(esr_x3c_solve(inst, 0, &rep) == ESR_OK);
    auto jsol = json::parse(grab(rep));
    bool has_known_solution = false;
    for (const auto& s : jsol["solutions"])
        if (s == json::array({0, 5})) has_known_solution = true;
    CHECK(has_known_solution);

    esr_drawing* drawing = nullptr;
    REQUIRE(esr_drawing_load(corpus("sample6_drawing.json").c_str(), &drawing) == ESR_OK);
    REQUIRE(esr_drawing_validate(inst, drawing, &rep) == ESR_OK);
    CHECK(json::parse(grab(rep))["ok"] == true);
    std::string svg_path = tmp_path("drawing.svg");
    CHECK(esr_drawing_svg(drawing, svg_path.c_str()) == ESR_OK);

    esr_reduction* red = nullptr;
    REQUIRE(esr_reduce_with_drawing(inst, drawing, 0.0005, 0, &red) == ESR_OK);
    long long b = 0, t = 0, a = 0;
    REQUIRE(esr_reduction_counts(red, &b, &t, &a) == ESR_OK);
    CHECK(b > 0);
    CHECK(t > 0);
    CHECK(a > 0);

    REQUIRE(esr_reduction_validate(red, 0.0, &rep) == ESR_OK);
    auto jred = json::parse(grab(rep));
    CHECK(jred["ok"] == true);
    CHECK(jred["gap"].get<double>() > 0.01);

    esr_game* game = nullptr;
    REQUIRE(esr_reduction_game(red, &game) == ESR_OK);
    std::string game_path = tmp_path("game.json");
    REQUIRE(esr_game_save(game, game_path.c_str()) == ESR_OK);
    esr_game* game2 = nullptr;
    REQUIRE(esr_game_load(game_path.c_str(), &game2) == ESR_OK);
    CHECK(esr_game_agent_count(game2) == esr_game_agent_count(game));

    char* fp1 = nullptr;
    char* fp2 = nullptr;
    REQUIRE(esr_game_fingerprint(game, &fp1) == ESR_OK);
    REQUIRE(esr_game_fingerprint(game2, &fp2) == ESR_OK);
    CHECK(grab(fp1) == grab(fp2));

    std::string artifacts_path = tmp_path("artifacts.json");
    REQUIRE(esr_reduction_save(red, artifacts_path.c_str()) == ESR_OK);
    esr_reduction* red2 = nullptr;
    REQUIRE(esr_reduction_load(artifacts_path.c_str(), &red2) == ESR_OK);

    esr_outcome* pp = nullptr;
    REQUIRE(esr_outcome_pp(red2, &pp) == ESR_OK);
    REQUIRE(esr_verify_all_best(game, pp, 0.0, &rep) == ESR_OK);
    CHECK(json::parse(grab(rep))["ok"] == true);

    esr_outcome* ps = nullptr;
    REQUIRE(esr_outcome_reduced(red2, 0, &ps) == ESR_OK);
    REQUIRE(esr_margin(game, pp, ps, 0.0, &rep) == ESR_OK);
    auto jm = json::parse(grab(rep));
    CHECK(jm["margin"] == 0);
    CHECK(jm["improvers_forward"].empty());
    CHECK(jm["improvers_backward"].empty());

    REQUIRE(esr_classify_all_best(red2, pp, 0.0, &rep) == ESR_OK);
    CHECK(json::parse(grab(rep))["classification"] == "PP");
    REQUIRE(esr_classify_all_best(red2, ps, 0.0, &rep) == ESR_OK);
    CHECK(json::parse(grab(rep))["classification"] == "Reduced");

    REQUIRE(esr_decide_strict_exists(red2, &rep) == ESR_OK);
    CHECK(json::parse(grab(rep))["exists"] == false);

    std::string outcome_path = tmp_path("pp.json");
    REQUIRE(esr_outcome_save(pp, game, outcome_path.c_str()) == ESR_OK);
    esr_outcome* pp_back = nullptr;
    REQUIRE(esr_outcome_load(outcome_path.c_str(), game, &pp_back) == ESR_OK);
    REQUIRE(esr_verify_outcome(game, pp_back, &rep) == ESR_OK);
    CHECK(json::parse(grab(rep))["ok"] == true);

    // fingerprint mismatch: a different game must reject this outcome file
    esr_x3c* other = nullptr;
    REQUIRE(esr_x3c_perturb(inst, 3, &other) == ESR_OK);
    esr_reduction* other_red = nullptr;
    REQUIRE(esr_reduce(other, 0.0005, 0, &other_red) == ESR_OK);
    esr_game* other_game = nullptr;
    REQUIRE(esr_reduction_game(other_red, &other_game) == ESR_OK);
    esr_outcome* rejected = nullptr;
    CHECK(esr_outcome_load(outcome_path.c_str(), other_game, &rejected) == ESR_EINVAL);

    std::string xyz_path = tmp_path("points.xyz");
    CHECK(esr_game_export_xyz(game, xyz_path.c_str()) == ESR_OK);

    esr_outcome_free(pp_back);
    esr_outcome_free(ps);
    esr_outcome_free(pp);
    esr_reduction_free(red2);
    esr_reduction_free(red);
    esr_reduction_free(other_red);
    esr_game_free(game);
    esr_game_free(game2);
    esr_game_free(other_game);
    esr_drawing_free(drawing);
    esr_x3c_free(inst);
    esr_x3c_free(other);
}

TEST_CASE("popular check through the C interface") {
    // small synthetic game exercised exhaustively
    esr_x3c* inst = nullptr;
    REQUIRE(esr_x3c_load(corpus("sample6.json").c_str(), &inst) == ESR_OK);
    esr_reduction* red = nullptr;
    REQUIRE(esr_reduce(inst, 0.0005, 0, &red) == ESR_OK);
    esr_game* game = nullptr;
    REQUIRE(esr_reduction_game(red, &game) == ESR_OK);
    esr_outcome* pp = nullptr;
    REQUIRE(esr_outcome_pp(red, &pp) == ESR_OK);

    // far above the cap: local search finds no improvement over pi_pp
    char* rep = nullptr;
    REQUIRE(esr_popular_check(game, pp, 0, 15, 2000, 42, 0.0, &rep) == ESR_OK);
    auto j = json::parse(grab(rep));
    CHECK(j["method"] == "local_search");
    CHECK(j["status"] == "inconclusive");

    esr_outcome_free(pp);
    esr_game_free(game);
    esr_reduction_free(red);
    esr_x3c_free(inst);
}

TEST_CASE("exhaustive popular check on a small game") {
    const double h = 0.8660254037844386;
    json game_doc = {{"format_version", 1}, {"room_size", 3}, {"epsilon", 0.0}};
    game_doc["agents"] = json::array();
    int id = 0;
    for (int t = 0; t < 3; ++t) {
        double ox = 20.0 * t, oy = 15.0 * (t % 2);
        for (auto [x, y] : {std::pair{ox, oy}, {ox + 1.0, oy}, {ox + 0.5, oy + h}}) {
            game_doc["agents"].push_back({{"id", id},
                                          {"label", "p" + std::to_string(id)},
                                          {"kind", "plain"},
                                          {"pos", {x, y, 0.0}}});
            ++id;
        }
    }
    std::string game_path = tmp_path("small_game.json");
    { std::ofstream(game_path) << game_doc.dump(); }
    esr_game* game = nullptr;
    REQUIRE(esr_game_load(game_path.c_str(), &game) == ESR_OK);

    char* fp = nullptr;
    REQUIRE(esr_game_fingerprint(game, &fp) == ESR_OK);
    json outcome_doc = {{"format_version", 1},
                        {"game_fingerprint", grab(fp)},
                        {"rooms", {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}}}};
    std::string outcome_path = tmp_path("small_outcome.json");
    { std::ofstream(outcome_path) << outcome_doc.dump(); }
    esr_outcome* tri = nullptr;
    REQUIRE(esr_outcome_load(outcome_path.c_str(), game, &tri) == ESR_OK);

    char* rep = nullptr;
    REQUIRE(esr_popular_check(game, tri, 1, 15, 0, 0, 0.0, &rep) == ESR_OK);
    auto j = json::parse(grab(rep));
    CHECK(j["method"] == "exhaustive");
    CHECK(j["status"] == "strictly_popular");
    CHECK(j["outcomes_examined"] == 280);

    // a mixed outcome is refuted with a witness
    json mixed_doc = outcome_doc;
    mixed_doc["rooms"] = {{0, 1, 3}, {2, 4, 5}, {6, 7, 8}};
    std::string mixed_path = tmp_path("small_mixed.json");
    { std::ofstream(mixed_path) << mixed_doc.dump(); }
    esr_outcome* mixed = nullptr;
    REQUIRE(esr_outcome_load(mixed_path.c_str(), game, &mixed) == ESR_OK);
    REQUIRE(esr_popular_check(game, mixed, 0, 15, 0, 0, 0.0, &rep) == ESR_OK);
    auto jm = json::parse(grab(rep));
    CHECK(jm["status"] == "not_popular");
    CHECK(jm.contains("witness"));

    esr_outcome_free(mixed);
    esr_outcome_free(tri);
    esr_game_free(game);
}
