// Command-line front end. Talks to the library exclusively through the
// C interface in esr.h; JSON results are parsed here only for display
// and exit-status decisions.
//
// Exit codes: 0 success/verified, 1 property refuted (witness path
// printed), 2 usage or I/O error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "esr.h"

namespace {

using nlohmann::json;

struct XFree {
    void operator()(esr_x3c* p) const { esr_x3c_free(p); }
    void operator()(esr_game* p) const { esr_game_free(p); }
    void operator()(esr_drawing* p) const { esr_drawing_free(p); }
    void operator()(esr_reduction* p) const { esr_reduction_free(p); }
    void operator()(esr_outcome* p) const { esr_outcome_free(p); }
};
template <typename T>
using Handle = std::unique_ptr<T, XFree>;

[[noreturn]] void die(const std::string& msg, int code = 2) {
    std::cerr << "error: " << msg << "\n";
    std::exit(code);
}

void require_ok(int rc, const std::string& what) {
    if (rc != ESR_OK) die(what + ": " + esr_last_error());
}

std::string take(char* s) {
    std::string out = s ? s : "";
    esr_string_free(s);
    return out;
}

Handle<esr_x3c> load_x3c(const std::string& path) {
    esr_x3c* h = nullptr;
    require_ok(esr_x3c_load(path.c_str(), &h), "loading " + path);
    return Handle<esr_x3c>(h);
}

Handle<esr_game> load_game(const std::string& path) {
    esr_game* h = nullptr;
    require_ok(esr_game_load(path.c_str(), &h), "loading " + path);
    return Handle<esr_game>(h);
}

Handle<esr_reduction> load_reduction(const std::string& path) {
    esr_reduction* h = nullptr;
    require_ok(esr_reduction_load(path.c_str(), &h), "loading " + path);
    return Handle<esr_reduction>(h);
}

Handle<esr_outcome> load_outcome(const std::string& path, const esr_game* game) {
    esr_outcome* h = nullptr;
    require_ok(esr_outcome_load(path.c_str(), game, &h), "loading " + path);
    return Handle<esr_outcome>(h);
}

void save_witness(const json& rooms, const std::string& path, const esr_game* game) {
    char* fp = nullptr;
    require_ok(esr_game_fingerprint(game, &fp), "fingerprinting game");
    json doc;
    doc["format_version"] = 1;
    doc["game_fingerprint"] = take(fp);
    doc["rooms"] = rooms;
    std::ofstream out(path, std::ios::binary);
    if (!out) die("cannot write " + path);
    out << doc.dump(1) << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"3D-Euclidean stable roommates games, popularity checks, and the "
                 "planar-cubic exact-cover reduction"};
    app.require_subcommand(1);

    // ---- x3c ----
    auto* x3c_cmd = app.add_subcommand("x3c", "validate or solve exact-cover instances");
    x3c_cmd->require_subcommand(1);
    std::string x3c_file;
    bool solve_all = false;
    long long solve_limit = 1;
    auto* x3c_validate = x3c_cmd->add_subcommand("validate", "check the PC-X3C properties");
    x3c_validate->add_option("file", x3c_file)->required();
    auto* x3c_solve = x3c_cmd->add_subcommand("solve", "search for exact covers");
    x3c_solve->add_option("file", x3c_file)->required();
    x3c_solve->add_flag("--all", solve_all, "enumerate all solutions");
    x3c_solve->add_option("--limit", solve_limit, "stop after this many solutions");

    // ---- draw ----
    auto* draw_cmd = app.add_subcommand("draw", "orthogonal drawing of the associated graph");
    std::string draw_in, draw_out, draw_import, draw_svg;
    uint64_t draw_seed = 0;
    draw_cmd->add_option("x3c", draw_in)->required();
    draw_cmd->add_option("-o,--output", draw_out, "drawing JSON output")->required();
    draw_cmd->add_option("--import", draw_import, "validate and use an existing drawing");
    draw_cmd->add_option("--svg", draw_svg, "also render an SVG");
    draw_cmd->add_option("--seed", draw_seed);

    // ---- reduce ----
    auto* reduce_cmd = app.add_subcommand("reduce", "build the 3D-EuclidSR game from an instance");
    std::string reduce_in, reduce_out, reduce_artifacts, reduce_drawing;
    double reduce_eps = 0.0005;
    uint64_t reduce_seed = 0;
    reduce_cmd->add_option("x3c", reduce_in)->required();
    reduce_cmd->add_option("-o,--output", reduce_out, "game JSON output")->required();
    reduce_cmd->add_option("--epsilon", reduce_eps, "pair distance (0, 0.001)");
    reduce_cmd->add_option("--artifacts", reduce_artifacts, "write the reduction artifacts");
    reduce_cmd->add_option("--drawing", reduce_drawing, "use this drawing instead of embedding");
    reduce_cmd->add_option("--seed", reduce_seed);

    // ---- outcome ----
    auto* outcome_cmd = app.add_subcommand("outcome", "construct canonical outcomes");
    outcome_cmd->require_subcommand(1);
    std::string outcome_artifacts, outcome_out;
    long long solution_index = 0;
    auto* outcome_pp = outcome_cmd->add_subcommand("pp", "permanent popular outcome");
    outcome_pp->add_option("--artifacts", outcome_artifacts)->required();
    outcome_pp->add_option("-o,--output", outcome_out)->required();
    auto* outcome_reduced = outcome_cmd->add_subcommand("reduced", "reduced outcome of a cover");
    outcome_reduced->add_option("--artifacts", outcome_artifacts)->required();
    outcome_reduced->add_option("-o,--output", outcome_out)->required();
    outcome_reduced->add_option("--solution-index", solution_index,
                                "which solution in canonical order (0-based)");

    // ---- verify ----
    auto* verify_cmd = app.add_subcommand("verify", "verification suites");
    verify_cmd->require_subcommand(1);
    std::string verify_game, verify_outcome_file, verify_artifacts;
    double verify_tol = 0.0;
    auto* verify_outcome = verify_cmd->add_subcommand("outcome", "partition validity");
    verify_outcome->add_option("--game", verify_game)->required();
    verify_outcome->add_option("--outcome", verify_outcome_file)->required();
    auto* verify_reduction = verify_cmd->add_subcommand("reduction", "construction properties");
    verify_reduction->add_option("--artifacts", verify_artifacts)->required();
    verify_reduction->add_option("--tol", verify_tol);
    auto* verify_allbest = verify_cmd->add_subcommand("all-best", "every agent at minimum cost");
    verify_allbest->add_option("--game", verify_game)->required();
    verify_allbest->add_option("--outcome", verify_outcome_file)->required();
    verify_allbest->add_option("--tol", verify_tol);

    // ---- margin ----
    auto* margin_cmd = app.add_subcommand("margin", "popularity margin phi(pi, pi')");
    std::string margin_game, margin_pi, margin_pi_prime;
    double margin_tol = 0.0;
    margin_cmd->add_option("--game", margin_game)->required();
    margin_cmd->add_option("--pi", margin_pi)->required();
    margin_cmd->add_option("--pi-prime", margin_pi_prime)->required();
    margin_cmd->add_option("--tol", margin_tol);

    // ---- popular ----
    auto* popular_cmd = app.add_subcommand("popular", "popularity decision procedures");
    popular_cmd->require_subcommand(1);
    std::string pop_game, pop_outcome, pop_mode = "popular", pop_witness = "witness_outcome.json";
    int pop_cap = 15;
    long long pop_budget = 100000;
    uint64_t pop_seed = 0;
    double pop_tol = 0.0;
    auto* popular_check = popular_cmd->add_subcommand("check", "popular / strictly popular");
    popular_check->add_option("--game", pop_game)->required();
    popular_check->add_option("--outcome", pop_outcome)->required();
    popular_check->add_option("--mode", pop_mode)->check(CLI::IsMember({"popular", "strict"}));
    popular_check->add_option("--cap", pop_cap, "exhaustive enumeration cap (agents)");
    popular_check->add_option("--budget", pop_budget, "local search moves beyond the cap");
    popular_check->add_option("--seed", pop_seed);
    popular_check->add_option("--tol", pop_tol);
    popular_check->add_option("--witness-out", pop_witness);

    // ---- decide ----
    auto* decide_cmd = app.add_subcommand("decide", "structural decisions on reduction artifacts");
    decide_cmd->require_subcommand(1);
    std::string decide_artifacts, decide_cert;
    auto* decide_strict = decide_cmd->add_subcommand(
        "strict-exists", "does a strictly popular outcome exist for the generated game");
    decide_strict->add_option("--artifacts", decide_artifacts)->required();
    decide_strict->add_option("--certificate-out", decide_cert,
                              "write pi_S here when strictness fails");

    // ---- export ----
    auto* export_cmd = app.add_subcommand("export", "exports");
    export_cmd->require_subcommand(1);
    std::string export_game, export_out;
    auto* export_points = export_cmd->add_subcommand("points", "one 'x y z label' line per agent");
    export_points->add_option("--game", export_game)->required();
    export_points->add_option("-o,--output", export_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (x3c_validate->parsed()) {
        auto h = load_x3c(x3c_file);
        char* rep = nullptr;
        require_ok(esr_x3c_validate(h.get(), &rep), "validate");
        auto j = json::parse(take(rep));
        std::cout << "is_x3c: " << j["is_x3c"] << "\nis_cubic: " << j["is_cubic"]
                  << "\nis_planar: " << j["is_planar"] << "\nsizes_ok: " << j["sizes_ok"]
                  << "\npcx3c: " << j["is_pcx3c"] << "\n";
        for (const auto& note : j["notes"]) std::cout << "note: " << note.get<std::string>() << "\n";
        return j["is_pcx3c"].get<bool>() ? 0 : 1;
    }
    if (x3c_solve->parsed()) {
        auto h = load_x3c(x3c_file);
        char* rep = nullptr;
        require_ok(esr_x3c_solve(h.get(), solve_all ? 0 : solve_limit, &rep), "solve");
        auto j = json::parse(take(rep));
        const auto& sols = j["solutions"];
        std::cout << "solutions: " << sols.size() << (j["exhaustive"].get<bool>() ? "" : " (truncated)")
                  << "\n";
        for (const auto& sol : sols) {
            std::cout << "{";
            for (size_t i = 0; i < sol.size(); ++i)
                std::cout << (i ? "," : "") << sol[i].get<int>() + 1;
            std::cout << "}\n";
        }
        return sols.empty() ? 1 : 0;
    }
    if (draw_cmd->parsed()) {
        auto h = load_x3c(draw_in);
        Handle<esr_drawing> d;
        if (!draw_import.empty()) {
            esr_drawing* raw = nullptr;
            require_ok(esr_drawing_load(draw_import.c_str(), &raw), "loading " + draw_import);
            d.reset(raw);
            char* rep = nullptr;
            require_ok(esr_drawing_validate(h.get(), d.get(), &rep), "validating drawing");
            auto j = json::parse(take(rep));
            if (!j["ok"].get<bool>()) {
                for (const auto& v : j["violations"])
                    std::cerr << "violation: " << v.get<std::string>() << "\n";
                die("imported drawing is invalid for this instance");
            }
        } else {
            esr_drawing* raw = nullptr;
            require_ok(esr_draw(h.get(), draw_seed, &raw), "embedding");
            d.reset(raw);
        }
        require_ok(esr_drawing_save(d.get(), draw_out.c_str()), "writing " + draw_out);
        if (!draw_svg.empty())
            require_ok(esr_drawing_svg(d.get(), draw_svg.c_str()), "writing " + draw_svg);
        std::cout << "drawing written to " << draw_out << "\n";
        return 0;
    }
    if (reduce_cmd->parsed()) {
        auto h = load_x3c(reduce_in);
        esr_reduction* raw = nullptr;
        if (!reduce_drawing.empty()) {
            esr_drawing* draw_raw = nullptr;
            require_ok(esr_drawing_load(reduce_drawing.c_str(), &draw_raw), "loading drawing");
            Handle<esr_drawing> d(draw_raw);
            require_ok(esr_reduce_with_drawing(h.get(), d.get(), reduce_eps, reduce_seed, &raw),
                       "reduce");
        } else {
            require_ok(esr_reduce(h.get(), reduce_eps, reduce_seed, &raw), "reduce");
        }
        Handle<esr_reduction> red(raw);
        esr_game* game_raw = nullptr;
        require_ok(esr_reduction_game(red.get(), &game_raw), "extracting game");
        Handle<esr_game> game(game_raw);
        require_ok(esr_game_save(game.get(), reduce_out.c_str()), "writing " + reduce_out);
        if (!reduce_artifacts.empty())
            require_ok(esr_reduction_save(red.get(), reduce_artifacts.c_str()),
                       "writing " + reduce_artifacts);
        long long b = 0, t = 0, a = 0;
        esr_reduction_counts(red.get(), &b, &t, &a);
        std::cout << "agents: " << esr_game_agent_count(game.get()) << " (bottom " << b << ", top "
                  << t << ", ascending " << a << ")\n";
        return 0;
    }
    if (outcome_pp->parsed() || outcome_reduced->parsed()) {
        auto red = load_reduction(outcome_artifacts);
        esr_outcome* raw = nullptr;
        if (outcome_pp->parsed())
            require_ok(esr_outcome_pp(red.get(), &raw), "constructing pi_pp");
        else
            require_ok(esr_outcome_reduced(red.get(), solution_index, &raw), "constructing pi_S");
        Handle<esr_outcome> o(raw);
        esr_game* game_raw = nullptr;
        require_ok(esr_reduction_game(red.get(), &game_raw), "extracting game");
        Handle<esr_game> game(game_raw);
        require_ok(esr_outcome_save(o.get(), game.get(), outcome_out.c_str()),
                   "writing " + outcome_out);
        std::cout << "outcome written to " << outcome_out << "\n";
        return 0;
    }
    if (verify_outcome->parsed()) {
        auto game = load_game(verify_game);
        auto o = load_outcome(verify_outcome_file, game.get());
        char* rep = nullptr;
        require_ok(esr_verify_outcome(game.get(), o.get(), &rep), "verify outcome");
        auto j = json::parse(take(rep));
        for (const auto& v : j["violations"]) std::cout << "violation: " << v.get<std::string>() << "\n";
        std::cout << (j["ok"].get<bool>() ? "outcome is a valid partition" : "outcome is invalid")
                  << "\n";
        return j["ok"].get<bool>() ? 0 : 1;
    }
    if (verify_reduction->parsed()) {
        auto red = load_reduction(verify_artifacts);
        char* rep = nullptr;
        require_ok(esr_reduction_validate(red.get(), verify_tol, &rep), "verify reduction");
        auto j = json::parse(take(rep));
        std::cout << "triples checked: " << j["triples_checked"] << ", violations: "
                  << j["triple_violations"] << " (max error " << j["max_triple_error"] << ")\n"
                  << "min construction edge: " << j["min_construction_edge"] << "\n"
                  << "min-cost violations: " << j["min_cost_violations"] << "\n"
                  << "preferred-room mismatches: " << j["preferred_mismatches"] << "\n"
                  << "best-vs-next gap: " << j["gap"] << "\n";
        for (const auto& note : j["notes"]) std::cout << "note: " << note.get<std::string>() << "\n";
        std::cout << (j["ok"].get<bool>() ? "reduction verified" : "reduction checks FAILED") << "\n";
        return j["ok"].get<bool>() ? 0 : 1;
    }
    if (verify_allbest->parsed()) {
        auto game = load_game(verify_game);
        auto o = load_outcome(verify_outcome_file, game.get());
        char* rep = nullptr;
        require_ok(esr_verify_all_best(game.get(), o.get(), verify_tol, &rep), "verify all-best");
        auto j = json::parse(take(rep));
        for (const auto& off : j["offenders"])
            std::cout << "offender: " << off["label"].get<std::string>() << " pays " << off["cost"]
                      << " vs minimum " << off["min_cost"] << "\n";
        std::cout << (j["ok"].get<bool>() ? "outcome is all-best" : "outcome is not all-best")
                  << "\n";
        return j["ok"].get<bool>() ? 0 : 1;
    }
    if (margin_cmd->parsed()) {
        auto game = load_game(margin_game);
        auto pi = load_outcome(margin_pi, game.get());
        auto pip = load_outcome(margin_pi_prime, game.get());
        char* rep = nullptr;
        require_ok(esr_margin(game.get(), pi.get(), pip.get(), margin_tol, &rep), "margin");
        auto j = json::parse(take(rep));
        std::cout << "margin: " << j["margin"] << "\n"
                  << "improvers forward: " << j["improvers_forward"].size() << "\n"
                  << "improvers backward: " << j["improvers_backward"].size() << "\n";
        return 0;
    }
    if (popular_check->parsed()) {
        auto game = load_game(pop_game);
        auto o = load_outcome(pop_outcome, game.get());
        char* rep = nullptr;
        require_ok(esr_popular_check(game.get(), o.get(), pop_mode == "strict" ? 1 : 0, pop_cap,
                                     pop_budget, pop_seed, pop_tol, &rep),
                   "popular check");
        auto j = json::parse(take(rep));
        std::string status = j["status"].get<std::string>();
        std::cout << "method: " << j["method"].get<std::string>() << "\n"
                  << "status: " << status << "\n"
                  << "outcomes examined: " << j["outcomes_examined"] << "\n";
        if (j.contains("witness")) {
            save_witness(j["witness"], pop_witness, game.get());
            std::cout << "witness written to " << pop_witness << "\n";
            return 1;
        }
        return 0;
    }
    if (decide_strict->parsed()) {
        auto red = load_reduction(decide_artifacts);
        char* rep = nullptr;
        require_ok(esr_decide_strict_exists(red.get(), &rep), "decide strict-exists");
        auto j = json::parse(take(rep));
        bool exists = j["exists"].get<bool>();
        std::cout << "strictly popular outcome exists: " << (exists ? "true" : "false") << "\n";
        if (!exists) {
            std::cout << "cover solution (1-based sets):";
            for (const auto& s : j["solution"]) std::cout << " " << s.get<int>() + 1;
            std::cout << "\n";
            if (!decide_cert.empty()) {
                esr_game* game_raw = nullptr;
                require_ok(esr_reduction_game(red.get(), &game_raw), "extracting game");
                Handle<esr_game> game(game_raw);
                save_witness(j["pi_s"], decide_cert, game.get());
                std::cout << "certificate written to " << decide_cert << "\n";
            }
        }
        return 0;
    }
    if (export_points->parsed()) {
        auto game = load_game(export_game);
        require_ok(esr_game_export_xyz(game.get(), export_out.c_str()), "writing " + export_out);
        std::cout << "points written to " << export_out << "\n";
        return 0;
    }
    die("no subcommand executed");
}
