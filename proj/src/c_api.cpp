#include "esr.h"

#include <cstring>
#include <new>

#include "esr/io.hpp"
#include "esr/outcomes.hpp"
#include "esr/popularity.hpp"
#include "esr/reduction.hpp"

#include "json.hpp"

using nlohmann::ordered_json;

struct esr_x3c {
    esr::X3CInstance inst;
};
struct esr_game {
    esr::Game game;
};
struct esr_drawing {
    esr::OrthogonalDrawing drawing;
};
struct esr_reduction {
    esr::ReductionResult res;
};
struct esr_outcome {
    esr::Outcome outcome;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

template <typename F>
int wrap(F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        return fail(ESR_EINVAL, e.what());
    } catch (const std::exception& e) {
        return fail(ESR_ERROR, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = new (std::nothrow) char[s.size() + 1];
    if (!out) return nullptr;
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

int give(char** slot, const std::string& s) {
    if (!slot) return fail(ESR_EINVAL, "null output pointer");
    *slot = dup_string(s);
    return *slot ? ESR_OK : fail(ESR_ERROR, "out of memory");
}

ordered_json rooms_json(const esr::Outcome& o) {
    esr::Outcome canon = o;
    canon.canonicalize();
    return ordered_json(canon.rooms);
}

} // namespace

extern "C" {

const char* esr_last_error(void) { return g_last_error.c_str(); }

void esr_string_free(char* s) { delete[] s; }

/* ---- x3c ---- */

int esr_x3c_load(const char* path, esr_x3c** out) {
    return wrap([&]() -> int {
        if (!path || !out) return fail(ESR_EINVAL, "null argument");
        std::string text;
        try {
            text = esr::read_file(path);
        } catch (const std::exception& e) {
            return fail(ESR_EIO, e.what());
        }
        auto inst = esr::x3c_from_json(text);
        *out = new esr_x3c{std::move(inst)};
        return ESR_OK;
    });
}

void esr_x3c_free(esr_x3c* h) { delete h; }

int esr_x3c_save(const esr_x3c* h, const char* path) {
    return wrap([&]() -> int {
        if (!h || !path) return fail(ESR_EINVAL, "null argument");
        esr::write_file(path, esr::x3c_to_json(h->inst));
        return ESR_OK;
    });
}

int esr_x3c_validate(const esr_x3c* h, char** report_json) {
    return wrap([&]() -> int {
        if (!h) return fail(ESR_EINVAL, "null instance");
        auto rep = esr::validate_pcx3c(h->inst);
        ordered_json j;
        j["is_x3c"] = rep.is_x3c;
        j["is_cubic"] = rep.is_cubic;
        j["is_planar"] = rep.is_planar;
        j["sizes_ok"] = rep.sizes_ok;
        j["is_pcx3c"] = rep.is_pcx3c();
        j["notes"] = rep.notes;
        return give(report_json, j.dump());
    });
}

int esr_x3c_solve(const esr_x3c* h, long long limit, char** solutions_json) {
    return wrap([&]() -> int {
        if (!h) return fail(ESR_EINVAL, "null instance");
        auto sols = esr::solve_exact_cover(h->inst, limit);
        ordered_json j;
        j["solutions"] = sols;
        j["exhaustive"] = limit <= 0 || static_cast<long long>(sols.size()) < limit;
        return give(solutions_json, j.dump());
    });
}

int esr_x3c_perturb(const esr_x3c* h, uint64_t seed, esr_x3c** out) {
    return wrap([&]() -> int {
        if (!h || !out) return fail(ESR_EINVAL, "null argument");
        *out = new esr_x3c{esr::perturb(h->inst, seed)};
        return ESR_OK;
    });
}

/* ---- drawing ---- */

int esr_draw(const esr_x3c* h, uint64_t seed, esr_drawing** out) {
    return wrap([&]() -> int {
        if (!h || !out) return fail(ESR_EINVAL, "null argument");
        auto ag = esr::associated_graph(h->inst);
        *out = new esr_drawing{esr::embed_orthogonal(ag.graph, seed)};
        return ESR_OK;
    });
}

int esr_drawing_load(const char* path, esr_drawing** out) {
    return wrap([&]() -> int {
        if (!path || !out) return fail(ESR_EINVAL, "null argument");
        std::string text;
        try {
            text = esr::read_file(path);
        } catch (const std::exception& e) {
            return fail(ESR_EIO, e.what());
        }
        *out = new esr_drawing{esr::drawing_from_json(text)};
        return ESR_OK;
    });
}

void esr_drawing_free(esr_drawing* h) { delete h; }

int esr_drawing_save(const esr_drawing* h, const char* path) {
    return wrap([&]() -> int {
        if (!h || !path) return fail(ESR_EINVAL, "null argument");
        esr::write_file(path, esr::drawing_to_json(h->drawing));
        return ESR_OK;
    });
}

int esr_drawing_validate(const esr_x3c* inst, const esr_drawing* h, char** report_json) {
    return wrap([&]() -> int {
        if (!inst || !h) return fail(ESR_EINVAL, "null argument");
        auto ag = esr::associated_graph(inst->inst);
        auto rep = esr::validate_drawing(ag.graph, h->drawing);
        ordered_json j;
        j["ok"] = rep.ok;
        j["width"] = rep.width;
        j["height"] = rep.height;
        j["violations"] = rep.violations;
        return give(report_json, j.dump());
    });
}

int esr_drawing_svg(const esr_drawing* h, const char* path) {
    return wrap([&]() -> int {
        if (!h || !path) return fail(ESR_EINVAL, "null argument");
        esr::write_file(path, esr::render_svg(h->drawing));
        return ESR_OK;
    });
}

/* ---- game ---- */

int esr_game_load(const char* path, esr_game** out) {
    return wrap([&]() -> int {
        if (!path || !out) return fail(ESR_EINVAL, "null argument");
        std::string text;
        try {
            text = esr::read_file(path);
        } catch (const std::exception& e) {
            return fail(ESR_EIO, e.what());
        }
        *out = new esr_game{esr::game_from_json(text)};
        return ESR_OK;
    });
}

void esr_game_free(esr_game* h) { delete h; }

int esr_game_save(const esr_game* h, const char* path) {
    return wrap([&]() -> int {
        if (!h || !path) return fail(ESR_EINVAL, "null argument");
        esr::write_file(path, esr::game_to_json(h->game));
        return ESR_OK;
    });
}

int esr_game_agent_count(const esr_game* h) { return h ? h->game.agent_count() : -1; }

int esr_game_fingerprint(const esr_game* h, char** hex) {
    return wrap([&]() -> int {
        if (!h) return fail(ESR_EINVAL, "null game");
        return give(hex, esr::game_fingerprint(h->game));
    });
}

int esr_game_export_xyz(const esr_game* h, const char* path) {
    return wrap([&]() -> int {
        if (!h || !path) return fail(ESR_EINVAL, "null argument");
        esr::write_file(path, esr::points_to_xyz(h->game));
        return ESR_OK;
    });
}

/* ---- reduction ---- */

int esr_reduce(const esr_x3c* h, double epsilon, uint64_t seed, esr_reduction** out) {
    return wrap([&]() -> int {
        if (!h || !out) return fail(ESR_EINVAL, "null argument");
        *out = new esr_reduction{esr::reduce(h->inst, epsilon, seed)};
        return ESR_OK;
    });
}

int esr_reduce_with_drawing(const esr_x3c* h, const esr_drawing* d, double epsilon,
                            uint64_t seed, esr_reduction** out) {
    return wrap([&]() -> int {
        if (!h || !d || !out) return fail(ESR_EINVAL, "null argument");
        *out = new esr_reduction{esr::reduce_with_drawing(h->inst, d->drawing, epsilon, seed)};
        return ESR_OK;
    });
}

int esr_reduction_load(const char* path, esr_reduction** out) {
    return wrap([&]() -> int {
        if (!path || !out) return fail(ESR_EINVAL, "null argument");
        std::string text;
        try {
            text = esr::read_file(path);
        } catch (const std::exception& e) {
            return fail(ESR_EIO, e.what());
        }
        *out = new esr_reduction{esr::artifacts_from_json(text)};
        return ESR_OK;
    });
}

void esr_reduction_free(esr_reduction* h) { delete h; }

int esr_reduction_save(const esr_reduction* h, const char* path) {
    return wrap([&]() -> int {
        if (!h || !path) return fail(ESR_EINVAL, "null argument");
        esr::write_file(path, esr::artifacts_to_json(h->res.game, h->res.artifacts));
        return ESR_OK;
    });
}

int esr_reduction_game(const esr_reduction* h, esr_game** out) {
    return wrap([&]() -> int {
        if (!h || !out) return fail(ESR_EINVAL, "null argument");
        *out = new esr_game{h->res.game};
        return ESR_OK;
    });
}

int esr_reduction_counts(const esr_reduction* h, long long* bottom, long long* top,
                         long long* ascending) {
    if (!h || !bottom || !top || !ascending) return fail(ESR_EINVAL, "null argument");
    *bottom = h->res.artifacts.counts.bottom;
    *top = h->res.artifacts.counts.top;
    *ascending = h->res.artifacts.counts.ascending;
    return ESR_OK;
}

int esr_reduction_validate(const esr_reduction* h, double dist_eq, char** report_json) {
    return wrap([&]() -> int {
        if (!h) return fail(ESR_EINVAL, "null reduction");
        esr::Tolerance tol;
        if (dist_eq > 0) tol.dist_eq = dist_eq;
        auto rep = esr::validate_reduction(h->res.game, h->res.artifacts, tol);
        ordered_json j;
        j["ok"] = rep.ok;
        j["triples_checked"] = rep.triples_checked;
        j["triple_violations"] = rep.triple_violations;
        j["max_triple_error"] = rep.max_triple_error;
        j["min_construction_edge"] = rep.min_construction_edge;
        j["edges_ok"] = rep.edges_ok;
        j["min_cost_violations"] = rep.min_cost_violations;
        j["preferred_mismatches"] = rep.preferred_mismatches;
        j["gap"] = rep.gap;
        j["gap_ok"] = rep.gap_ok;
        j["notes"] = rep.notes;
        return give(report_json, j.dump());
    });
}

/* ---- outcomes ---- */

int esr_outcome_pp(const esr_reduction* h, esr_outcome** out) {
    return wrap([&]() -> int {
        if (!h || !out) return fail(ESR_EINVAL, "null argument");
        *out = new esr_outcome{esr::permanent_popular(h->res.game, h->res.artifacts)};
        return ESR_OK;
    });
}

int esr_outcome_reduced(const esr_reduction* h, long long solution_index, esr_outcome** out) {
    return wrap([&]() -> int {
        if (!h || !out) return fail(ESR_EINVAL, "null argument");
        // canonical order means the fully sorted solution list, so a
        // truncated search would index a different cover
        auto sols = esr::solve_exact_cover(h->res.artifacts.instance, 0);
        if (solution_index < 0 || solution_index >= static_cast<long long>(sols.size()))
            return fail(ESR_EINVAL, "no exact-cover solution with that index");
        *out = new esr_outcome{esr::reduced_outcome(h->res.game, h->res.artifacts,
                                                    sols[static_cast<size_t>(solution_index)])};
        return ESR_OK;
    });
}

int esr_outcome_load(const char* path, const esr_game* game, esr_outcome** out) {
    return wrap([&]() -> int {
        if (!path || !out) return fail(ESR_EINVAL, "null argument");
        std::string text;
        try {
            text = esr::read_file(path);
        } catch (const std::exception& e) {
            return fail(ESR_EIO, e.what());
        }
        std::string fp = game ? esr::game_fingerprint(game->game) : std::string();
        *out = new esr_outcome{esr::outcome_from_json(text, fp)};
        return ESR_OK;
    });
}

void esr_outcome_free(esr_outcome* h) { delete h; }

int esr_outcome_save(const esr_outcome* h, const esr_game* game, const char* path) {
    return wrap([&]() -> int {
        if (!h || !game || !path) return fail(ESR_EINVAL, "null argument");
        esr::write_file(path,
                        esr::outcome_to_json(h->outcome, esr::game_fingerprint(game->game)));
        return ESR_OK;
    });
}

int esr_verify_outcome(const esr_game* g, const esr_outcome* o, char** report_json) {
    return wrap([&]() -> int {
        if (!g || !o) return fail(ESR_EINVAL, "null argument");
        auto rep = esr::validate_outcome(g->game, o->outcome);
        ordered_json j;
        j["ok"] = rep.ok;
        j["violations"] = rep.violations;
        return give(report_json, j.dump());
    });
}

int esr_verify_all_best(const esr_game* g, const esr_outcome* o, double dist_eq,
                        char** report_json) {
    return wrap([&]() -> int {
        if (!g || !o) return fail(ESR_EINVAL, "null argument");
        esr::Tolerance tol;
        if (dist_eq > 0) tol.dist_eq = dist_eq;
        auto rep = esr::verify_all_best(g->game, o->outcome, tol);
        ordered_json j;
        j["ok"] = rep.ok;
        j["offenders"] = ordered_json::array();
        for (const auto& off : rep.offenders)
            j["offenders"].push_back({{"id", off.id},
                                      {"label", g->game.agents[static_cast<size_t>(off.id)].label},
                                      {"cost", off.cost},
                                      {"min_cost", off.min_cost}});
        return give(report_json, j.dump());
    });
}

int esr_margin(const esr_game* g, const esr_outcome* pi, const esr_outcome* pi_prime,
               double dist_eq, char** report_json) {
    return wrap([&]() -> int {
        if (!g || !pi || !pi_prime) return fail(ESR_EINVAL, "null argument");
        esr::Tolerance tol;
        if (dist_eq > 0) tol.dist_eq = dist_eq;
        auto rep = esr::popularity_margin(g->game, pi->outcome, pi_prime->outcome, tol);
        ordered_json j;
        j["margin"] = rep.margin;
        j["improvers_forward"] = rep.improvers_forward;
        j["improvers_backward"] = rep.improvers_backward;
        return give(report_json, j.dump());
    });
}

int esr_popular_check(const esr_game* g, const esr_outcome* o, int strict_mode, int cap_agents,
                      long long budget, uint64_t seed, double dist_eq, char** verdict_json) {
    return wrap([&]() -> int {
        if (!g || !o) return fail(ESR_EINVAL, "null argument");
        esr::Tolerance tol;
        if (dist_eq > 0) tol.dist_eq = dist_eq;
        auto mode = strict_mode ? esr::PopularityMode::strict : esr::PopularityMode::popular;
        ordered_json j;
        if (g->game.agent_count() <= cap_agents) {
            auto verdict = esr::decide_popularity(g->game, o->outcome, mode, cap_agents, tol);
            j["method"] = "exhaustive";
            j["status"] = esr::popularity_status_name(verdict.status);
            j["outcomes_examined"] = verdict.outcomes_examined;
            if (verdict.witness) j["witness"] = rooms_json(*verdict.witness);
        } else {
            auto found = esr::search_improving_outcome(g->game, o->outcome, budget, seed, tol);
            j["method"] = "local_search";
            j["outcomes_examined"] = budget;
            if (found) {
                j["status"] = strict_mode ? "not_strictly_popular" : "not_popular";
                j["witness"] = rooms_json(found->first);
                j["witness_margin"] = found->second.margin;
            } else {
                j["status"] = "inconclusive";
            }
        }
        return give(verdict_json, j.dump());
    });
}

int esr_classify_all_best(const esr_reduction* h, const esr_outcome* o, double dist_eq,
                          char** result_json) {
    return wrap([&]() -> int {
        if (!h || !o) return fail(ESR_EINVAL, "null argument");
        esr::Tolerance tol;
        if (dist_eq > 0) tol.dist_eq = dist_eq;
        auto cls = esr::classify_all_best(h->res.game, h->res.artifacts, o->outcome, tol);
        ordered_json j;
        j["classification"] = cls.is_permanent_popular ? "PP" : "Reduced";
        if (!cls.is_permanent_popular) j["solution"] = cls.solution;
        return give(result_json, j.dump());
    });
}

int esr_decide_strict_exists(const esr_reduction* h, char** result_json) {
    return wrap([&]() -> int {
        if (!h) return fail(ESR_EINVAL, "null reduction");
        auto res = esr::decide_strict_popular_exists(h->res.game, h->res.artifacts);
        ordered_json j;
        j["exists"] = res.exists;
        if (res.exists) {
            j["certificate"] = "exact-cover search exhausted with no solution";
        } else {
            j["solution"] = res.solution;
            j["pi_s"] = rooms_json(*res.pi_s);
        }
        return give(result_json, j.dump());
    });
}

} // extern "C"
