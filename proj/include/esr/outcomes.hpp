#pragma once

#include <optional>

#include "esr/game.hpp"
#include "esr/reduction.hpp"
#include "esr/x3c.hpp"

namespace esr {

/// The two all-best tilings of a chain. Forward rooms {gamma[z-1], alpha[z],
/// beta[z]} consume the `from` endpoint; backward rooms {alpha[z], beta[z],
/// gamma[z]} consume the `to` endpoint.
enum class ChainTiling { forward, backward };

void tile_chain(const Chain& chain, ChainTiling tiling, Outcome& out);

/// The permanent popular outcome: every agent in a minimum-cost room,
/// constructible for every generated game whether or not the X3C instance
/// has a solution.
Outcome permanent_popular(const Game& game, const ReductionArtifacts& artifacts);

/// The reduced outcome for a verified cover solution S.
Outcome reduced_outcome(const Game& game, const ReductionArtifacts& artifacts,
                        const CoverSolution& solution);

struct AllBestReport {
    struct Offender {
        int id;
        double cost;
        double min_cost;
    };
    bool ok = false;
    std::vector<Offender> offenders;
};

AllBestReport verify_all_best(const Game& game, const Outcome& outcome, const Tolerance& tol);

struct Classification {
    bool is_permanent_popular = false;
    CoverSolution solution; // when reduced
};

/// Decides which of the two all-best templates an all-best outcome matches
/// from the center-triple room and the parity of floor(k), then confirms
/// the full room list against the template. Throws if the outcome is not
/// all-best or matches neither template.
Classification classify_all_best(const Game& game, const ReductionArtifacts& artifacts,
                                 const Outcome& outcome, const Tolerance& tol);

struct StrictExistence {
    bool exists = false;              // true iff the instance has no exact cover
    CoverSolution solution;           // witness cover when exists == false
    std::optional<Outcome> pi_s;      // the zero-margin second outcome when exists == false
    bool search_exhausted = false;    // the nonexistence proof object
};

StrictExistence decide_strict_popular_exists(const Game& game,
                                             const ReductionArtifacts& artifacts);

} // namespace esr
