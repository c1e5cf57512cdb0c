#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "esr/game.hpp"

namespace esr {

struct MarginReport {
    std::vector<int> improvers_forward;  // N(pi, pi')
    std::vector<int> improvers_backward; // N(pi', pi)
    long long margin = 0;                // phi(pi, pi')
};

enum class PopularityStatus {
    popular,
    strictly_popular,
    not_popular,
    not_strictly_popular,
    inconclusive,
};

const char* popularity_status_name(PopularityStatus s);

struct PopularityVerdict {
    PopularityStatus status = PopularityStatus::inconclusive;
    std::optional<Outcome> witness;
    long long outcomes_examined = 0;
};

enum class PopularityMode { popular, strict };

MarginReport popularity_margin(const Game& game, const Outcome& pi, const Outcome& pi_prime,
                               const Tolerance& tol);

/// Number of partitions of n agents into rooms of size s:
/// n! / ((s!)^(n/s) * (n/s)!). Throws std::overflow_error past 2^63.
long long count_outcomes(int n_agents, int room_size);

struct EnumerationCapExceeded : std::runtime_error {
    long long required;
    explicit EnumerationCapExceeded(long long req)
        : std::runtime_error("enumeration cap exceeded; would need " + std::to_string(req) +
                             " outcomes"),
          required(req) {}
};

/// Streams every outcome exactly once in canonical order (the smallest
/// unplaced agent anchors each room, partners chosen in ascending order).
/// The callback returns false to stop early. Refuses (throws
/// EnumerationCapExceeded) when the game has more than cap_agents agents.
void enumerate_outcomes(const Game& game, int cap_agents,
                        const std::function<bool(const Outcome&)>& visit);

PopularityVerdict decide_popularity(const Game& game, const Outcome& pi, PopularityMode mode,
                                    int cap_agents, const Tolerance& tol);

/// Seeded local search for an outcome strictly more popular than pi.
/// Neighborhood: 2-agent swaps and 3-agent rotations between rooms,
/// hill-climbing on the margin against pi. Absence of a witness is
/// evidence, not proof.
std::optional<std::pair<Outcome, MarginReport>> search_improving_outcome(
    const Game& game, const Outcome& pi, long long budget, uint64_t seed,
    const Tolerance& tol);

} // namespace esr
