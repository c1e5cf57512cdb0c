#include "esr/popularity.hpp"

#include <algorithm>
#include <random>

namespace esr {

const char* popularity_status_name(PopularityStatus s) {
    switch (s) {
        case PopularityStatus::popular: return "popular";
        case PopularityStatus::strictly_popular: return "strictly_popular";
        case PopularityStatus::not_popular: return "not_popular";
        case PopularityStatus::not_strictly_popular: return "not_strictly_popular";
        case PopularityStatus::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

MarginReport popularity_margin(const Game& game, const Outcome& pi, const Outcome& pi_prime,
                               const Tolerance& tol) {
    auto where_pi = room_of_agent(game, pi);
    auto where_pp = room_of_agent(game, pi_prime);
    MarginReport rep;
    for (const auto& a : game.agents) {
        const Room& r = pi.rooms[static_cast<size_t>(where_pi[static_cast<size_t>(a.id)])];
        const Room& t = pi_prime.rooms[static_cast<size_t>(where_pp[static_cast<size_t>(a.id)])];
        switch (compare_rooms(game, a.id, r, t, tol)) {
            case RoomOrder::prefers_first: rep.improvers_forward.push_back(a.id); break;
            case RoomOrder::prefers_second: rep.improvers_backward.push_back(a.id); break;
            case RoomOrder::indifferent: break;
        }
    }
    rep.margin = static_cast<long long>(rep.improvers_forward.size()) -
                 static_cast<long long>(rep.improvers_backward.size());
    return rep;
}

long long count_outcomes(int n_agents, int room_size) {
    if (n_agents % room_size != 0) throw std::invalid_argument("agent count not divisible by room size");
    // product over rooms of C(remaining-1, s-1)
    long long total = 1;
    for (int remaining = n_agents; remaining > 0; remaining -= room_size) {
        long long ways = 1;
        // C(remaining-1, room_size-1)
        for (int i = 1; i < room_size; ++i) {
            ways = ways * (remaining - i);
            ways /= i;
        }
        if (total > (1ll << 62) / std::max<long long>(ways, 1))
            throw std::overflow_error("outcome count overflows");
        total *= ways;
    }
    return total;
}

namespace {

struct Enumerator {
    int n;
    int s;
    std::vector<bool> used;
    Outcome current;
    const std::function<bool(const Outcome&)>* visit;
    bool stopped = false;

    void run() {
        used.assign(static_cast<size_t>(n), false);
        recurse(0);
    }

    void recurse(int placed) {
        if (stopped) return;
        if (placed == n) {
            if (!(*visit)(current)) stopped = true;
            return;
        }
        int anchor = 0;
        while (used[static_cast<size_t>(anchor)]) ++anchor;
        used[static_cast<size_t>(anchor)] = true;
        Room room{anchor};
        pick_partners(anchor + 1, room, placed + 1);
        used[static_cast<size_t>(anchor)] = false;
    }

    void pick_partners(int from, Room& room, int placed) {
        if (stopped) return;
        if (static_cast<int>(room.size()) == s) {
            current.rooms.push_back(room);
            recurse(placed);
            current.rooms.pop_back();
            return;
        }
        int needed = s - static_cast<int>(room.size());
        for (int cand = from; cand <= n - needed; ++cand) {
            if (used[static_cast<size_t>(cand)]) continue;
            used[static_cast<size_t>(cand)] = true;
            room.push_back(cand);
            pick_partners(cand + 1, room, placed + 1);
            room.pop_back();
            used[static_cast<size_t>(cand)] = false;
            if (stopped) return;
        }
    }
};

} // namespace

void enumerate_outcomes(const Game& game, int cap_agents,
                        const std::function<bool(const Outcome&)>& visit) {
    if (game.agent_count() > cap_agents)
        throw EnumerationCapExceeded(count_outcomes(game.agent_count(), game.room_size));
    Enumerator e;
    e.n = game.agent_count();
    e.s = game.room_size;
    e.visit = &visit;
    e.run();
}

PopularityVerdict decide_popularity(const Game& game, const Outcome& pi, PopularityMode mode,
                                    int cap_agents, const Tolerance& tol) {
    PopularityVerdict verdict;
    Outcome pi_canon = pi;
    pi_canon.canonicalize();
    if (game.agent_count() > cap_agents) {
        verdict.status = PopularityStatus::inconclusive;
        verdict.outcomes_examined = 0;
        return verdict;
    }
    bool failed = false;
    long long examined = 0;
    Outcome bad;
    enumerate_outcomes(game, cap_agents, [&](const Outcome& other) {
        ++examined;
        Outcome other_canon = other;
        other_canon.canonicalize();
        bool same = other_canon == pi_canon;
        if (same && mode == PopularityMode::strict) return true;
        auto rep = popularity_margin(game, pi, other, tol);
        bool ok = (mode == PopularityMode::popular) ? rep.margin >= 0 : rep.margin > 0;
        if (!ok) {
            failed = true;
            bad = other_canon;
            return false;
        }
        return true;
    });
    verdict.outcomes_examined = examined;
    if (failed) {
        verdict.status = mode == PopularityMode::popular ? PopularityStatus::not_popular
                                                         : PopularityStatus::not_strictly_popular;
        verdict.witness = bad;
    } else {
        verdict.status = mode == PopularityMode::popular ? PopularityStatus::popular
                                                         : PopularityStatus::strictly_popular;
    }
    return verdict;
}

std::optional<std::pair<Outcome, MarginReport>> search_improving_outcome(
    const Game& game, const Outcome& pi, long long budget, uint64_t seed,
    const Tolerance& tol) {
    auto base_where = room_of_agent(game, pi);
    (void)base_where;
    std::mt19937_64 rng(seed);
    Outcome cur = pi;
    cur.canonicalize();
    auto cur_rep = popularity_margin(game, cur, pi, tol);
    int n_rooms = static_cast<int>(cur.rooms.size());
    if (n_rooms < 2) return std::nullopt;

    for (long long step = 0; step < budget; ++step) {
        Outcome cand = cur;
        bool rotate = n_rooms >= 3 && (rng() & 1u);
        if (rotate) {
            int r1 = static_cast<int>(rng() % n_rooms);
            int r2 = static_cast<int>(rng() % n_rooms);
            int r3 = static_cast<int>(rng() % n_rooms);
            if (r1 == r2 || r2 == r3 || r1 == r3) continue;
            auto& a = cand.rooms[static_cast<size_t>(r1)];
            auto& b = cand.rooms[static_cast<size_t>(r2)];
            auto& c = cand.rooms[static_cast<size_t>(r3)];
            size_t ia = rng() % a.size(), ib = rng() % b.size(), ic = rng() % c.size();
            int tmp = a[ia];
            a[ia] = b[ib];
            b[ib] = c[ic];
            c[ic] = tmp;
        } else {
            int r1 = static_cast<int>(rng() % n_rooms);
            int r2 = static_cast<int>(rng() % n_rooms);
            if (r1 == r2) continue;
            auto& a = cand.rooms[static_cast<size_t>(r1)];
            auto& b = cand.rooms[static_cast<size_t>(r2)];
            size_t ia = rng() % a.size(), ib = rng() % b.size();
            std::swap(a[ia], b[ib]);
        }
        auto rep = popularity_margin(game, cand, pi, tol);
        if (rep.margin > cur_rep.margin) {
            cur = cand;
            cur_rep = rep;
            if (cur_rep.margin > 0) {
                cur.canonicalize();
                return std::make_pair(cur, cur_rep);
            }
        }
    }
    return std::nullopt;
}

} // namespace esr
