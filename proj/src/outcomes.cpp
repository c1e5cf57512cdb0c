#include "esr/outcomes.hpp"

#include <algorithm>
#include <set>

namespace esr {

void tile_chain(const Chain& chain, ChainTiling tiling, Outcome& out) {
    for (int z = 1; z <= chain.n_hat; ++z) {
        int a = chain.alphas[static_cast<size_t>(z) - 1];
        int b = chain.betas[static_cast<size_t>(z) - 1];
        int g = tiling == ChainTiling::forward ? chain.gamma_id(z - 1) : chain.gamma_id(z);
        out.rooms.push_back({a, b, g});
    }
}

namespace {

void check_partition_hard(const Game& game, const Outcome& outcome, const char* what) {
    auto rep = validate_outcome(game, outcome);
    if (!rep.ok)
        throw std::logic_error(std::string(what) + " produced an invalid partition: " +
                               rep.violations.front());
}

void add_top_layer(const ReductionArtifacts& art, bool consume_root_parity, bool center_room,
                   Outcome& out) {
    // chains consume their endpoint at depth of parity floor_k%2 when
    // consume_root_parity, the opposite one otherwise; gadget triples at
    // the non-consumed parity become rooms
    int root_parity = art.floor_k % 2;
    for (const auto& chain : art.chains) {
        if (chain.layer != Layer::top) continue;
        int parent_depth = art.snowflake.nodes[static_cast<size_t>(chain.parent_node)].depth;
        bool parent_consumed = consume_root_parity ? (parent_depth % 2 == root_parity)
                                                   : (parent_depth % 2 != root_parity);
        tile_chain(chain, parent_consumed ? ChainTiling::forward : ChainTiling::backward, out);
    }
    for (const auto& node : art.snowflake.nodes) {
        if (node.is_leaf) continue;
        bool consumed_by_chains = consume_root_parity ? (node.depth % 2 == root_parity)
                                                      : (node.depth % 2 != root_parity);
        if (!consumed_by_chains)
            out.rooms.push_back({node.members[0], node.members[1], node.members[2]});
    }
    if (center_room)
        out.rooms.push_back({art.snowflake.center_ids[0], art.snowflake.center_ids[1],
                             art.snowflake.center_ids[2]});
}

} // namespace

Outcome permanent_popular(const Game& game, const ReductionArtifacts& art) {
    Outcome out;
    for (const auto& chain : art.chains) {
        if (chain.layer == Layer::bottom) tile_chain(chain, ChainTiling::backward, out);
        if (chain.layer == Layer::ascending) tile_chain(chain, ChainTiling::forward, out);
    }
    // top layer: chains consume the root-parity depths; the root triples
    // survive as rooms exactly when floor_k is odd, the centers room
    // together exactly when floor_k is even
    bool center_room = art.floor_k % 2 == 0;
    add_top_layer(art, true, center_room, out);
    check_partition_hard(game, out, "permanent popular outcome");
    out.canonicalize();
    return out;
}

Outcome reduced_outcome(const Game& game, const ReductionArtifacts& art,
                        const CoverSolution& solution) {
    if (!is_cover_solution(art.instance, solution))
        throw std::invalid_argument("reduced_outcome: not a solution of the instance");
    std::set<int> selected(solution.begin(), solution.end());
    Outcome out;
    for (const auto& [j, tri] : art.set_triangle)
        if (selected.count(j)) out.rooms.push_back({tri[0], tri[1], tri[2]});
    for (const auto& chain : art.chains) {
        if (chain.layer == Layer::bottom)
            tile_chain(chain,
                       selected.count(chain.set_index) ? ChainTiling::forward
                                                       : ChainTiling::backward,
                       out);
        if (chain.layer == Layer::ascending) tile_chain(chain, ChainTiling::backward, out);
    }
    bool center_room = art.floor_k % 2 == 1;
    add_top_layer(art, false, center_room, out);
    check_partition_hard(game, out, "reduced outcome");
    out.canonicalize();
    return out;
}

AllBestReport verify_all_best(const Game& game, const Outcome& outcome, const Tolerance& tol) {
    AllBestReport rep;
    auto where = room_of_agent(game, outcome);
    NeighborIndex index(game);
    for (const auto& agent : game.agents) {
        const Room& room = outcome.rooms[static_cast<size_t>(where[static_cast<size_t>(agent.id)])];
        double cost = room_cost(game, agent.id, room);
        double mc = min_room_cost(game, agent.id, &index);
        if (cost > mc + tol.dist_eq) rep.offenders.push_back({agent.id, cost, mc});
    }
    rep.ok = rep.offenders.empty();
    return rep;
}

Classification classify_all_best(const Game& game, const ReductionArtifacts& art,
                                 const Outcome& outcome, const Tolerance& tol) {
    auto ab = verify_all_best(game, outcome, tol);
    if (!ab.ok) throw std::invalid_argument("classify_all_best: outcome is not all-best");
    Outcome canon = outcome;
    canon.canonicalize();
    std::set<Room> rooms(canon.rooms.begin(), canon.rooms.end());

    Room center{art.snowflake.center_ids[0], art.snowflake.center_ids[1],
                art.snowflake.center_ids[2]};
    std::sort(center.begin(), center.end());
    bool center_present = rooms.count(center) > 0;
    bool is_pp = (art.floor_k % 2 == 0) == center_present;

    Classification cls;
    cls.is_permanent_popular = is_pp;
    if (is_pp) {
        Outcome tpl = permanent_popular(game, art);
        if (!(tpl == canon))
            throw std::logic_error("all-best outcome does not match the permanent popular "
                                   "template; the all-best dichotomy does not allow this");
        return cls;
    }
    for (const auto& [j, tri] : art.set_triangle) {
        Room r{tri[0], tri[1], tri[2]};
        std::sort(r.begin(), r.end());
        if (rooms.count(r)) cls.solution.push_back(j);
    }
    std::sort(cls.solution.begin(), cls.solution.end());
    if (!is_cover_solution(art.instance, cls.solution))
        throw std::logic_error("all-best outcome selects set triangles that do not cover the "
                               "universe; the all-best dichotomy does not allow this");
    Outcome tpl = reduced_outcome(game, art, cls.solution);
    if (!(tpl == canon))
        throw std::logic_error("all-best outcome does not match the reduced template; this "
                               "the all-best dichotomy does not allow this");
    return cls;
}

StrictExistence decide_strict_popular_exists(const Game& game,
                                             const ReductionArtifacts& art) {
    StrictExistence res;
    auto sols = solve_exact_cover(art.instance, 1);
    if (sols.empty()) {
        res.exists = true;
        res.search_exhausted = true;
        return res;
    }
    res.exists = false;
    res.solution = sols.front();
    res.pi_s = reduced_outcome(game, art, res.solution);
    return res;
}

} // namespace esr
