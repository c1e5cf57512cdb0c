#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "esr/reduction.hpp"

#include "json.hpp"

namespace esr {

namespace {

void add_neighbor(std::map<int, std::vector<int>>& adj, int a, int b) {
    adj[a].push_back(b);
}

void add_triangle(std::map<int, std::vector<int>>& adj, const std::array<int, 3>& tri) {
    for (int a : tri)
        for (int b : tri)
            if (a != b) add_neighbor(adj, a, b);
}

} // namespace

std::map<int, std::vector<int>> prescribed_neighbors(const ReductionArtifacts& artifacts) {
    std::map<int, std::vector<int>> adj;
    for (const auto& chain : artifacts.chains) {
        for (int z = 0; z <= chain.n_hat; ++z) {
            int g = chain.gamma_id(z);
            if (z >= 1) {
                add_neighbor(adj, g, chain.alphas[static_cast<size_t>(z) - 1]);
                add_neighbor(adj, g, chain.betas[static_cast<size_t>(z) - 1]);
                add_neighbor(adj, g, chain.gamma_id(z - 1));
            }
            if (z < chain.n_hat) {
                add_neighbor(adj, g, chain.alphas[static_cast<size_t>(z)]);
                add_neighbor(adj, g, chain.betas[static_cast<size_t>(z)]);
                add_neighbor(adj, g, chain.gamma_id(z + 1));
            }
        }
    }
    for (const auto& [j, tri] : artifacts.set_triangle) add_triangle(adj, tri);
    for (const auto& node : artifacts.snowflake.nodes)
        if (!node.is_leaf) add_triangle(adj, node.members);
    add_triangle(adj, artifacts.snowflake.center_ids);
    for (auto& [id, nb] : adj) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    return adj;
}

ReductionReport validate_reduction(const Game& game, const ReductionArtifacts& artifacts,
                                   const Tolerance& tol) {
    tol.check();
    ReductionReport rep;
    double eps = artifacts.epsilon;

    // (1) the chain distance constraints, exact by construction, re-measured
    for (const auto& chain : artifacts.chains) {
        for (int z = 1; z <= chain.n_hat; ++z) {
            const Vec3& a = game.pos(chain.alphas[static_cast<size_t>(z) - 1]);
            const Vec3& b = game.pos(chain.betas[static_cast<size_t>(z) - 1]);
            const Vec3& g0 = game.pos(chain.gamma_id(z - 1));
            const Vec3& g1 = game.pos(chain.gamma_id(z));
            double errs[5] = {std::abs(distance(a, b) - eps), std::abs(distance(a, g1) - 1.0),
                              std::abs(distance(b, g1) - 1.0), std::abs(distance(a, g0) - 1.0),
                              std::abs(distance(b, g0) - 1.0)};
            double worst = *std::max_element(errs, errs + 5);
            rep.max_triple_error = std::max(rep.max_triple_error, worst);
            ++rep.triples_checked;
            if (worst > tol.dist_eq) {
                ++rep.triple_violations;
                if (rep.notes.size() < 10)
                    rep.notes.push_back("triple " + std::to_string(z) + " of " + chain.edge_id +
                                        " misses the chain distances by " + std::to_string(worst));
            }
        }
    }

    // (2) construction edge lengths before gadget insets
    double min_edge = 1e300;
    std::string min_edge_name = "none";
    auto consider = [&](double len, const std::string& name) {
        if (len < min_edge) {
            min_edge = len;
            min_edge_name = name;
        }
    };
    for (size_t ei = 0; ei < artifacts.drawing.edges.size(); ++ei)
        for (auto [a, b] : edge_segments(artifacts.drawing, artifacts.drawing.edges[ei])) {
            double len = artifacts.drawing.unit * (std::abs(a.x - b.x) + std::abs(a.y - b.y));
            consider(len, "drawing segment of edge " + std::to_string(ei));
        }
    for (const auto& node : artifacts.snowflake.nodes)
        if (!node.is_leaf)
            for (int child : node.children)
                consider(distance(node.pos,
                                  artifacts.snowflake.nodes[static_cast<size_t>(child)].pos),
                         "snowflake edge");
    for (const auto& path : artifacts.ascending) {
        double h = 10.0 * path.element;
        consider(h, "ascending riser of element " + std::to_string(path.element));
        consider(artifacts.z_top - h, "ascending top riser of element " + std::to_string(path.element));
        Vec3 up = game.pos(path.u_prime_id);
        Vec3 lp = game.pos(path.l_prime_id);
        consider(distance(up, lp), "ascending crossover of element " + std::to_string(path.element));
    }
    rep.min_construction_edge = min_edge;
    rep.edges_ok = min_edge >= 10.0 - 1e-9;
    if (!rep.edges_ok)
        rep.notes.push_back("construction edge below 10: " + min_edge_name + " = " +
                            std::to_string(min_edge));

    // (3)-(5) per-agent cost structure
    NeighborIndex index(game);
    auto adj = prescribed_neighbors(artifacts);

    // prescribed best pairs of alpha/beta agents
    std::map<int, std::vector<std::array<int, 2>>> ab_pairs;
    for (const auto& chain : artifacts.chains)
        for (int z = 1; z <= chain.n_hat; ++z) {
            int a = chain.alphas[static_cast<size_t>(z) - 1];
            int b = chain.betas[static_cast<size_t>(z) - 1];
            int g0 = chain.gamma_id(z - 1);
            int g1 = chain.gamma_id(z);
            for (auto [self, mate] : {std::pair{a, b}, std::pair{b, a}}) {
                auto mk = [&](int x, int y) {
                    return std::array<int, 2>{std::min(x, y), std::max(x, y)};
                };
                ab_pairs[self] = {mk(mate, g0), mk(mate, g1)};
                std::sort(ab_pairs[self].begin(), ab_pairs[self].end());
            }
        }

    double gap = 1e300;
    std::string gap_agent = "none";
    for (const auto& agent : game.agents) {
        bool is_pair_agent = agent.kind == AgentKind::alpha || agent.kind == AgentKind::beta;
        double mc = min_room_cost(game, agent.id, &index);
        double target = is_pair_agent ? 1.0 + eps : 2.0;
        if (std::abs(mc - target) > tol.dist_eq) {
            ++rep.min_cost_violations;
            if (rep.notes.size() < 20)
                rep.notes.push_back("min room cost of " + agent.label + " is " +
                                    std::to_string(mc) + ", expected " + std::to_string(target));
        }

        auto geometric = most_preferred_rooms(game, agent.id, tol, &index);
        std::vector<std::array<int, 2>> predicted;
        if (is_pair_agent) {
            predicted = ab_pairs[agent.id];
        } else {
            const auto& nb = adj[agent.id];
            for (size_t i = 0; i < nb.size(); ++i)
                for (size_t j = i + 1; j < nb.size(); ++j)
                    predicted.push_back({nb[i], nb[j]});
            std::sort(predicted.begin(), predicted.end());
        }
        if (geometric != predicted) {
            ++rep.preferred_mismatches;
            if (rep.notes.size() < 20)
                rep.notes.push_back("most-preferred rooms of " + agent.label +
                                    " differ from the prescription (" +
                                    std::to_string(geometric.size()) + " vs " +
                                    std::to_string(predicted.size()) + " pairs)");
        }

        // next-best non-prescribed pair; pairs beyond radius 3 cannot come
        // within 0.01 of any minimum cost in this construction
        auto near = index.within(agent.id, 3.0);
        std::set<std::array<int, 2>> skip(predicted.begin(), predicted.end());
        double next_best = 1e300;
        for (size_t i = 0; i < near.size(); ++i)
            for (size_t j = i + 1; j < near.size(); ++j) {
                std::array<int, 2> pr{std::min(near[i], near[j]), std::max(near[i], near[j])};
                if (skip.count(pr)) continue;
                double sum = distance(agent.pos, game.pos(near[i])) +
                             distance(agent.pos, game.pos(near[j]));
                next_best = std::min(next_best, sum);
            }
        if (next_best < 1e299 && next_best - mc < gap) {
            gap = next_best - mc;
            gap_agent = agent.label;
        }
    }
    rep.gap = gap;
    rep.gap_ok = gap > 0.01;
    if (!rep.gap_ok && rep.notes.size() < 24)
        rep.notes.push_back("best-vs-next gap " + std::to_string(gap) + " at agent " + gap_agent);

    rep.ok = rep.triple_violations == 0 && rep.edges_ok && rep.min_cost_violations == 0 &&
             rep.preferred_mismatches == 0 && rep.gap_ok;
    return rep;
}

namespace {

const char* layer_name(Layer l) {
    switch (l) {
        case Layer::bottom: return "bottom";
        case Layer::top: return "top";
        case Layer::ascending: return "ascending";
    }
    return "bottom";
}

Layer layer_from_name(const std::string& s) {
    if (s == "bottom") return Layer::bottom;
    if (s == "top") return Layer::top;
    if (s == "ascending") return Layer::ascending;
    throw std::invalid_argument("unknown layer: " + s);
}

const char* role_name(ChainRole r) {
    switch (r) {
        case ChainRole::bottom_u_out: return "bottom_u_out";
        case ChainRole::bottom_to_set: return "bottom_to_set";
        case ChainRole::asc_up: return "asc_up";
        case ChainRole::asc_across: return "asc_across";
        case ChainRole::asc_down_leaf: return "asc_down_leaf";
        case ChainRole::top_edge: return "top_edge";
    }
    return "bottom_u_out";
}

ChainRole role_from_name(const std::string& s) {
    if (s == "bottom_u_out") return ChainRole::bottom_u_out;
    if (s == "bottom_to_set") return ChainRole::bottom_to_set;
    if (s == "asc_up") return ChainRole::asc_up;
    if (s == "asc_across") return ChainRole::asc_across;
    if (s == "asc_down_leaf") return ChainRole::asc_down_leaf;
    if (s == "top_edge") return ChainRole::top_edge;
    throw std::invalid_argument("unknown chain role: " + s);
}

} // namespace

std::string artifacts_to_json(const Game& game, const ReductionArtifacts& a) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["format_version"] = 1;
    j["epsilon"] = a.epsilon;
    j["floor_k"] = a.floor_k;
    j["z_top"] = a.z_top;

    ordered_json jgame;
    jgame["room_size"] = game.room_size;
    jgame["epsilon"] = game.epsilon;
    jgame["agents"] = ordered_json::array();
    for (const auto& ag : game.agents)
        jgame["agents"].push_back({{"id", ag.id},
                                   {"label", ag.label},
                                   {"kind", agent_kind_name(ag.kind)},
                                   {"pos", {ag.pos.x, ag.pos.y, ag.pos.z}}});
    j["game"] = jgame;

    j["instance"] = {{"universe_size", a.instance.universe_size}, {"sets", a.instance.sets}};

    ordered_json jd;
    jd["unit"] = a.drawing.unit;
    jd["vertices"] = ordered_json::array();
    for (size_t v = 0; v < a.drawing.coords.size(); ++v)
        jd["vertices"].push_back(
            {{"id", v}, {"x", a.drawing.coords[v].x}, {"y", a.drawing.coords[v].y}});
    jd["edges"] = ordered_json::array();
    for (const auto& e : a.drawing.edges) {
        ordered_json je;
        je["endpoints"] = {e.a, e.b};
        if (e.bend)
            je["bend"] = {{"x", e.bend->x}, {"y", e.bend->y}};
        else
            je["bend"] = nullptr;
        jd["edges"].push_back(je);
    }
    j["drawing"] = jd;

    j["element_agent"] = ordered_json::array();
    for (const auto& [i, id] : a.element_agent) j["element_agent"].push_back({i, id});
    j["bend_agent"] = ordered_json::array();
    for (const auto& [key, id] : a.bend_agent)
        j["bend_agent"].push_back({key.first, key.second, id});
    j["set_triangle"] = ordered_json::array();
    for (const auto& [jset, tri] : a.set_triangle) j["set_triangle"].push_back({jset, tri});

    ordered_json js;
    js["floor_k"] = a.snowflake.floor_k;
    js["replacements"] = a.snowflake.replacements;
    js["center_ids"] = a.snowflake.center_ids;
    js["leaves"] = a.snowflake.leaves;
    js["nodes"] = ordered_json::array();
    for (const auto& node : a.snowflake.nodes)
        js["nodes"].push_back({{"tree", node.tree},
                               {"depth", node.depth},
                               {"index", node.index},
                               {"parent", node.parent},
                               {"children", node.children},
                               {"is_leaf", node.is_leaf},
                               {"members", node.members},
                               {"pos", {node.pos.x, node.pos.y, node.pos.z}},
                               {"leaf_rank", node.leaf_rank}});
    j["snowflake"] = js;

    j["ascending"] = ordered_json::array();
    for (const auto& p : a.ascending)
        j["ascending"].push_back({{"element", p.element},
                                  {"u_prime_id", p.u_prime_id},
                                  {"l_prime_id", p.l_prime_id},
                                  {"leaf_agent_id", p.leaf_agent_id},
                                  {"chain_idx", p.chain_idx}});

    j["chains"] = ordered_json::array();
    for (const auto& c : a.chains)
        j["chains"].push_back({{"edge_id", c.edge_id},
                               {"layer", layer_name(c.layer)},
                               {"role", role_name(c.role)},
                               {"from_id", c.from_id},
                               {"to_id", c.to_id},
                               {"n_hat", c.n_hat},
                               {"alphas", c.alphas},
                               {"betas", c.betas},
                               {"gammas", c.gammas},
                               {"set_index", c.set_index},
                               {"element", c.element},
                               {"parent_node", c.parent_node},
                               {"child_node", c.child_node}});

    j["counts"] = {{"bottom", a.counts.bottom},
                   {"top", a.counts.top},
                   {"ascending", a.counts.ascending}};
    return j.dump() + "\n";
}

ReductionResult artifacts_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    if (j.at("format_version").get<int>() != 1)
        throw std::invalid_argument("unsupported artifacts file format version");
    ReductionResult res;
    res.artifacts.epsilon = j.at("epsilon").get<double>();
    res.artifacts.floor_k = j.at("floor_k").get<int>();
    res.artifacts.z_top = j.at("z_top").get<double>();

    const auto& jgame = j.at("game");
    res.game.room_size = jgame.at("room_size").get<int>();
    res.game.epsilon = jgame.at("epsilon").get<double>();
    for (const auto& ja : jgame.at("agents")) {
        Agent ag;
        ag.id = ja.at("id").get<int>();
        ag.label = ja.at("label").get<std::string>();
        ag.kind = agent_kind_from_name(ja.at("kind").get<std::string>());
        ag.pos = {ja.at("pos").at(0).get<double>(), ja.at("pos").at(1).get<double>(),
                  ja.at("pos").at(2).get<double>()};
        res.game.agents.push_back(std::move(ag));
    }
    res.game.check();

    res.artifacts.instance.universe_size = j.at("instance").at("universe_size").get<int>();
    for (const auto& s : j.at("instance").at("sets"))
        res.artifacts.instance.sets.push_back({s.at(0).get<int>(), s.at(1).get<int>(), s.at(2).get<int>()});

    const auto& jd = j.at("drawing");
    res.artifacts.drawing.unit = jd.at("unit").get<double>();
    res.artifacts.drawing.coords.resize(jd.at("vertices").size());
    for (const auto& v : jd.at("vertices"))
        res.artifacts.drawing.coords[v.at("id").get<size_t>()] = {v.at("x").get<int>(),
                                                                  v.at("y").get<int>()};
    for (const auto& e : jd.at("edges")) {
        DrawnEdge de;
        de.a = e.at("endpoints").at(0).get<int>();
        de.b = e.at("endpoints").at(1).get<int>();
        if (!e.at("bend").is_null())
            de.bend = GridPoint{e.at("bend").at("x").get<int>(), e.at("bend").at("y").get<int>()};
        res.artifacts.drawing.edges.push_back(de);
    }

    for (const auto& p : j.at("element_agent"))
        res.artifacts.element_agent[p.at(0).get<int>()] = p.at(1).get<int>();
    for (const auto& p : j.at("bend_agent"))
        res.artifacts.bend_agent[{p.at(0).get<int>(), p.at(1).get<int>()}] = p.at(2).get<int>();
    for (const auto& p : j.at("set_triangle"))
        res.artifacts.set_triangle[p.at(0).get<int>()] = {p.at(1).at(0).get<int>(),
                                                          p.at(1).at(1).get<int>(),
                                                          p.at(1).at(2).get<int>()};

    const auto& js = j.at("snowflake");
    res.artifacts.snowflake.floor_k = js.at("floor_k").get<int>();
    res.artifacts.snowflake.replacements = js.at("replacements").get<int>();
    for (size_t t = 0; t < 3; ++t)
        res.artifacts.snowflake.center_ids[t] = js.at("center_ids").at(t).get<int>();
    for (const auto& l : js.at("leaves")) res.artifacts.snowflake.leaves.push_back(l.get<int>());
    for (const auto& jn : js.at("nodes")) {
        SnowNode node;
        node.tree = jn.at("tree").get<int>();
        node.depth = jn.at("depth").get<int>();
        node.index = jn.at("index").get<int>();
        node.parent = jn.at("parent").get<int>();
        node.children = {jn.at("children").at(0).get<int>(), jn.at("children").at(1).get<int>()};
        node.is_leaf = jn.at("is_leaf").get<bool>();
        node.members = {jn.at("members").at(0).get<int>(), jn.at("members").at(1).get<int>(),
                        jn.at("members").at(2).get<int>()};
        node.pos = {jn.at("pos").at(0).get<double>(), jn.at("pos").at(1).get<double>(),
                    jn.at("pos").at(2).get<double>()};
        node.leaf_rank = jn.at("leaf_rank").get<int>();
        res.artifacts.snowflake.nodes.push_back(std::move(node));
    }

    for (const auto& jp : j.at("ascending")) {
        AscendingPath p;
        p.element = jp.at("element").get<int>();
        p.u_prime_id = jp.at("u_prime_id").get<int>();
        p.l_prime_id = jp.at("l_prime_id").get<int>();
        p.leaf_agent_id = jp.at("leaf_agent_id").get<int>();
        p.chain_idx = {jp.at("chain_idx").at(0).get<int>(), jp.at("chain_idx").at(1).get<int>(),
                       jp.at("chain_idx").at(2).get<int>()};
        res.artifacts.ascending.push_back(p);
    }

    for (const auto& jc : j.at("chains")) {
        Chain c;
        c.edge_id = jc.at("edge_id").get<std::string>();
        c.layer = layer_from_name(jc.at("layer").get<std::string>());
        c.role = role_from_name(jc.at("role").get<std::string>());
        c.from_id = jc.at("from_id").get<int>();
        c.to_id = jc.at("to_id").get<int>();
        c.n_hat = jc.at("n_hat").get<int>();
        c.alphas = jc.at("alphas").get<std::vector<int>>();
        c.betas = jc.at("betas").get<std::vector<int>>();
        c.gammas = jc.at("gammas").get<std::vector<int>>();
        c.set_index = jc.at("set_index").get<int>();
        c.element = jc.at("element").get<int>();
        c.parent_node = jc.at("parent_node").get<int>();
        c.child_node = jc.at("child_node").get<int>();
        res.artifacts.chains.push_back(std::move(c));
    }

    res.artifacts.counts.bottom = j.at("counts").at("bottom").get<long long>();
    res.artifacts.counts.top = j.at("counts").at("top").get<long long>();
    res.artifacts.counts.ascending = j.at("counts").at("ascending").get<long long>();
    return res;
}

} // namespace esr
