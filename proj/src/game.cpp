#include "esr/game.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace esr {

namespace {

const std::pair<AgentKind, const char*> kKindNames[] = {
    {AgentKind::element, "element"}, {AgentKind::set_agent, "set"},
    {AgentKind::bend, "bend"},       {AgentKind::alpha, "alpha"},
    {AgentKind::beta, "beta"},       {AgentKind::gamma, "gamma"},
    {AgentKind::aux_u, "aux_u"},     {AgentKind::aux_l, "aux_l"},
    {AgentKind::leaf, "leaf"},       {AgentKind::tree, "tree"},
    {AgentKind::center, "center"},   {AgentKind::plain, "plain"},
};

} // namespace

const char* agent_kind_name(AgentKind k) {
    for (const auto& [kind, name] : kKindNames)
        if (kind == k) return name;
    throw std::logic_error("unknown agent kind");
}

AgentKind agent_kind_from_name(const std::string& name) {
    for (const auto& [kind, kname] : kKindNames)
        if (name == kname) return kind;
    throw std::invalid_argument("unknown agent kind: " + name);
}

void Outcome::canonicalize() {
    for (auto& r : rooms) std::sort(r.begin(), r.end());
    std::sort(rooms.begin(), rooms.end());
}

void Game::check() const {
    if (room_size < 1) throw std::invalid_argument("room_size must be positive");
    if (agents.empty() || agents.size() % static_cast<size_t>(room_size) != 0)
        throw std::invalid_argument("agent count must be a positive multiple of room_size");
    if (epsilon != 0.0 && !(epsilon > 0.0 && epsilon < 0.001))
        throw std::invalid_argument("epsilon must be 0 or in (0, 0.001)");
    std::set<std::string> labels;
    for (size_t i = 0; i < agents.size(); ++i) {
        if (agents[i].id != static_cast<int>(i))
            throw std::invalid_argument("agent ids must be contiguous 0..n-1 in order");
        if (!agents[i].pos.finite())
            throw std::invalid_argument("agent position must be finite: " + agents[i].label);
        if (!labels.insert(agents[i].label).second)
            throw std::invalid_argument("duplicate agent label: " + agents[i].label);
    }
}

size_t NeighborIndex::CellHash::operator()(const std::array<long, 3>& c) const {
    size_t h = 1469598103934665603ull;
    for (long v : c) {
        h ^= static_cast<size_t>(v) + 0x9e3779b97f4a7c15ull;
        h *= 1099511628211ull;
    }
    return h;
}

NeighborIndex::NeighborIndex(const Game& game, double cell) : game_(game), cell_(cell) {
    size_t n = std::max<size_t>(16, game.agents.size() * 2);
    size_t cap = 1;
    while (cap < n) cap <<= 1;
    mask_ = cap - 1;
    buckets_.resize(cap);
    for (auto& b : buckets_) b.second.clear();
    std::vector<bool> used(cap, false);
    for (const auto& a : game.agents) {
        auto k = key(a.pos);
        size_t idx = bucket_index(k);
        // open addressing: walk until we find this key or an empty slot
        while (true) {
            if (buckets_[idx].second.empty() && !used[idx]) {
                buckets_[idx].first = k;
                used[idx] = true;
                break;
            }
            if (used[idx] && buckets_[idx].first == k) break;
            idx = (idx + 1) & mask_;
        }
        buckets_[idx].second.push_back(a.id);
    }
}

std::array<long, 3> NeighborIndex::key(const Vec3& p) const {
    return {static_cast<long>(std::floor(p.x / cell_)),
            static_cast<long>(std::floor(p.y / cell_)),
            static_cast<long>(std::floor(p.z / cell_))};
}

size_t NeighborIndex::bucket_index(const std::array<long, 3>& c) const {
    return CellHash{}(c)&mask_;
}

std::vector<int> NeighborIndex::within(int id, double r) const {
    const Vec3& p = game_.pos(id);
    long reach = static_cast<long>(std::ceil(r / cell_));
    auto c0 = key(p);
    std::vector<int> out;
    for (long dx = -reach; dx <= reach; ++dx)
        for (long dy = -reach; dy <= reach; ++dy)
            for (long dz = -reach; dz <= reach; ++dz) {
                std::array<long, 3> c{c0[0] + dx, c0[1] + dy, c0[2] + dz};
                size_t idx = bucket_index(c);
                for (size_t probe = 0; probe <= mask_; ++probe) {
                    const auto& b = buckets_[(idx + probe) & mask_];
                    if (b.second.empty()) break;
                    if (b.first == c) {
                        for (int other : b.second)
                            if (other != id && distance(p, game_.pos(other)) <= r)
                                out.push_back(other);
                        break;
                    }
                }
            }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> NeighborIndex::nearest_distances(int id, int k) const {
    double r = cell_;
    while (true) {
        auto ids = within(id, r);
        if (static_cast<int>(ids.size()) >= k || r > 1e12) {
            std::vector<double> d;
            d.reserve(ids.size());
            for (int o : ids) d.push_back(distance(game_.pos(id), game_.pos(o)));
            std::sort(d.begin(), d.end());
            // candidates beyond r may still beat the k-th if the k-th > r;
            // widen until the k-th distance is safely inside the radius
            if (static_cast<int>(d.size()) >= k && d[static_cast<size_t>(k) - 1] <= r) {
                d.resize(static_cast<size_t>(k));
                return d;
            }
            if (r > 1e12) {
                d.resize(std::min(d.size(), static_cast<size_t>(k)));
                return d;
            }
        }
        r *= 2.0;
    }
}

double room_cost(const Game& game, int agent, const Room& room) {
    if (std::find(room.begin(), room.end(), agent) == room.end())
        throw std::invalid_argument("room_cost: agent not in room");
    double sum = 0.0;
    for (int other : room) sum += distance(game.pos(agent), game.pos(other));
    return sum;
}

RoomOrder compare_rooms(const Game& game, int agent, const Room& r, const Room& t,
                        const Tolerance& tol) {
    double cr = room_cost(game, agent, r);
    double ct = room_cost(game, agent, t);
    if (cr < ct - tol.dist_eq) return RoomOrder::prefers_first;
    if (ct < cr - tol.dist_eq) return RoomOrder::prefers_second;
    return RoomOrder::indifferent;
}

double min_room_cost(const Game& game, int agent, const NeighborIndex* index) {
    int k = game.room_size - 1;
    if (k == 0) return 0.0;
    if (index) {
        auto d = index->nearest_distances(agent, k);
        double sum = 0.0;
        for (double v : d) sum += v;
        return sum;
    }
    std::vector<double> d;
    d.reserve(game.agents.size() - 1);
    for (const auto& a : game.agents)
        if (a.id != agent) d.push_back(distance(game.pos(agent), a.pos));
    std::partial_sort(d.begin(), d.begin() + k, d.end());
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += d[static_cast<size_t>(i)];
    return sum;
}

std::vector<std::array<int, 2>> most_preferred_rooms(const Game& game, int agent,
                                                     const Tolerance& tol,
                                                     const NeighborIndex* index) {
    if (game.room_size != 3)
        throw std::invalid_argument("most_preferred_rooms requires room size 3");
    double best = min_room_cost(game, agent, index);
    double budget = best + tol.dist_eq;
    // any member of a qualifying pair is within budget of the agent
    std::vector<std::pair<double, int>> near;
    if (index) {
        for (int o : index->within(agent, budget))
            near.emplace_back(distance(game.pos(agent), game.pos(o)), o);
    } else {
        for (const auto& a : game.agents)
            if (a.id != agent) {
                double d = distance(game.pos(agent), a.pos);
                if (d <= budget) near.emplace_back(d, a.id);
            }
    }
    std::vector<std::array<int, 2>> pairs;
    for (size_t i = 0; i < near.size(); ++i)
        for (size_t j = i + 1; j < near.size(); ++j)
            if (near[i].first + near[j].first <= budget) {
                int b = near[i].second, c = near[j].second;
                if (b > c) std::swap(b, c);
                pairs.push_back({b, c});
            }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

OutcomeReport validate_outcome(const Game& game, const Outcome& outcome) {
    OutcomeReport rep;
    std::vector<int> seen(game.agents.size(), 0);
    for (const auto& room : outcome.rooms) {
        if (static_cast<int>(room.size()) != game.room_size)
            rep.violations.push_back("room of size " + std::to_string(room.size()) +
                                     " (expected " + std::to_string(game.room_size) + ")");
        for (int id : room) {
            if (id < 0 || id >= game.agent_count()) {
                rep.violations.push_back("unknown agent id " + std::to_string(id));
                continue;
            }
            if (++seen[static_cast<size_t>(id)] == 2)
                rep.violations.push_back("agent " + game.agents[static_cast<size_t>(id)].label +
                                         " appears in more than one room");
        }
    }
    for (const auto& a : game.agents)
        if (seen[static_cast<size_t>(a.id)] == 0)
            rep.violations.push_back("agent " + a.label + " is missing from the outcome");
    rep.ok = rep.violations.empty();
    return rep;
}

std::vector<int> room_of_agent(const Game& game, const Outcome& outcome) {
    auto rep = validate_outcome(game, outcome);
    if (!rep.ok) throw std::invalid_argument("outcome is not a valid partition: " + rep.violations.front());
    std::vector<int> where(game.agents.size(), -1);
    for (size_t r = 0; r < outcome.rooms.size(); ++r)
        for (int id : outcome.rooms[r]) where[static_cast<size_t>(id)] = static_cast<int>(r);
    return where;
}

} // namespace esr
