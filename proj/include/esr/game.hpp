#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "esr/geometry.hpp"

namespace esr {

enum class AgentKind {
    element,
    set_agent,
    bend,
    alpha,
    beta,
    gamma,
    aux_u,
    aux_l,
    leaf,
    tree,
    center,
    plain,
};

const char* agent_kind_name(AgentKind k);
AgentKind agent_kind_from_name(const std::string& name);

struct Agent {
    int id = -1;
    std::string label;
    AgentKind kind = AgentKind::plain;
    Vec3 pos;
};

/// A room is a sorted set of agent ids of cardinality Game::room_size.
using Room = std::vector<int>;

struct Outcome {
    std::vector<Room> rooms;

    /// Sorts members within rooms and rooms lexicographically. All
    /// serialized outcomes and all outcome comparisons use this form.
    void canonicalize();
    bool operator==(const Outcome& o) const { return rooms == o.rooms; }
};

struct Game {
    std::vector<Agent> agents;
    int room_size = 3;
    double epsilon = 0.0; // 0 when not produced by the reduction

    int agent_count() const { return static_cast<int>(agents.size()); }
    const Vec3& pos(int id) const { return agents[static_cast<size_t>(id)].pos; }
    void check() const; // throws on invariant violations
};

enum class RoomOrder { prefers_first, indifferent, prefers_second };

struct OutcomeReport {
    bool ok = true;
    std::vector<std::string> violations;
};

/// Uniform-grid index over agent positions. Purely an accelerator; all
/// queries are exact. Cell size 2.0 matches the construction's unit-scale
/// interaction distances.
class NeighborIndex {
public:
    explicit NeighborIndex(const Game& game, double cell = 2.0);

    /// Ids of agents (other than `id`) within Euclidean distance r.
    std::vector<int> within(int id, double r) const;
    /// The k smallest distances from agent `id` to distinct other agents.
    std::vector<double> nearest_distances(int id, int k) const;

private:
    const Game& game_;
    double cell_;
    std::array<long, 3> key(const Vec3& p) const;
    // flat hash of cell -> agent ids
    struct CellHash {
        size_t operator()(const std::array<long, 3>& c) const;
    };
    std::vector<std::pair<std::array<long, 3>, std::vector<int>>> buckets_;
    size_t bucket_index(const std::array<long, 3>& c) const;
    size_t mask_ = 0;
};

double room_cost(const Game& game, int agent, const Room& room);

RoomOrder compare_rooms(const Game& game, int agent, const Room& r, const Room& t,
                        const Tolerance& tol);

/// Greatest lower bound of room_cost over all rooms containing the agent:
/// the sum of its room_size-1 smallest distances to distinct other agents.
double min_room_cost(const Game& game, int agent, const NeighborIndex* index = nullptr);

/// All roommate pairs {b, c} achieving min_room_cost within tol.dist_eq.
/// Room size 3 only. Pairs are sorted, the list is sorted.
std::vector<std::array<int, 2>> most_preferred_rooms(const Game& game, int agent,
                                                     const Tolerance& tol,
                                                     const NeighborIndex* index = nullptr);

OutcomeReport validate_outcome(const Game& game, const Outcome& outcome);

/// Room lookup table: agent id -> index of its room in outcome.rooms.
/// Throws if the outcome is not a partition.
std::vector<int> room_of_agent(const Game& game, const Outcome& outcome);

} // namespace esr
