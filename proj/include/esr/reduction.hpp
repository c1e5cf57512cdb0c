#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "esr/drawing.hpp"
#include "esr/game.hpp"
#include "esr/x3c.hpp"

namespace esr {

enum class Layer { bottom, top, ascending };

enum class ChainRole {
    bottom_u_out,   // element agent -> bend agent, or element -> set agent
    bottom_to_set,  // bend agent -> set agent
    asc_up,         // u_i -> u'_i
    asc_across,     // u'_i -> l'_i
    asc_down_leaf,  // l'_i -> l_i
    top_edge,       // parent gadget member -> child vertex / leaf
};

/// One agent-triple chain replacing a construction edge. gamma(z) for
/// z in [0, n_hat] walks the gamma polyline; gamma(0) is the `from`
/// vertex agent and gamma(n_hat) the merged `to` vertex agent.
struct Chain {
    std::string edge_id;
    Layer layer = Layer::bottom;
    ChainRole role = ChainRole::bottom_u_out;
    int from_id = -1;
    int to_id = -1;
    int n_hat = 0;
    std::vector<int> alphas; // z = 1..n_hat
    std::vector<int> betas;  // z = 1..n_hat
    std::vector<int> gammas; // z = 1..n_hat; gammas.back() == to_id

    int set_index = -1;   // bottom chains: 0-based set j
    int element = -1;     // bottom / ascending chains: 1-based element i
    int parent_node = -1; // top chains: snowflake node of the shallower end
    int child_node = -1;

    int gamma_id(int z) const { return z == 0 ? from_id : gammas[static_cast<size_t>(z) - 1]; }
};

struct SnowNode {
    int tree = 1;  // 1..3
    int depth = 0; // j
    int index = 1; // l, 1-based within (tree, depth)
    int parent = -1;
    std::array<int, 2> children{-1, -1};
    bool is_leaf = false;
    // internal nodes: gadget member agent ids (p=1 at the vertex, p=2/3 on
    // the child edges); leaves: members[0] is the leaf agent
    std::array<int, 3> members{-1, -1, -1};
    Vec3 pos;
    int leaf_rank = -1; // 1-based, leaves only (l_i pairs with u_i)
};

struct SnowflakeTree {
    int floor_k = 0;
    int replacements = 0;
    std::vector<SnowNode> nodes;
    std::vector<int> leaves; // node indices sorted by leaf_rank
    std::array<int, 3> center_ids{-1, -1, -1};
};

struct AscendingPath {
    int element = 0; // 1-based
    int u_prime_id = -1;
    int l_prime_id = -1;
    int leaf_agent_id = -1;
    std::array<int, 3> chain_idx{-1, -1, -1}; // up, across, down_leaf
};

struct LayerCounts {
    long long bottom = 0;
    long long top = 0;
    long long ascending = 0;
    long long total() const { return bottom + top + ascending; }
};

struct ReductionArtifacts {
    X3CInstance instance;
    OrthogonalDrawing drawing;
    double epsilon = 0.0;
    int floor_k = 0;
    double z_top = 0.0;
    std::vector<Chain> chains;
    std::map<int, int> element_agent;               // element i -> agent id
    std::map<std::pair<int, int>, int> bend_agent;  // (set j, element i) -> id
    std::map<int, std::array<int, 3>> set_triangle; // set j -> ids, ordered as the set
    SnowflakeTree snowflake;
    std::vector<AscendingPath> ascending;
    LayerCounts counts;
};

struct ReductionResult {
    Game game;
    ReductionArtifacts artifacts;
};

struct TripleCoords {
    Vec3 alpha, beta, gamma;
};

/// Edge length between tree depths parent_depth and parent_depth+1:
/// 10(|X|+|C|) + 4^(floor_k - parent_depth + 2).
long long snowflake_edge_length(int universe_size, int collection_size, int floor_k,
                                int parent_depth);

/// Top-layer skeleton: three binary trees of exponentially shrinking
/// equilateral triangles around a unit central triangle, grown to depth
/// floor(k) and extended by depth-2 balanced gadgets on the first
/// (|X| - 3*2^floor(k))/3 leaves so the leaf count is exactly |X|.
/// Geometry only; agent ids and leaf ranks stay unset.
SnowflakeTree plan_snowflake(int universe_size, int collection_size, const Vec3& center,
                             double z_top);

/// Azimuth schedule for the alpha/beta pairs along one chain. Angles are
/// measured in each hop's normal plane from the outward (bend-side) radial.
/// The base angle blends linearly (along the shorter circular arc) from
/// theta_start at the first hop to theta_end at the last, so each end is
/// controlled by exactly one knob; consecutive pairs alternate by +-psi on
/// top of the base to keep neighboring pairs apart.
struct ChainAzimuth {
    double theta_start = 0.0;
    double theta_end = 0.0;
    double psi = 0.55;
    int phase = 0; // flips which hops take +psi; chosen per chain
};

/// Places the n_hat = ceil(|to-from|/d) triples of one chain on a circular
/// arc from `from` to `to` bulging toward bend_dir. Every returned triple
/// satisfies the construction distances exactly: |alpha-beta| = epsilon and
/// unit distance from alpha/beta to both flanking gamma points.
std::vector<TripleCoords> place_chain(const Vec3& from, const Vec3& to, const Vec3& bend_dir,
                                      double epsilon, const Tolerance& tol,
                                      const ChainAzimuth& azimuth = {});

ReductionResult reduce(const X3CInstance& inst, double epsilon, uint64_t seed);
ReductionResult reduce_with_drawing(const X3CInstance& inst, const OrthogonalDrawing& drawing,
                                    double epsilon, uint64_t seed);

struct ReductionReport {
    bool ok = false;
    long long triples_checked = 0;
    long long triple_violations = 0;
    double max_triple_error = 0.0;      // worst deviation from the chain distances
    double min_construction_edge = 0.0; // pre-gadget edge lengths, >= 10 expected
    bool edges_ok = false;
    long long min_cost_violations = 0;  // agents whose min cost misses 1+eps / 2
    long long preferred_mismatches = 0; // agents whose best-pair set is unexpected
    double gap = 0.0;                   // best vs next-best non-prescribed room, global min
    bool gap_ok = false;
    std::vector<std::string> notes;
};

ReductionReport validate_reduction(const Game& game, const ReductionArtifacts& artifacts,
                                   const Tolerance& tol);

/// Predicted unit-distance neighbor set of every non-alpha/beta agent
/// (chain-adjacent agents plus triangle partners); the basis for the
/// most-preferred-room predictions and the gap computation.
std::map<int, std::vector<int>> prescribed_neighbors(const ReductionArtifacts& artifacts);

std::string artifacts_to_json(const Game& game, const ReductionArtifacts& artifacts);
ReductionResult artifacts_from_json(const std::string& text);

} // namespace esr
