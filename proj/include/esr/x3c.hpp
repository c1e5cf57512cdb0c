#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "esr/planarity.hpp"

namespace esr {

/// Exact Cover by 3-Sets instance: universe [1..m] and a collection of
/// 3-element subsets. Sets keep their input order; indices are 0-based
/// internally and printed 1-based.
struct X3CInstance {
    int universe_size = 0;
    std::vector<std::array<int, 3>> sets; // each sorted ascending

    void normalize(); // sorts elements within each set
};

struct X3CReport {
    bool is_x3c = false;   // well-formed universe and sets
    bool is_cubic = false; // every element in exactly three sets
    bool is_planar = false;
    bool sizes_ok = false; // |X| >= 6 and |C| = |X|
    std::vector<std::string> notes;

    bool is_pcx3c() const { return is_x3c && is_cubic && is_planar && sizes_ok; }
};

/// Associated bipartite graph: vertices 0..m-1 are the element-vertices
/// u_1..u_m, vertices m..m+q-1 the set-vertices w_1..w_q.
struct AssociatedGraph {
    int element_count = 0;
    int set_count = 0;
    SimpleGraph graph;

    int element_vertex(int i1based) const { return i1based - 1; }
    int set_vertex(int j0based) const { return element_count + j0based; }
};

using CoverSolution = std::vector<int>; // 0-based set indices, ascending

X3CReport validate_pcx3c(const X3CInstance& inst);

AssociatedGraph associated_graph(const X3CInstance& inst);

/// Backtracking exact-cover search: always branches on the uncovered
/// element contained in the fewest remaining sets, trying those sets in
/// index order. Returns the solutions sorted; limit <= 0 enumerates all of
/// them (an empty result is then a proof of nonexistence), a positive
/// limit stops the deterministic search after that many covers.
std::vector<CoverSolution> solve_exact_cover(const X3CInstance& inst, long long limit);

bool is_cover_solution(const X3CInstance& inst, const CoverSolution& sol);

/// Relabels elements and permutes the set order by a seeded shuffle.
/// Planarity and cubicity are invariant under relabeling.
X3CInstance perturb(const X3CInstance& inst, uint64_t seed);

} // namespace esr
