#pragma once

#include <string>
#include <utility>
#include <vector>

namespace esr {

/// Simple undirected graph on vertices 0..n-1.
struct SimpleGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;

    void add_edge(int a, int b);
    std::vector<std::vector<int>> adjacency() const;
    void check() const; // rejects loops, duplicates, out-of-range
};

struct PlanarityResult {
    bool planar = true;
    // When nonplanar: a minimal nonplanar subgraph (a subdivision of K5 or
    // K3,3) and which of the two it subdivides.
    std::vector<std::pair<int, int>> witness_edges;
    std::string witness_kind; // "K5" or "K3,3"
};

/// Exact planarity decision (Demoucron-Malgrange-Pertuiset face embedding
/// per biconnected component). Desk-scale graphs; O(V*E) per component.
PlanarityResult planarity_test(const SimpleGraph& g);

} // namespace esr
