#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "esr/planarity.hpp"

namespace esr {

struct GridPoint {
    int x = 0;
    int y = 0;
    bool operator==(const GridPoint& o) const { return x == o.x && y == o.y; }
    bool operator<(const GridPoint& o) const { return x != o.x ? x < o.x : y < o.y; }
};

struct DrawnEdge {
    int a = -1;
    int b = -1;
    std::optional<GridPoint> bend;
};

/// Orthogonal grid drawing: vertices on integer grid points, every edge one
/// horizontal plus at most one vertical unit-grid segment run, meeting at
/// the optional bend. `unit` is the scale factor applied on export only.
struct OrthogonalDrawing {
    double unit = 10.0;
    std::vector<GridPoint> coords; // indexed by vertex id
    std::vector<DrawnEdge> edges;
};

struct DrawingReport {
    bool ok = true;
    std::vector<std::string> violations;
    int width = 0;  // grid units, bounding box
    int height = 0;
};

struct EmbedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Deterministic backtracking embedder for connected or disconnected planar
/// graphs with maximum degree 3. Components are embedded separately and
/// packed side by side, bottom-aligned, then compressed.
OrthogonalDrawing embed_orthogonal(const SimpleGraph& g, uint64_t seed);

/// Removes every empty grid line (one intersecting the bounding box but
/// containing no vertex) by shifting. Idempotent; never grows the drawing.
OrthogonalDrawing compress(const OrthogonalDrawing& d);

DrawingReport validate_drawing(const SimpleGraph& g, const OrthogonalDrawing& d);

std::string drawing_to_json(const OrthogonalDrawing& d);
OrthogonalDrawing drawing_from_json(const std::string& text);

std::string render_svg(const OrthogonalDrawing& d);

/// Axis-aligned segment decomposition of one drawn edge (1 or 2 segments).
std::vector<std::pair<GridPoint, GridPoint>> edge_segments(const OrthogonalDrawing& d,
                                                           const DrawnEdge& e);

} // namespace esr
