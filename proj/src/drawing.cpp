#include "esr/drawing.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "json.hpp"

namespace esr {

std::vector<std::pair<GridPoint, GridPoint>> edge_segments(const OrthogonalDrawing& d,
                                                           const DrawnEdge& e) {
    GridPoint pa = d.coords[static_cast<size_t>(e.a)];
    GridPoint pb = d.coords[static_cast<size_t>(e.b)];
    if (!e.bend) return {{pa, pb}};
    return {{pa, *e.bend}, {*e.bend, pb}};
}

namespace {

bool axis_aligned(GridPoint a, GridPoint b) { return a.x == b.x || a.y == b.y; }

std::vector<GridPoint> lattice_points(GridPoint a, GridPoint b) {
    std::vector<GridPoint> pts;
    int dx = (b.x > a.x) - (b.x < a.x);
    int dy = (b.y > a.y) - (b.y < a.y);
    GridPoint p = a;
    pts.push_back(p);
    while (!(p == b)) {
        p = {p.x + dx, p.y + dy};
        pts.push_back(p);
    }
    return pts;
}

using UnitEdge = std::pair<GridPoint, GridPoint>;

UnitEdge unit_edge(GridPoint a, GridPoint b) { return a < b ? UnitEdge{a, b} : UnitEdge{b, a}; }

struct Owner {
    bool is_vertex = false;
    int id = -1; // vertex id or edge index
    bool operator==(const Owner& o) const { return is_vertex == o.is_vertex && id == o.id; }
};

// Shared occupancy bookkeeping for validation and search. Every lattice
// point on a segment is owned: by its vertex at segment ends, by the edge
// at bends and interior pass-through points. Unit grid edges are owned by
// at most one drawing edge.
struct Occupancy {
    std::map<GridPoint, Owner> points;
    std::map<UnitEdge, int> unit_edges;

    std::vector<std::string> errors;

    bool claim_vertex(int v, GridPoint p) {
        auto it = points.find(p);
        if (it != points.end()) return false;
        points[p] = {true, v};
        return true;
    }

    struct Claim {
        std::vector<GridPoint> new_points;
        std::vector<UnitEdge> new_units;
    };

    bool claim_segment(int edge_idx, int va, int vb, GridPoint a, GridPoint b,
                       Claim* claim = nullptr) {
        if (a == b || !axis_aligned(a, b)) return false;
        auto pts = lattice_points(a, b);
        for (size_t i = 0; i + 1 < pts.size(); ++i) {
            auto ue = unit_edge(pts[i], pts[i + 1]);
            if (unit_edges.count(ue)) return false;
        }
        for (size_t i = 0; i < pts.size(); ++i) {
            auto it = points.find(pts[i]);
            bool is_end = i == 0 || i + 1 == pts.size();
            if (it == points.end()) continue;
            if (it->second.is_vertex) {
                // may touch a vertex point only at a segment end, and only
                // if the drawn edge is incident to that vertex
                if (!is_end || (it->second.id != va && it->second.id != vb)) return false;
            } else {
                if (it->second.id != edge_idx) return false;
            }
        }
        for (size_t i = 0; i + 1 < pts.size(); ++i) {
            auto ue = unit_edge(pts[i], pts[i + 1]);
            unit_edges[ue] = edge_idx;
            if (claim) claim->new_units.push_back(ue);
        }
        for (const auto& p : pts)
            if (!points.count(p)) {
                points[p] = {false, edge_idx};
                if (claim) claim->new_points.push_back(p);
            }
        return true;
    }

    void rollback(const Claim& claim) {
        for (const auto& p : claim.new_points) points.erase(p);
        for (const auto& ue : claim.new_units) unit_edges.erase(ue);
    }
};

bool build_occupancy(const SimpleGraph& g, const OrthogonalDrawing& d, Occupancy& occ) {
    bool ok = true;
    for (int v = 0; v < g.n; ++v)
        if (!occ.claim_vertex(v, d.coords[static_cast<size_t>(v)])) {
            occ.errors.push_back("vertex " + std::to_string(v) + " shares a grid point");
            ok = false;
        }
    for (size_t ei = 0; ei < d.edges.size(); ++ei) {
        const auto& e = d.edges[ei];
        for (auto [a, b] : edge_segments(d, e)) {
            if (a == b) {
                occ.errors.push_back("edge " + std::to_string(ei) + " has a zero-length segment");
                ok = false;
                continue;
            }
            if (!axis_aligned(a, b)) {
                occ.errors.push_back("edge " + std::to_string(ei) + " has a non-axis-aligned segment");
                ok = false;
                continue;
            }
            if (!occ.claim_segment(static_cast<int>(ei), e.a, e.b, a, b)) {
                occ.errors.push_back("edge " + std::to_string(ei) + " overlaps another element");
                ok = false;
            }
        }
    }
    return ok;
}

} // namespace

DrawingReport validate_drawing(const SimpleGraph& g, const OrthogonalDrawing& d) {
    DrawingReport rep;
    if (static_cast<int>(d.coords.size()) != g.n) {
        rep.ok = false;
        rep.violations.push_back("coordinate count does not match vertex count");
        return rep;
    }
    if (d.edges.size() != g.edges.size()) {
        rep.ok = false;
        rep.violations.push_back("edge count does not match the graph");
        return rep;
    }
    std::set<std::pair<int, int>> want(g.edges.begin(), g.edges.end());
    for (const auto& e : d.edges) {
        auto mm = std::minmax(e.a, e.b);
        if (!want.count({mm.first, mm.second})) {
            rep.ok = false;
            rep.violations.push_back("drawn edge not present in the graph");
        }
    }

    Occupancy occ;
    if (!build_occupancy(g, d, occ)) {
        rep.ok = false;
        for (auto& v : occ.errors) rep.violations.push_back(v);
    }

    // bend sanity: both legs must be axis aligned, which build_occupancy
    // checked; also a straight edge must not carry a redundant bend
    for (size_t ei = 0; ei < d.edges.size(); ++ei) {
        const auto& e = d.edges[ei];
        if (e.bend) {
            GridPoint pa = d.coords[static_cast<size_t>(e.a)];
            GridPoint pb = d.coords[static_cast<size_t>(e.b)];
            if (*e.bend == pa || *e.bend == pb) {
                rep.ok = false;
                rep.violations.push_back("edge " + std::to_string(ei) + " bend sits on an endpoint");
            }
        }
    }

    if (g.n > 0) {
        int minx = INT32_MAX, maxx = INT32_MIN, miny = INT32_MAX, maxy = INT32_MIN;
        std::set<int> xs, ys;
        for (const auto& p : d.coords) {
            minx = std::min(minx, p.x);
            maxx = std::max(maxx, p.x);
            miny = std::min(miny, p.y);
            maxy = std::max(maxy, p.y);
            xs.insert(p.x);
            ys.insert(p.y);
        }
        rep.width = maxx - minx;
        rep.height = maxy - miny;
        for (int x = minx; x <= maxx; ++x)
            if (!xs.count(x)) {
                rep.ok = false;
                rep.violations.push_back("empty vertical grid line x=" + std::to_string(x));
            }
        for (int y = miny; y <= maxy; ++y)
            if (!ys.count(y)) {
                rep.ok = false;
                rep.violations.push_back("empty horizontal grid line y=" + std::to_string(y));
            }
        if (rep.width > g.n || rep.height > g.n) {
            rep.ok = false;
            rep.violations.push_back("drawing exceeds the n-by-n dimension bound");
        }
    }
    return rep;
}

namespace {

// backtracking placement of one connected component
struct ComponentEmbedder {
    const SimpleGraph& g;
    const std::vector<int>& comp; // vertex ids
    std::vector<std::vector<int>> adj;
    std::vector<int> order; // BFS placement order
    Occupancy occ;
    std::map<int, GridPoint> pos;
    std::map<std::pair<int, int>, std::optional<GridPoint>> routed; // edge -> bend
    long long budget = 0;

    ComponentEmbedder(const SimpleGraph& graph, const std::vector<int>& component, uint64_t seed)
        : g(graph), comp(component) {
        adj = g.adjacency();
        // root: a degree-<=2 vertex when one exists; seed rotates the choice
        std::vector<int> roots;
        int mind = 4;
        for (int v : comp) mind = std::min(mind, static_cast<int>(adj[static_cast<size_t>(v)].size()));
        for (int v : comp)
            if (static_cast<int>(adj[static_cast<size_t>(v)].size()) == mind) roots.push_back(v);
        int root = roots[seed % roots.size()];
        std::set<int> seen{root};
        std::queue<int> q;
        q.push(root);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            order.push_back(v);
            auto nb = adj[static_cast<size_t>(v)];
            std::sort(nb.begin(), nb.end());
            for (int w : nb)
                if (!seen.count(w)) {
                    seen.insert(w);
                    q.push(w);
                }
        }
    }

    using RouteOption = std::pair<std::optional<GridPoint>, std::vector<std::pair<GridPoint, GridPoint>>>;

    std::vector<RouteOption> route_options(int u, int v) const {
        GridPoint a = pos.at(u), b = pos.at(v);
        if (axis_aligned(a, b)) return {{std::nullopt, {{a, b}}}};
        GridPoint b1{a.x, b.y}, b2{b.x, a.y};
        return {{b1, {{a, b1}, {b1, b}}}, {b2, {{a, b2}, {b2, b}}}};
    }

    // backtrack over the routing choices of vertex v's edges to its
    // already-placed neighbors, then recurse into the next vertex
    bool route_and_continue(int v, const std::vector<int>& placed_neighbors, size_t ni,
                            size_t k, int radius) {
        if (ni == placed_neighbors.size()) return place(k + 1, radius);
        int w = placed_neighbors[ni];
        for (const auto& [bend, segs] : route_options(v, w)) {
            Occupancy::Claim claim;
            bool ok = true;
            for (auto [sa, sb] : segs)
                if (!occ.claim_segment(edge_index(v, w), v, w, sa, sb, &claim)) {
                    ok = false;
                    break;
                }
            if (ok) {
                auto key = std::make_pair(std::min(v, w), std::max(v, w));
                routed[key] = bend;
                if (route_and_continue(v, placed_neighbors, ni + 1, k, radius)) return true;
                routed.erase(key);
            }
            occ.rollback(claim);
            if (budget <= 0) return false;
        }
        return false;
    }

    bool place(size_t k, int radius) {
        if (budget-- <= 0) return false;
        if (k == order.size()) return true;
        int v = order[static_cast<size_t>(k)];
        std::vector<int> placed_neighbors;
        for (int w : adj[static_cast<size_t>(v)])
            if (pos.count(w)) placed_neighbors.push_back(w);
        std::sort(placed_neighbors.begin(), placed_neighbors.end());

        std::vector<GridPoint> candidates;
        if (placed_neighbors.empty()) {
            candidates.push_back({0, 0});
        } else {
            GridPoint c = pos[placed_neighbors.front()];
            for (int dy = -radius; dy <= radius; ++dy)
                for (int dx = -radius; dx <= radius; ++dx)
                    candidates.push_back({c.x + dx, c.y + dy});
            std::stable_sort(candidates.begin(), candidates.end(),
                             [&](GridPoint p, GridPoint q) {
                                 auto score = [&](GridPoint t) {
                                     int s = 0;
                                     for (int w : placed_neighbors) {
                                         GridPoint pw = pos[w];
                                         s += std::abs(t.x - pw.x) + std::abs(t.y - pw.y);
                                     }
                                     return s;
                                 };
                                 return score(p) < score(q);
                             });
        }

        for (const auto& cand : candidates) {
            if (occ.points.count(cand)) continue;
            occ.points[cand] = {true, v};
            pos[v] = cand;
            if (route_and_continue(v, placed_neighbors, 0, k, radius)) return true;
            occ.points.erase(cand);
            pos.erase(v);
            if (budget <= 0) return false;
        }
        return false;
    }

    int edge_index(int a, int b) const {
        auto mm = std::minmax(a, b);
        for (size_t i = 0; i < g.edges.size(); ++i)
            if (g.edges[i] == std::make_pair(mm.first, mm.second)) return static_cast<int>(i);
        return -1;
    }

    bool run() {
        for (int radius : {3, 5, 8, 12, 20}) {
            budget = 2'000'000;
            occ = Occupancy{};
            pos.clear();
            routed.clear();
            if (place(0, radius)) return true;
        }
        return false;
    }
};

} // namespace

OrthogonalDrawing embed_orthogonal(const SimpleGraph& g, uint64_t seed) {
    g.check();
    auto adj = g.adjacency();
    for (int v = 0; v < g.n; ++v)
        if (adj[static_cast<size_t>(v)].size() > 3)
            throw EmbedError("vertex degree exceeds 3");
    auto pl = planarity_test(g);
    if (!pl.planar) throw EmbedError("graph is not planar (" + pl.witness_kind + " witness)");

    // connected components
    std::vector<int> comp_of(static_cast<size_t>(g.n), -1);
    std::vector<std::vector<int>> comps;
    for (int v = 0; v < g.n; ++v) {
        if (comp_of[static_cast<size_t>(v)] != -1) continue;
        std::vector<int> comp;
        std::queue<int> q;
        q.push(v);
        comp_of[static_cast<size_t>(v)] = static_cast<int>(comps.size());
        while (!q.empty()) {
            int x = q.front();
            q.pop();
            comp.push_back(x);
            for (int w : adj[static_cast<size_t>(x)])
                if (comp_of[static_cast<size_t>(w)] == -1) {
                    comp_of[static_cast<size_t>(w)] = static_cast<int>(comps.size());
                    q.push(w);
                }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }

    OrthogonalDrawing out;
    out.coords.resize(static_cast<size_t>(g.n));
    std::map<std::pair<int, int>, std::optional<GridPoint>> bends;

    int x_offset = 0;
    for (const auto& comp : comps) {
        ComponentEmbedder emb(g, comp, seed);
        if (!emb.run())
            throw EmbedError("embedding search exhausted (component of " +
                             std::to_string(comp.size()) + " vertices)");
        int minx = INT32_MAX, miny = INT32_MAX, maxx = INT32_MIN;
        for (int v : comp) {
            minx = std::min(minx, emb.pos[v].x);
            miny = std::min(miny, emb.pos[v].y);
            maxx = std::max(maxx, emb.pos[v].x);
        }
        for (const auto& [e, bend] : emb.routed)
            if (bend) {
                minx = std::min(minx, bend->x);
                miny = std::min(miny, bend->y);
                maxx = std::max(maxx, bend->x);
            }
        for (int v : comp)
            out.coords[static_cast<size_t>(v)] = {emb.pos[v].x - minx + x_offset,
                                                  emb.pos[v].y - miny};
        for (const auto& [e, bend] : emb.routed) {
            std::optional<GridPoint> shifted;
            if (bend) shifted = GridPoint{bend->x - minx + x_offset, bend->y - miny};
            bends[e] = shifted;
        }
        x_offset += maxx - minx + 1;
    }

    for (auto [a, b] : g.edges) {
        DrawnEdge de;
        de.a = a;
        de.b = b;
        de.bend = bends.at({a, b});
        out.edges.push_back(de);
    }
    return compress(out);
}

OrthogonalDrawing compress(const OrthogonalDrawing& d) {
    OrthogonalDrawing cur = d;
    if (cur.coords.empty()) return cur;
    bool changed = true;
    while (changed) {
        changed = false;
        int minx = INT32_MAX, maxx = INT32_MIN, miny = INT32_MAX, maxy = INT32_MIN;
        std::set<int> xs, ys;
        for (const auto& p : cur.coords) {
            minx = std::min(minx, p.x);
            maxx = std::max(maxx, p.x);
            miny = std::min(miny, p.y);
            maxy = std::max(maxy, p.y);
            xs.insert(p.x);
            ys.insert(p.y);
        }
        for (int x = minx; x <= maxx && !changed; ++x) {
            if (xs.count(x)) continue;
            for (auto& p : cur.coords)
                if (p.x > x) --p.x;
            for (auto& e : cur.edges)
                if (e.bend && e.bend->x > x) --e.bend->x;
            changed = true;
        }
        for (int y = miny; y <= maxy && !changed; ++y) {
            if (ys.count(y)) continue;
            for (auto& p : cur.coords)
                if (p.y > y) --p.y;
            for (auto& e : cur.edges)
                if (e.bend && e.bend->y > y) --e.bend->y;
            changed = true;
        }
    }
    // drop bends that became collinear no-ops
    for (auto& e : cur.edges)
        if (e.bend) {
            GridPoint pa = cur.coords[static_cast<size_t>(e.a)];
            GridPoint pb = cur.coords[static_cast<size_t>(e.b)];
            if ((pa.x == e.bend->x && pb.x == e.bend->x) ||
                (pa.y == e.bend->y && pb.y == e.bend->y))
                e.bend.reset();
        }
    return cur;
}

std::string drawing_to_json(const OrthogonalDrawing& d) {
    nlohmann::ordered_json j;
    j["unit"] = d.unit;
    j["vertices"] = nlohmann::ordered_json::array();
    for (size_t v = 0; v < d.coords.size(); ++v)
        j["vertices"].push_back({{"id", v}, {"x", d.coords[v].x}, {"y", d.coords[v].y}});
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : d.edges) {
        nlohmann::ordered_json je;
        je["endpoints"] = {e.a, e.b};
        if (e.bend)
            je["bend"] = {{"x", e.bend->x}, {"y", e.bend->y}};
        else
            je["bend"] = nullptr;
        j["edges"].push_back(je);
    }
    return j.dump(2) + "\n";
}

OrthogonalDrawing drawing_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    for (const auto& [key, val] : j.items())
        if (key != "unit" && key != "vertices" && key != "edges")
            throw std::invalid_argument("unknown field in drawing file: " + key);
    OrthogonalDrawing d;
    d.unit = j.at("unit").get<double>();
    const auto& jv = j.at("vertices");
    d.coords.resize(jv.size());
    std::vector<bool> seen(jv.size(), false);
    for (const auto& v : jv) {
        size_t id = v.at("id").get<size_t>();
        if (id >= d.coords.size() || seen[id])
            throw std::invalid_argument("bad vertex id in drawing file");
        seen[id] = true;
        d.coords[id] = {v.at("x").get<int>(), v.at("y").get<int>()};
    }
    for (const auto& e : j.at("edges")) {
        DrawnEdge de;
        de.a = e.at("endpoints").at(0).get<int>();
        de.b = e.at("endpoints").at(1).get<int>();
        if (!e.at("bend").is_null())
            de.bend = GridPoint{e.at("bend").at("x").get<int>(), e.at("bend").at("y").get<int>()};
        d.edges.push_back(de);
    }
    return d;
}

std::string render_svg(const OrthogonalDrawing& d) {
    int minx = 0, maxx = 1, miny = 0, maxy = 1;
    if (!d.coords.empty()) {
        minx = INT32_MAX;
        maxx = INT32_MIN;
        miny = INT32_MAX;
        maxy = INT32_MIN;
        for (const auto& p : d.coords) {
            minx = std::min(minx, p.x);
            maxx = std::max(maxx, p.x);
            miny = std::min(miny, p.y);
            maxy = std::max(maxy, p.y);
        }
    }
    const int scale = 40, pad = 20;
    auto X = [&](int x) { return pad + (x - minx) * scale; };
    auto Y = [&](int y) { return pad + (maxy - y) * scale; };
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
        << (maxx - minx) * scale + 2 * pad << "\" height=\"" << (maxy - miny) * scale + 2 * pad
        << "\">\n";
    for (const auto& e : d.edges)
        for (auto [a, b] : edge_segments(d, e))
            svg << "  <line x1=\"" << X(a.x) << "\" y1=\"" << Y(a.y) << "\" x2=\"" << X(b.x)
                << "\" y2=\"" << Y(b.y) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    for (const auto& e : d.edges)
        if (e.bend)
            svg << "  <rect x=\"" << X(e.bend->x) - 3 << "\" y=\"" << Y(e.bend->y) - 3
                << "\" width=\"6\" height=\"6\" fill=\"gray\"/>\n";
    for (size_t v = 0; v < d.coords.size(); ++v)
        svg << "  <circle cx=\"" << X(d.coords[v].x) << "\" cy=\"" << Y(d.coords[v].y)
            << "\" r=\"5\" fill=\"black\"><title>" << v << "</title></circle>\n";
    svg << "</svg>\n";
    return svg.str();
}

} // namespace esr
