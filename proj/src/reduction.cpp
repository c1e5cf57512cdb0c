#include "esr/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"

namespace esr {

namespace {

constexpr double kPi = 3.14159265358979323846;

double chain_hop(double epsilon) { return std::sqrt(1.0 - 0.25 * epsilon * epsilon); }

/// Geometry of one chain: the gamma polyline lies on a circular arc from
/// `from` to `to` bulging toward bend_dir, n_hat equal hops of length d.
/// Each hop carries an alpha/beta pair on the radius-c circle around the
/// hop midpoint; c = sqrt(1 - d^2/4 - eps^2/4) makes the pair exactly unit
/// distance from both flanking gammas. The polyline is materialized as an
/// incremental walk over the hop headings, which stays well conditioned
/// even when the arc is nearly straight (the circle-center form cancels
/// catastrophically there).
struct ArcFrame {
    Vec3 from, to, e_hat, b_hat, u_hat;
    double L = 0, d = 0, c = 0, half_eps = 0;
    int n_hat = 0;
    double phi = 0, Omega = 0;
    std::vector<Vec3> backbone; // gamma positions, indices 0..n_hat

    const Vec3& gamma(int z) const { return backbone[static_cast<size_t>(z)]; }

    void hop_frame(int z, Vec3& m, Vec3& w, Vec3& h) const {
        const Vec3& a = gamma(z - 1);
        const Vec3& b = gamma(z);
        m = (a + b) * 0.5;
        h = (b - a) / d;
        w = u_hat.cross(h); // outward radial: bend-side for a straight hop
    }

    TripleCoords triple(int z, double theta) const {
        Vec3 m, w, h;
        hop_frame(z, m, w, h);
        Vec3 v = w * std::cos(theta) + u_hat * std::sin(theta);
        Vec3 pair_axis = u_hat * std::cos(theta) - w * std::sin(theta);
        Vec3 apex = m + v * c;
        return {apex + pair_axis * half_eps, apex - pair_axis * half_eps, gamma(z)};
    }
};

double azimuth_at(const ChainAzimuth& az, int z, int n_hat) {
    double span = std::remainder(az.theta_end - az.theta_start, 2.0 * kPi);
    double t = n_hat > 1 ? static_cast<double>(z - 1) / (n_hat - 1) : 0.5;
    double sigma = ((z + az.phase) % 2 == 0) ? 1.0 : -1.0;
    return az.theta_start + t * span + sigma * az.psi;
}

ArcFrame make_frame(const Vec3& from, const Vec3& to, const Vec3& bend_dir, double epsilon,
                    const Tolerance& tol) {
    if (!(epsilon > 0.0 && epsilon < 0.001))
        throw std::invalid_argument("place_chain: epsilon must be in (0, 0.001)");
    ArcFrame f;
    f.from = from;
    f.to = to;
    f.L = distance(from, to);
    if (f.L < 1.0) throw std::invalid_argument("place_chain: endpoints closer than 1");
    f.e_hat = (to - from) / f.L;
    f.b_hat = bend_dir.normalized();
    if (std::abs(f.e_hat.dot(f.b_hat)) > 1e-9)
        throw std::invalid_argument("place_chain: bend direction not perpendicular to the chord");
    f.u_hat = f.e_hat.cross(f.b_hat);
    f.d = chain_hop(epsilon);
    f.half_eps = 0.5 * epsilon;
    f.c = std::sqrt(1.0 - 0.25 * f.d * f.d - 0.25 * epsilon * epsilon);
    f.n_hat = std::max(2, static_cast<int>(std::ceil(f.L / f.d - 1e-9)));
    while (f.n_hat * f.d < f.L) ++f.n_hat;
    f.phi = f.n_hat * f.d == f.L ? 0.0 : arc_chord_angle(f.n_hat, f.d, f.L, tol.solver_eps);
    f.Omega = f.n_hat * f.phi;

    // hop z heads at angle Omega - (2z-1)phi off the chord, symmetric about
    // the middle, so the walk returns to the chord line at `to`
    f.backbone.reserve(static_cast<size_t>(f.n_hat) + 1);
    f.backbone.push_back(from);
    for (int z = 1; z < f.n_hat; ++z) {
        double ang = f.Omega - (2.0 * z - 1.0) * f.phi;
        Vec3 step = (f.e_hat * std::cos(ang) + f.b_hat * std::sin(ang)) * f.d;
        f.backbone.push_back(f.backbone.back() + step);
    }
    f.backbone.push_back(to);
    return f;
}

} // namespace

std::vector<TripleCoords> place_chain(const Vec3& from, const Vec3& to, const Vec3& bend_dir,
                                      double epsilon, const Tolerance& tol,
                                      const ChainAzimuth& azimuth) {
    ArcFrame f = make_frame(from, to, bend_dir, epsilon, tol);
    std::vector<TripleCoords> out;
    out.reserve(static_cast<size_t>(f.n_hat));
    for (int z = 1; z <= f.n_hat; ++z)
        out.push_back(f.triple(z, azimuth_at(azimuth, z, f.n_hat)));
    return out;
}

long long snowflake_edge_length(int universe_size, int collection_size, int floor_k,
                                int parent_depth) {
    long long four = 1ll << (2 * (floor_k - parent_depth + 2));
    return 10ll * (universe_size + collection_size) + four;
}

namespace {

Vec3 rot_xy(const Vec3& v, double angle) {
    double ca = std::cos(angle), sa = std::sin(angle);
    return {ca * v.x - sa * v.y, sa * v.x + ca * v.y, v.z};
}

// Children sit at +-30 degrees about this node's outward axis, and each
// child's own axis is the direction it was reached by, so subtrees fan
// away from each other. Edge lengths barely decay (the 10(|X|+|C|) term
// dominates), so keeping the axes rotating is what prevents sibling
// branches from folding back across one another.
void expand_snow_node(SnowflakeTree& snow, std::vector<Vec3>& axis_of, int universe_size,
                      int collection_size, int ni) {
    SnowNode parent = snow.nodes[static_cast<size_t>(ni)];
    double len = static_cast<double>(
        snowflake_edge_length(universe_size, collection_size, snow.floor_k, parent.depth));
    Vec3 axis = axis_of[static_cast<size_t>(ni)];
    for (int side = 0; side < 2; ++side) {
        double ang = (side == 0 ? 1.0 : -1.0) * M_PI / 6.0;
        Vec3 dir = rot_xy(axis, ang);
        SnowNode child;
        child.tree = parent.tree;
        child.depth = parent.depth + 1;
        child.index = 2 * parent.index - 1 + side;
        child.parent = ni;
        child.pos = parent.pos + dir * len;
        snow.nodes.push_back(child);
        axis_of.push_back(dir);
        snow.nodes[static_cast<size_t>(ni)].children[static_cast<size_t>(side)] =
            static_cast<int>(snow.nodes.size()) - 1;
    }
}

} // namespace

SnowflakeTree plan_snowflake(int universe_size, int collection_size, const Vec3& center,
                             double z_top) {
    if (universe_size < 6 || universe_size % 3 != 0)
        throw std::invalid_argument("snowflake needs |X| >= 6 divisible by 3");
    SnowflakeTree snow;
    std::vector<Vec3> axis_of;
    int fk = 0;
    while (3ll * (1ll << (fk + 1)) <= universe_size) ++fk;
    snow.floor_k = fk;
    snow.replacements = static_cast<int>((universe_size - 3ll * (1ll << fk)) / 3);

    double circum = 1.0 / std::sqrt(3.0);
    for (int t = 0; t < 3; ++t) {
        double ang = M_PI / 2.0 + t * 2.0 * M_PI / 3.0;
        Vec3 axis{std::cos(ang), std::sin(ang), 0.0};
        SnowNode root;
        root.tree = t + 1;
        root.depth = 0;
        root.index = 1;
        root.pos = Vec3{center.x, center.y, z_top} + axis * circum;
        snow.nodes.push_back(root);
        axis_of.push_back(axis);
    }
    std::vector<int> frontier{0, 1, 2};
    for (int depth = 0; depth < fk; ++depth) {
        std::vector<int> next;
        for (int ni : frontier) {
            expand_snow_node(snow, axis_of, universe_size, collection_size, ni);
            next.push_back(snow.nodes[static_cast<size_t>(ni)].children[0]);
            next.push_back(snow.nodes[static_cast<size_t>(ni)].children[1]);
        }
        frontier = next;
    }
    for (int ni : frontier) snow.nodes[static_cast<size_t>(ni)].is_leaf = true;

    // replaced leaves become depth-2 gadget roots; gadget subtrees are
    // nearly as wide as the leaf spacing, so the replacements go to the
    // outermost leaves, round-robin across the three trees
    std::array<std::vector<int>, 3> by_tree;
    for (int ni : frontier)
        by_tree[static_cast<size_t>(snow.nodes[static_cast<size_t>(ni)].tree - 1)].push_back(ni);
    for (auto& leaves : by_tree)
        std::stable_sort(leaves.begin(), leaves.end(), [&](int a, int b) {
            const Vec3& pa = snow.nodes[static_cast<size_t>(a)].pos;
            const Vec3& pb = snow.nodes[static_cast<size_t>(b)].pos;
            double ra = (pa - center).dot(pa - center);
            double rb = (pb - center).dot(pb - center);
            return ra > rb;
        });
    std::vector<int> replace_order;
    for (size_t k = 0; static_cast<int>(replace_order.size()) < snow.replacements; ++k) {
        auto& leaves = by_tree[k % 3];
        if (!leaves.empty()) {
            replace_order.push_back(leaves.front());
            leaves.erase(leaves.begin());
        }
    }
    for (int ni : replace_order) {
        snow.nodes[static_cast<size_t>(ni)].is_leaf = false;
        expand_snow_node(snow, axis_of, universe_size, collection_size, ni);
        for (int child : snow.nodes[static_cast<size_t>(ni)].children) {
            expand_snow_node(snow, axis_of, universe_size, collection_size, child);
            for (int grand : snow.nodes[static_cast<size_t>(child)].children)
                snow.nodes[static_cast<size_t>(grand)].is_leaf = true;
        }
    }
    for (size_t ni = 0; ni < snow.nodes.size(); ++ni)
        if (snow.nodes[ni].is_leaf) snow.leaves.push_back(static_cast<int>(ni));
    return snow;
}

namespace {

struct PlannedChain {
    std::string edge_id;
    Layer layer;
    ChainRole role;
    int from_id, to_id;
    Vec3 bend_dir;
    int set_index = -1, element = -1, parent_node = -1, child_node = -1;
};

struct Builder {
    const X3CInstance& inst;
    OrthogonalDrawing drawing;
    double epsilon;
    uint64_t seed;
    Tolerance tol;

    Game game;
    ReductionArtifacts art;
    std::vector<PlannedChain> planned;
    std::vector<ArcFrame> frames;
    std::vector<ChainAzimuth> azimuths;
    int m, q;
    double unit;

    Builder(const X3CInstance& in, OrthogonalDrawing dr, double eps, uint64_t sd)
        : inst(in), drawing(std::move(dr)), epsilon(eps), seed(sd) {
        m = inst.universe_size;
        q = static_cast<int>(inst.sets.size());
        unit = drawing.unit;
    }

    int add_agent(const std::string& label, AgentKind kind, const Vec3& pos) {
        Agent a;
        a.id = game.agent_count();
        a.label = label;
        a.kind = kind;
        a.pos = pos;
        game.agents.push_back(std::move(a));
        return game.agent_count() - 1;
    }

    Vec3 grid_pos(int vertex) const {
        const GridPoint& p = drawing.coords[static_cast<size_t>(vertex)];
        return {unit * p.x, unit * p.y, 0.0};
    }

    // -------- bottom layer --------

    struct BottomEdge {
        int element;   // 1-based
        int set_index; // 0-based
        std::optional<Vec3> bend_pos;
        Vec3 set_dir;  // unit xy direction the edge leaves the set vertex
    };
    std::vector<BottomEdge> bottom_edges;            // aligned with drawing.edges
    std::map<int, std::vector<Vec3>> element_dirs;   // element -> grid departure dirs

    void plan_bottom() {
        bottom_edges.resize(drawing.edges.size());
        for (size_t ei = 0; ei < drawing.edges.size(); ++ei) {
            const auto& de = drawing.edges[ei];
            int uv = std::min(de.a, de.b), wv = std::max(de.a, de.b);
            BottomEdge be;
            be.element = uv + 1;
            be.set_index = wv - m;
            if (de.bend) be.bend_pos = Vec3{unit * de.bend->x, unit * de.bend->y, 0.0};
            // direction of the segment leaving the set vertex
            GridPoint wp = drawing.coords[static_cast<size_t>(wv)];
            GridPoint toward = de.bend ? *de.bend : drawing.coords[static_cast<size_t>(uv)];
            int dx = (toward.x > wp.x) - (toward.x < wp.x);
            int dy = (toward.y > wp.y) - (toward.y < wp.y);
            be.set_dir = {static_cast<double>(dx), static_cast<double>(dy), 0.0};
            bottom_edges[ei] = be;

            GridPoint up = drawing.coords[static_cast<size_t>(uv)];
            GridPoint from_u = de.bend ? *de.bend : wp;
            int ex = (from_u.x > up.x) - (from_u.x < up.x);
            int ey = (from_u.y > up.y) - (from_u.y < up.y);
            element_dirs[be.element].push_back({static_cast<double>(ex), static_cast<double>(ey), 0.0});
        }

        for (int i = 1; i <= m; ++i)
            art.element_agent[i] = add_agent("u_" + std::to_string(i), AgentKind::element,
                                             grid_pos(i - 1));

        for (size_t ei = 0; ei < drawing.edges.size(); ++ei) {
            const auto& be = bottom_edges[ei];
            if (!be.bend_pos) continue;
            std::string label = "b_" + std::to_string(be.set_index + 1) + "^" +
                                std::to_string(be.element);
            art.bend_agent[{be.set_index, be.element}] =
                add_agent(label, AgentKind::bend, *be.bend_pos);
        }

        // set-vertex gadgets: the three departure directions contain one
        // full axis (the two lateral agents at +-1/2) and one lone apex
        // direction (agent at sqrt(3)/2)
        for (int j = 0; j < q; ++j) {
            int wv = m + j;
            Vec3 wpos = grid_pos(wv);
            std::vector<size_t> incident;
            for (size_t ei = 0; ei < drawing.edges.size(); ++ei)
                if (bottom_edges[ei].set_index == j) incident.push_back(ei);
            if (incident.size() != 3)
                throw std::runtime_error("set vertex with degree != 3 in the drawing");
            int apex = -1;
            for (size_t a = 0; a < 3; ++a) {
                bool has_opposite = false;
                for (size_t b = 0; b < 3; ++b)
                    if (a != b && bottom_edges[incident[a]].set_dir.dot(
                                      bottom_edges[incident[b]].set_dir) < -0.5)
                        has_opposite = true;
                if (!has_opposite) apex = static_cast<int>(a);
            }
            if (apex < 0) throw std::runtime_error("set vertex without a lone departure direction");
            std::array<int, 3> ids{-1, -1, -1};
            for (size_t a = 0; a < 3; ++a) {
                const auto& be = bottom_edges[incident[a]];
                double off = (static_cast<int>(a) == apex) ? std::sqrt(3.0) / 2.0 : 0.5;
                Vec3 pos = wpos + be.set_dir * off;
                std::string label = "w_" + std::to_string(j + 1) + "^" +
                                    std::to_string(be.element);
                int id = add_agent(label, AgentKind::set_agent, pos);
                // order ids like the elements of the set
                const auto& s = inst.sets[static_cast<size_t>(j)];
                for (size_t t = 0; t < 3; ++t)
                    if (s[t] == be.element) ids[t] = id;
            }
            art.set_triangle[j] = ids;
        }

        // chains along the drawing segments, oriented element -> set
        for (size_t ei = 0; ei < drawing.edges.size(); ++ei) {
            const auto& be = bottom_edges[ei];
            int i = be.element, j = be.set_index;
            int u_id = art.element_agent[i];
            const auto& s = inst.sets[static_cast<size_t>(j)];
            int slot = static_cast<int>(std::find(s.begin(), s.end(), i) - s.begin());
            int w_id = art.set_triangle[j][static_cast<size_t>(slot)];
            std::string ulabel = game.agents[static_cast<size_t>(u_id)].label;
            std::string wlabel = game.agents[static_cast<size_t>(w_id)].label;
            if (be.bend_pos) {
                int b_id = art.bend_agent[{j, i}];
                std::string blabel = game.agents[static_cast<size_t>(b_id)].label;
                planned.push_back({ulabel + "->" + blabel, Layer::bottom, ChainRole::bottom_u_out,
                                   u_id, b_id, {0, 0, -1}, j, i, -1, -1});
                planned.push_back({blabel + "->" + wlabel, Layer::bottom, ChainRole::bottom_to_set,
                                   b_id, w_id, {0, 0, -1}, j, i, -1, -1});
            } else {
                planned.push_back({ulabel + "->" + wlabel, Layer::bottom, ChainRole::bottom_u_out,
                                   u_id, w_id, {0, 0, -1}, j, i, -1, -1});
            }
        }
    }

    // -------- top layer --------

    double z_top = 0.0;
    Vec3 top_center;

    void plan_top_structure() {
        z_top = 10.0 * m + 10.0;
        int minx = INT32_MAX, maxx = INT32_MIN, miny = INT32_MAX, maxy = INT32_MIN;
        for (const auto& p : drawing.coords) {
            minx = std::min(minx, p.x);
            maxx = std::max(maxx, p.x);
            miny = std::min(miny, p.y);
            maxy = std::max(maxy, p.y);
        }
        top_center = {unit * 0.5 * (minx + maxx), unit * 0.5 * (miny + maxy), z_top};
        art.snowflake = plan_snowflake(m, q, top_center, z_top);
        art.floor_k = art.snowflake.floor_k;
        art.z_top = z_top;
        if (static_cast<int>(art.snowflake.leaves.size()) != m)
            throw std::runtime_error("snowflake leaf count mismatch");
    }

    // Leaf l_i serves element u_i; which leaf carries which label is free.
    // The crossover chain of element i runs at height 10i and sags by up to
    // ~0.61*sqrt(L), so a bad pairing sends it through another element's
    // riser column or down into the bottom layer. Conflicts are counted
    // along the exact chain arc and the pairing solved as an assignment
    // problem; squared path length breaks ties.
    double crossover_conflicts(int element, const Vec3& leaf_pos) const {
        Vec3 upos = grid_pos(element - 1);
        double h = 10.0 * element;
        Vec3 a{upos.x, upos.y, h};
        Vec3 b{leaf_pos.x, leaf_pos.y, h};
        double L = distance(a, b);
        if (L < 1.0) return 1e9; // degenerate pairing
        Tolerance tol;
        ArcFrame f = make_frame(a, b, {0, 0, -1}, epsilon, tol);

        double conflicts = 0.0;
        // the riser of element i bends toward (u_i - leaf) in the plane; if
        // that leans along one of the element's grid chains, the low riser
        // triples sit over that chain's pair circle and no azimuth clears
        // unit distance any more
        Vec3 bhat = (a - b) / L;
        if (auto it = element_dirs.find(element); it != element_dirs.end())
            for (const Vec3& dir : it->second)
                if (bhat.dot(dir) > 0.82) conflicts += 25.0;

        int minx = INT32_MAX, maxx = INT32_MIN, miny = INT32_MAX, maxy = INT32_MIN;
        for (const auto& p : drawing.coords) {
            minx = std::min(minx, p.x);
            maxx = std::max(maxx, p.x);
            miny = std::min(miny, p.y);
            maxy = std::max(maxy, p.y);
        }
        const double pad = 6.0;
        double bx0 = unit * minx - pad, bx1 = unit * maxx + pad;
        double by0 = unit * miny - pad, by1 = unit * maxy + pad;

        for (int z = 0; z <= f.n_hat; z += 4) {
            Vec3 p = f.gamma(std::min(z, f.n_hat));
            // sagging into the bottom layer
            if (p.z < 2.0 && p.x >= bx0 && p.x <= bx1 && p.y >= by0 && p.y <= by1)
                conflicts += 1.0;
            // passing through another element's riser column
            for (int j = 1; j <= m; ++j) {
                if (j == element) continue;
                Vec3 col = grid_pos(j - 1);
                double dx = p.x - col.x, dy = p.y - col.y;
                if (dx * dx + dy * dy < 8.0 * 8.0 && p.z > -1.0 && p.z < 10.0 * j + 6.0)
                    conflicts += 1.0;
            }
        }
        return conflicts;
    }

    void match_leaves() {
        auto& snow = art.snowflake;
        int n = m;
        std::vector<std::vector<double>> cost(static_cast<size_t>(n),
                                              std::vector<double>(static_cast<size_t>(n)));
        for (int i = 1; i <= n; ++i) {
            Vec3 upos = grid_pos(i - 1);
            for (int t = 0; t < n; ++t) {
                const Vec3& lp = snow.nodes[static_cast<size_t>(snow.leaves[static_cast<size_t>(t)])].pos;
                double dx = upos.x - lp.x, dy = upos.y - lp.y;
                cost[static_cast<size_t>(i) - 1][static_cast<size_t>(t)] =
                    1e7 * crossover_conflicts(i, lp) + (dx * dx + dy * dy);
            }
        }
        // Hungarian algorithm in potentials form, O(n^3)
        std::vector<double> u(static_cast<size_t>(n) + 1), v(static_cast<size_t>(n) + 1);
        std::vector<int> p(static_cast<size_t>(n) + 1), way(static_cast<size_t>(n) + 1);
        for (int i = 1; i <= n; ++i) {
            p[0] = i;
            int j0 = 0;
            std::vector<double> minv(static_cast<size_t>(n) + 1, 1e300);
            std::vector<bool> used(static_cast<size_t>(n) + 1, false);
            do {
                used[static_cast<size_t>(j0)] = true;
                int i0 = p[static_cast<size_t>(j0)], j1 = 0;
                double delta = 1e300;
                for (int j = 1; j <= n; ++j) {
                    if (used[static_cast<size_t>(j)]) continue;
                    double cur = cost[static_cast<size_t>(i0) - 1][static_cast<size_t>(j) - 1] -
                                 u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
                    if (cur < minv[static_cast<size_t>(j)]) {
                        minv[static_cast<size_t>(j)] = cur;
                        way[static_cast<size_t>(j)] = j0;
                    }
                    if (minv[static_cast<size_t>(j)] < delta) {
                        delta = minv[static_cast<size_t>(j)];
                        j1 = j;
                    }
                }
                for (int j = 0; j <= n; ++j) {
                    if (used[static_cast<size_t>(j)]) {
                        u[static_cast<size_t>(p[static_cast<size_t>(j)])] += delta;
                        v[static_cast<size_t>(j)] -= delta;
                    } else {
                        minv[static_cast<size_t>(j)] -= delta;
                    }
                }
                j0 = j1;
            } while (p[static_cast<size_t>(j0)] != 0);
            do {
                int j1 = way[static_cast<size_t>(j0)];
                p[static_cast<size_t>(j0)] = p[static_cast<size_t>(j1)];
                j0 = j1;
            } while (j0);
        }
        for (int t = 1; t <= n; ++t) {
            int element = p[static_cast<size_t>(t)];
            int ni = snow.leaves[static_cast<size_t>(t) - 1];
            snow.nodes[static_cast<size_t>(ni)].leaf_rank = element;
        }
        std::sort(snow.leaves.begin(), snow.leaves.end(), [&](int a, int b) {
            return snow.nodes[static_cast<size_t>(a)].leaf_rank <
                   snow.nodes[static_cast<size_t>(b)].leaf_rank;
        });
    }

    void materialize_top() {
        auto& snow = art.snowflake;
        for (size_t ni = 0; ni < snow.nodes.size(); ++ni) {
            SnowNode& node = snow.nodes[ni];
            std::string base = "d_" + std::to_string(node.tree) + "," +
                               std::to_string(node.depth) + "^" + std::to_string(node.index);
            if (node.is_leaf) {
                node.members[0] = add_agent("l_" + std::to_string(node.leaf_rank),
                                            AgentKind::leaf, node.pos);
                continue;
            }
            bool is_center = node.depth == 0;
            node.members[0] =
                add_agent(base + ",1", is_center ? AgentKind::center : AgentKind::tree, node.pos);
            for (int side = 0; side < 2; ++side) {
                const SnowNode& child = snow.nodes[static_cast<size_t>(node.children[side])];
                Vec3 dir = (child.pos - node.pos).normalized();
                node.members[static_cast<size_t>(side) + 1] =
                    add_agent(base + "," + std::to_string(side + 2), AgentKind::tree,
                              node.pos + dir);
            }
        }
        for (int t = 0; t < 3; ++t)
            snow.center_ids[static_cast<size_t>(t)] = snow.nodes[static_cast<size_t>(t)].members[0];

        for (size_t ni = 0; ni < snow.nodes.size(); ++ni) {
            const SnowNode& node = snow.nodes[ni];
            if (node.is_leaf) continue;
            for (int side = 0; side < 2; ++side) {
                const SnowNode& child = snow.nodes[static_cast<size_t>(node.children[side])];
                int from_id = node.members[static_cast<size_t>(side) + 1];
                int to_id = child.members[0];
                std::string eid = game.agents[static_cast<size_t>(from_id)].label + "->" +
                                  game.agents[static_cast<size_t>(to_id)].label;
                planned.push_back({eid, Layer::top, ChainRole::top_edge, from_id, to_id,
                                   {0, 0, 1}, -1, -1, static_cast<int>(ni), node.children[side]});
            }
        }
    }

    // -------- ascending layer --------

    void plan_ascending() {
        auto& snow = art.snowflake;
        for (int i = 1; i <= m; ++i) {
            const SnowNode& leaf = snow.nodes[static_cast<size_t>(snow.leaves[static_cast<size_t>(i - 1)])];
            if (leaf.leaf_rank != i) throw std::logic_error("leaf ranks out of order");
            int u_id = art.element_agent[i];
            Vec3 upos = game.agents[static_cast<size_t>(u_id)].pos;
            Vec3 lpos = leaf.pos;
            double h = 10.0 * i;
            Vec3 u_prime{upos.x, upos.y, h};
            Vec3 l_prime{lpos.x, lpos.y, h};
            Vec3 horiz = l_prime - u_prime;
            horiz.z = 0.0;
            double horiz_len = horiz.norm();
            Vec3 bhat; // bend of the lower vertical chain: away from the leaf column
            if (horiz_len < 1e-9) {
                bhat = {1, 0, 0}; // leaf directly above the element; any horizontal works
            } else {
                bhat = (u_prime - l_prime) / horiz_len;
            }
            if (horiz_len < 1.0 && horiz_len >= 1e-9)
                throw std::runtime_error("ascending horizontal edge shorter than 1 for element " +
                                         std::to_string(i));

            AscendingPath path;
            path.element = i;
            path.u_prime_id = add_agent("u'_" + std::to_string(i), AgentKind::aux_u, u_prime);
            path.l_prime_id = add_agent("l'_" + std::to_string(i), AgentKind::aux_l, l_prime);
            path.leaf_agent_id = leaf.members[0];
            std::string ui = "u_" + std::to_string(i), upi = "u'_" + std::to_string(i);
            std::string lpi = "l'_" + std::to_string(i), li = "l_" + std::to_string(i);
            path.chain_idx[0] = static_cast<int>(planned.size());
            planned.push_back({ui + "->" + upi, Layer::ascending, ChainRole::asc_up, u_id,
                               path.u_prime_id, bhat, -1, i, -1, -1});
            path.chain_idx[1] = static_cast<int>(planned.size());
            planned.push_back({upi + "->" + lpi, Layer::ascending, ChainRole::asc_across,
                               path.u_prime_id, path.l_prime_id, {0, 0, -1}, -1, i, -1, -1});
            path.chain_idx[2] = static_cast<int>(planned.size());
            planned.push_back({lpi + "->" + li, Layer::ascending, ChainRole::asc_down_leaf,
                               path.l_prime_id, leaf.members[0], bhat * -1.0, -1, i, -1, -1});
            art.ascending.push_back(path);
        }
    }

    // -------- pair azimuth optimization --------

    struct EndRef {
        int chain;
        bool at_from;
        int vertex;
    };

    void optimize_azimuths() {
        frames.reserve(planned.size());
        for (const auto& pc : planned)
            frames.push_back(make_frame(game.pos(pc.from_id), game.pos(pc.to_id), pc.bend_dir,
                                        epsilon, tol));
        azimuths.assign(planned.size(), ChainAzimuth{});
        for (auto& az : azimuths) az.theta_start = az.theta_end = kPi;
        std::vector<ChainAzimuth> best_azimuths;
        double best_worst = -1.0;
        for (int start = 0; start < 4; ++start) {
        int base_phase = start & 1;
        double theta0 = (start & 2) ? 0.0 : kPi;
        for (size_t c = 0; c < planned.size(); ++c) {
            azimuths[c] = ChainAzimuth{};
            azimuths[c].theta_start = azimuths[c].theta_end = theta0;
            azimuths[c].phase = base_phase;
        }

        std::map<int, std::vector<EndRef>> ends_at;
        for (size_t c = 0; c < planned.size(); ++c) {
            ends_at[planned[c].from_id].push_back({static_cast<int>(c), true, planned[c].from_id});
            ends_at[planned[c].to_id].push_back({static_cast<int>(c), false, planned[c].to_id});
        }

        // static cloud per vertex: nearby vertex agents plus the first few
        // skeleton gammas of every chain ending nearby; entries are tagged
        // with their chain so an end never scores against its own chain
        const double kReach = 4.0;
        std::map<int, std::vector<std::pair<int, Vec3>>> static_cloud; // (chain or -1, pos)
        std::map<int, std::vector<int>> cloud_chains; // encoded chain-ends near the vertex
        std::vector<int> vertex_ids;
        for (const auto& [v, ends] : ends_at) vertex_ids.push_back(v);
        std::vector<int> structure_agents;
        for (const auto& a : game.agents) structure_agents.push_back(a.id);

        for (int v : vertex_ids) {
            Vec3 p = game.pos(v);
            auto& cloud = static_cloud[v];
            auto& chains_near = cloud_chains[v];
            for (int o : structure_agents)
                if (o != v && distance(p, game.pos(o)) <= kReach)
                    cloud.push_back({-1, game.pos(o)});
            for (int o : vertex_ids)
                if (distance(p, game.pos(o)) <= kReach)
                    for (const auto& e : ends_at[o])
                        chains_near.push_back(e.chain * 2 + (e.at_from ? 0 : 1));
            for (int enc : chains_near) {
                const ArcFrame& f = frames[static_cast<size_t>(enc / 2)];
                bool at_from = enc % 2 == 0;
                for (int step = 1; step <= 3 && step < f.n_hat; ++step) {
                    Vec3 g = f.gamma(at_from ? step : f.n_hat - step);
                    if (distance(p, g) <= kReach) cloud.push_back({enc / 2, g});
                }
            }
        }

        // realized end pairs, refreshed as angles change
        std::vector<std::array<Vec3, 4>> end_pairs(planned.size() * 2);
        auto realize = [&](int enc) {
            int c = enc / 2;
            bool at_from = enc % 2 == 0;
            const ArcFrame& f = frames[static_cast<size_t>(c)];
            int z1 = at_from ? 1 : f.n_hat;
            int z2 = at_from ? std::min(2, f.n_hat) : std::max(1, f.n_hat - 1);
            auto t1 = f.triple(z1, azimuth_at(azimuths[static_cast<size_t>(c)], z1, f.n_hat));
            auto t2 = f.triple(z2, azimuth_at(azimuths[static_cast<size_t>(c)], z2, f.n_hat));
            end_pairs[static_cast<size_t>(enc)] = {t1.alpha, t1.beta, t2.alpha, t2.beta};
        };
        for (size_t c = 0; c < planned.size(); ++c) {
            realize(static_cast<int>(c) * 2);
            realize(static_cast<int>(c) * 2 + 1);
        }

        auto end_points = [&](const EndRef& e, double theta) {
            const ArcFrame& f = frames[static_cast<size_t>(e.chain)];
            ChainAzimuth trial = azimuths[static_cast<size_t>(e.chain)];
            (e.at_from ? trial.theta_start : trial.theta_end) = theta;
            int z1 = e.at_from ? 1 : f.n_hat;
            int z2 = e.at_from ? std::min(2, f.n_hat) : std::max(1, f.n_hat - 1);
            auto t1 = f.triple(z1, azimuth_at(trial, z1, f.n_hat));
            auto t2 = f.triple(z2, azimuth_at(trial, z2, f.n_hat));
            return std::array<Vec3, 4>{t1.alpha, t1.beta, t2.alpha, t2.beta};
        };

        // min distance from this end's pairs (at trial angle theta) to the
        // static cloud and the other ends' realized pairs. During a joint
        // move the partner's realized pairs are stale and get replaced by
        // an explicit mutual term, so only the dynamic entries of
        // `exclude` are skipped; its fixed gamma skeleton still counts.
        auto end_score_ex = [&](const EndRef& e, double theta, int exclude, int exclude2 = -1) {
            auto mine = end_points(e, theta);
            double score = 1e18;
            for (const auto& [tag, pt] : static_cloud[e.vertex]) {
                if (tag == e.chain) continue;
                for (const Vec3& me : mine) score = std::min(score, distance(me, pt));
            }
            for (int other_enc : cloud_chains[e.vertex]) {
                int oc = other_enc / 2;
                if (oc == e.chain || oc == exclude || oc == exclude2) continue;
                for (const Vec3& pt : end_pairs[static_cast<size_t>(other_enc)])
                    for (const Vec3& me : mine) score = std::min(score, distance(me, pt));
            }
            return score;
        };
        auto end_score = [&](const EndRef& e, double theta) { return end_score_ex(e, theta, -1); };

        const int kCandidates = 48;
        for (int sweep = 0; sweep < 5; ++sweep) {
            for (int v : vertex_ids) {
                for (const auto& e : ends_at[v]) {
                    int enc = e.chain * 2 + (e.at_from ? 0 : 1);
                    double best_theta = e.at_from ? azimuths[static_cast<size_t>(e.chain)].theta_start
                                                  : azimuths[static_cast<size_t>(e.chain)].theta_end;
                    double best_score = end_score(e, best_theta);
                    for (int k = 0; k < kCandidates; ++k) {
                        double theta = -kPi + (2.0 * kPi * k) / kCandidates;
                        double score = end_score(e, theta);
                        if (score > best_score + 1e-12) {
                            best_score = score;
                            best_theta = theta;
                        }
                    }
                    // refine around the winning grid angle
                    double step = 2.0 * kPi / kCandidates;
                    for (int r = 0; r < 4; ++r) {
                        step *= 0.5;
                        for (double theta : {best_theta - step, best_theta + step}) {
                            double score = end_score(e, theta);
                            if (score > best_score + 1e-12) {
                                best_score = score;
                                best_theta = theta;
                            }
                        }
                    }
                    (e.at_from ? azimuths[static_cast<size_t>(e.chain)].theta_start
                               : azimuths[static_cast<size_t>(e.chain)].theta_end) = best_theta;
                    realize(enc);
                    realize(e.chain * 2 + (e.at_from ? 1 : 0));
                }
            }
        }

        // the alternation phase decides which side of the base azimuth the
        // end triples take; per chain, keep whichever phase leaves both
        // ends more clearance
        for (size_t c = 0; c < planned.size(); ++c) {
            EndRef ef{static_cast<int>(c), true, planned[c].from_id};
            EndRef et{static_cast<int>(c), false, planned[c].to_id};
            auto chain_score = [&]() {
                return std::min(end_score(ef, azimuths[c].theta_start),
                                end_score(et, azimuths[c].theta_end));
            };
            double before = chain_score();
            azimuths[c].phase ^= 1;
            realize(static_cast<int>(c) * 2);
            realize(static_cast<int>(c) * 2 + 1);
            double after = chain_score();
            if (after <= before + 1e-12) {
                azimuths[c].phase ^= 1;
                realize(static_cast<int>(c) * 2);
                realize(static_cast<int>(c) * 2 + 1);
            }
        }
        // re-run the single-end sweeps so the angles adapt to the phases
        for (int sweep = 0; sweep < 2; ++sweep) {
            for (int v : vertex_ids) {
                for (const auto& e : ends_at[v]) {
                    int enc = e.chain * 2 + (e.at_from ? 0 : 1);
                    double best_theta = e.at_from ? azimuths[static_cast<size_t>(e.chain)].theta_start
                                                  : azimuths[static_cast<size_t>(e.chain)].theta_end;
                    double best_score = end_score(e, best_theta);
                    for (int k = 0; k < kCandidates; ++k) {
                        double theta = -kPi + (2.0 * kPi * k) / kCandidates;
                        double score = end_score(e, theta);
                        if (score > best_score + 1e-12) {
                            best_score = score;
                            best_theta = theta;
                        }
                    }
                    double step = 2.0 * kPi / kCandidates;
                    for (int r = 0; r < 4; ++r) {
                        step *= 0.5;
                        for (double theta : {best_theta - step, best_theta + step}) {
                            double score = end_score(e, theta);
                            if (score > best_score + 1e-12) {
                                best_score = score;
                                best_theta = theta;
                            }
                        }
                    }
                    (e.at_from ? azimuths[static_cast<size_t>(e.chain)].theta_start
                               : azimuths[static_cast<size_t>(e.chain)].theta_end) = best_theta;
                    realize(enc);
                    realize(e.chain * 2 + (e.at_from ? 1 : 0));
                }
            }
        }

        // single-end descent can stall with two ends pinned against each
        // other; joint moves over pairs of ends at a vertex escape that
        auto get_theta = [&](const EndRef& e) {
            return e.at_from ? azimuths[static_cast<size_t>(e.chain)].theta_start
                             : azimuths[static_cast<size_t>(e.chain)].theta_end;
        };
        auto set_theta = [&](const EndRef& e, double theta) {
            (e.at_from ? azimuths[static_cast<size_t>(e.chain)].theta_start
                       : azimuths[static_cast<size_t>(e.chain)].theta_end) = theta;
            realize(e.chain * 2 + (e.at_from ? 0 : 1));
            realize(e.chain * 2 + (e.at_from ? 1 : 0));
        };
        auto mutual = [&](const std::array<Vec3, 4>& a, const std::array<Vec3, 4>& b) {
            double m = 1e18;
            for (const Vec3& x : a)
                for (const Vec3& y : b) m = std::min(m, distance(x, y));
            return m;
        };
        const int kJointGrid = 24;
        for (int round = 0; round < 2; ++round) {
            for (int v : vertex_ids) {
                const auto& ends = ends_at[v];
                for (size_t i = 0; i < ends.size(); ++i)
                    for (size_t j = i + 1; j < ends.size(); ++j) {
                        const EndRef& e1 = ends[i];
                        const EndRef& e2 = ends[j];
                        if (e1.chain == e2.chain) continue;
                        auto jscore = [&](double t1, double t2) {
                            double s = std::min(end_score_ex(e1, t1, e2.chain),
                                                end_score_ex(e2, t2, e1.chain));
                            return std::min(s, mutual(end_points(e1, t1), end_points(e2, t2)));
                        };
                        double cur1 = get_theta(e1), cur2 = get_theta(e2);
                        double best1 = cur1, best2 = cur2;
                        double best = jscore(cur1, cur2);
                        for (int a = 0; a < kJointGrid; ++a)
                            for (int b = 0; b < kJointGrid; ++b) {
                                double t1 = -kPi + (2.0 * kPi * a) / kJointGrid;
                                double t2 = -kPi + (2.0 * kPi * b) / kJointGrid;
                                double s = jscore(t1, t2);
                                if (s > best + 1e-12) {
                                    best = s;
                                    best1 = t1;
                                    best2 = t2;
                                }
                            }
                        double step = 2.0 * kPi / kJointGrid;
                        for (int r = 0; r < 5; ++r) {
                            step *= 0.5;
                            for (auto [d1, d2] : {std::pair{-step, 0.0}, {step, 0.0}, {0.0, -step},
                                                  {0.0, step}, {-step, -step}, {step, step},
                                                  {-step, step}, {step, -step}}) {
                                double s = jscore(best1 + d1, best2 + d2);
                                if (s > best + 1e-12) {
                                    best = s;
                                    best1 += d1;
                                    best2 += d2;
                                }
                            }
                        }
                        set_theta(e1, best1);
                        set_theta(e2, best2);
                    }
            }
        }

        // vertices still pinned below the interaction margin get a full
        // three-end joint search (the expensive case only arises at
        // degree-3/4 element corners)
        const int kTriGrid = 16;
        for (int round = 0; round < 2; ++round) {
            for (int v : vertex_ids) {
                const auto& ends = ends_at[v];
                if (ends.size() < 3) continue;
                double vscore = 1e18;
                for (const auto& e : ends) vscore = std::min(vscore, end_score(e, get_theta(e)));
                if (vscore >= 1.02) continue;
                for (size_t i = 0; i < ends.size(); ++i)
                    for (size_t j = i + 1; j < ends.size(); ++j)
                        for (size_t k = j + 1; k < ends.size(); ++k) {
                            const EndRef &e1 = ends[i], &e2 = ends[j], &e3 = ends[k];
                            if (e1.chain == e2.chain || e2.chain == e3.chain ||
                                e1.chain == e3.chain)
                                continue;
                            auto jscore3 = [&](double t1, double t2, double t3) {
                                auto p1 = end_points(e1, t1);
                                auto p2 = end_points(e2, t2);
                                auto p3 = end_points(e3, t3);
                                double s = std::min({end_score_ex(e1, t1, e2.chain, e3.chain),
                                                     end_score_ex(e2, t2, e1.chain, e3.chain),
                                                     end_score_ex(e3, t3, e1.chain, e2.chain)});
                                return std::min({s, mutual(p1, p2), mutual(p1, p3), mutual(p2, p3)});
                            };
                            double b1 = get_theta(e1), b2 = get_theta(e2), b3 = get_theta(e3);
                            double best = jscore3(b1, b2, b3);
                            for (int a = 0; a < kTriGrid; ++a)
                                for (int b = 0; b < kTriGrid; ++b)
                                    for (int c = 0; c < kTriGrid; ++c) {
                                        double t1 = -kPi + (2.0 * kPi * a) / kTriGrid;
                                        double t2 = -kPi + (2.0 * kPi * b) / kTriGrid;
                                        double t3 = -kPi + (2.0 * kPi * c) / kTriGrid;
                                        double s = jscore3(t1, t2, t3);
                                        if (s > best + 1e-12) {
                                            best = s;
                                            b1 = t1;
                                            b2 = t2;
                                            b3 = t3;
                                        }
                                    }
                            double step = 2.0 * kPi / kTriGrid;
                            for (int r = 0; r < 6; ++r) {
                                step *= 0.5;
                                bool improved = true;
                                while (improved) {
                                    improved = false;
                                    for (int axis = 0; axis < 3; ++axis)
                                        for (double sgn : {-1.0, 1.0}) {
                                            double t1 = b1 + (axis == 0 ? sgn * step : 0.0);
                                            double t2 = b2 + (axis == 1 ? sgn * step : 0.0);
                                            double t3 = b3 + (axis == 2 ? sgn * step : 0.0);
                                            double s = jscore3(t1, t2, t3);
                                            if (s > best + 1e-12) {
                                                best = s;
                                                b1 = t1;
                                                b2 = t2;
                                                b3 = t3;
                                                improved = true;
                                            }
                                        }
                                }
                            }
                            set_theta(e1, b1);
                            set_theta(e2, b2);
                            set_theta(e3, b3);
                        }
            }
        }

        double worst = 1e18;
        for (int v : vertex_ids)
            for (const auto& e : ends_at[v]) worst = std::min(worst, end_score(e, get_theta(e)));
        if (worst > best_worst) {
            best_worst = worst;
            best_azimuths = azimuths;
        }
        } // multi-start
        azimuths = best_azimuths;
    }

    // -------- chain materialization --------

    void materialize_chains() {
        for (size_t c = 0; c < planned.size(); ++c) {
            const PlannedChain& pc = planned[c];
            const ArcFrame& f = frames[c];
            Chain chain;
            chain.edge_id = pc.edge_id;
            chain.layer = pc.layer;
            chain.role = pc.role;
            chain.from_id = pc.from_id;
            chain.to_id = pc.to_id;
            chain.n_hat = f.n_hat;
            chain.set_index = pc.set_index;
            chain.element = pc.element;
            chain.parent_node = pc.parent_node;
            chain.child_node = pc.child_node;
            long long created = 0;
            for (int z = 1; z <= f.n_hat; ++z) {
                auto t = f.triple(z, azimuth_at(azimuths[c], z, f.n_hat));
                std::string zs = "[" + pc.edge_id + "][" + std::to_string(z) + "]";
                chain.alphas.push_back(add_agent("alpha" + zs, AgentKind::alpha, t.alpha));
                chain.betas.push_back(add_agent("beta" + zs, AgentKind::beta, t.beta));
                created += 2;
                if (z < f.n_hat) {
                    chain.gammas.push_back(add_agent("gamma" + zs, AgentKind::gamma, t.gamma));
                    created += 1;
                } else {
                    chain.gammas.push_back(pc.to_id);
                }
            }
            switch (pc.layer) {
                case Layer::bottom: art.counts.bottom += created; break;
                case Layer::top: art.counts.top += created; break;
                case Layer::ascending: art.counts.ascending += created; break;
            }
            art.chains.push_back(std::move(chain));
        }
    }

    ReductionResult build() {
        game.room_size = 3;
        game.epsilon = epsilon;
        art.instance = inst;
        art.drawing = drawing;
        art.epsilon = epsilon;

        plan_bottom();
        long long bottom_vertices = game.agent_count();
        plan_top_structure();
        match_leaves();
        materialize_top();
        long long top_vertices = game.agent_count() - bottom_vertices;
        plan_ascending();
        long long asc_vertices = game.agent_count() - bottom_vertices - top_vertices;
        art.counts.bottom = bottom_vertices;
        art.counts.top = top_vertices;
        art.counts.ascending = asc_vertices;

        optimize_azimuths();
        materialize_chains();

        if (game.agent_count() % 3 != 0)
            throw std::logic_error("construction produced agent count not divisible by 3");
        game.check();
        return {std::move(game), std::move(art)};
    }
};

} // namespace

ReductionResult reduce_with_drawing(const X3CInstance& inst, const OrthogonalDrawing& drawing,
                                    double epsilon, uint64_t seed) {
    auto rep = validate_pcx3c(inst);
    if (!rep.is_pcx3c()) {
        std::string why = rep.notes.empty() ? "instance is not planar-cubic X3C" : rep.notes.front();
        throw std::invalid_argument("reduce: " + why);
    }
    auto ag = associated_graph(inst);
    auto drep = validate_drawing(ag.graph, drawing);
    if (!drep.ok)
        throw std::invalid_argument("reduce: drawing invalid: " + drep.violations.front());
    Builder b(inst, drawing, epsilon, seed);
    return b.build();
}

ReductionResult reduce(const X3CInstance& inst, double epsilon, uint64_t seed) {
    auto rep = validate_pcx3c(inst);
    if (!rep.is_pcx3c()) {
        std::string why = rep.notes.empty() ? "instance is not planar-cubic X3C" : rep.notes.front();
        throw std::invalid_argument("reduce: " + why);
    }
    auto ag = associated_graph(inst);
    OrthogonalDrawing drawing = embed_orthogonal(ag.graph, seed);
    return reduce_with_drawing(inst, drawing, epsilon, seed);
}

} // namespace esr
