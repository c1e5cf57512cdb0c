#include "esr/planarity.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

namespace esr {

void SimpleGraph::add_edge(int a, int b) {
    if (a == b) throw std::invalid_argument("self loop");
    if (a > b) std::swap(a, b);
    edges.emplace_back(a, b);
}

std::vector<std::vector<int>> SimpleGraph::adjacency() const {
    std::vector<std::vector<int>> adj(static_cast<size_t>(n));
    for (auto [a, b] : edges) {
        adj[static_cast<size_t>(a)].push_back(b);
        adj[static_cast<size_t>(b)].push_back(a);
    }
    return adj;
}

void SimpleGraph::check() const {
    std::set<std::pair<int, int>> seen;
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || a >= n || b >= n) throw std::invalid_argument("edge endpoint out of range");
        if (a == b) throw std::invalid_argument("self loop");
        auto e = std::minmax(a, b);
        if (!seen.insert({e.first, e.second}).second) throw std::invalid_argument("duplicate edge");
    }
}

namespace {

using Edge = std::pair<int, int>;

Edge canon(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

// Demoucron-Malgrange-Pertuiset planarity on one biconnected component.
// Vertices are the component's original ids; `edges` its edge list.
bool dmp_planar(const std::vector<int>& vertices, const std::vector<Edge>& edges) {
    if (edges.size() < 9 || vertices.size() < 5) return true;

    std::map<int, std::vector<int>> adj;
    for (int v : vertices) adj[v];
    for (auto [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& [v, nb] : adj) std::sort(nb.begin(), nb.end());

    // initial cycle: DFS keeping the explicit path so a back edge to an
    // on-path vertex yields a genuine cycle
    std::vector<int> cycle;
    {
        struct Frame {
            int v, parent;
            size_t i = 0;
        };
        std::set<int> visited{vertices.front()};
        std::set<int> on_path{vertices.front()};
        std::vector<Frame> frames{{vertices.front(), -1}};
        while (!frames.empty() && cycle.empty()) {
            Frame& f = frames.back();
            auto& nb = adj[f.v];
            if (f.i >= nb.size()) {
                on_path.erase(f.v);
                frames.pop_back();
                continue;
            }
            int w = nb[f.i++];
            if (w == f.parent) continue;
            if (on_path.count(w)) {
                for (auto it = frames.rbegin(); it != frames.rend(); ++it) {
                    cycle.push_back(it->v);
                    if (it->v == w) break;
                }
                break;
            }
            if (!visited.count(w)) {
                visited.insert(w);
                on_path.insert(w);
                frames.push_back({w, f.v});
            }
        }
    }
    if (cycle.empty()) return true; // acyclic (cannot happen in a 2-connected block)

    std::vector<std::vector<int>> faces{cycle, {cycle.rbegin(), cycle.rend()}};
    std::set<Edge> embedded_edges;
    std::set<int> embedded_vertices(cycle.begin(), cycle.end());
    for (size_t i = 0; i < cycle.size(); ++i)
        embedded_edges.insert(canon(cycle[i], cycle[(i + 1) % cycle.size()]));

    while (embedded_edges.size() < edges.size()) {
        // fragments: single chords, and components of non-embedded vertices
        struct Fragment {
            std::vector<int> attachments;      // embedded vertices
            std::vector<int> interior;         // non-embedded vertices
            std::vector<size_t> admissible;    // face indices
        };
        std::vector<Fragment> fragments;
        for (auto [a, b] : edges) {
            if (embedded_edges.count(canon(a, b))) continue;
            if (embedded_vertices.count(a) && embedded_vertices.count(b)) {
                Fragment f;
                f.attachments = {a, b};
                fragments.push_back(std::move(f));
            }
        }
        std::set<int> assigned;
        for (int v : vertices) {
            if (embedded_vertices.count(v) || assigned.count(v)) continue;
            Fragment f;
            std::queue<int> q;
            q.push(v);
            assigned.insert(v);
            std::set<int> att;
            while (!q.empty()) {
                int x = q.front();
                q.pop();
                f.interior.push_back(x);
                for (int w : adj[x]) {
                    if (embedded_vertices.count(w)) {
                        att.insert(w);
                    } else if (!assigned.count(w)) {
                        assigned.insert(w);
                        q.push(w);
                    }
                }
            }
            f.attachments.assign(att.begin(), att.end());
            fragments.push_back(std::move(f));
        }

        size_t best = fragments.size();
        for (size_t i = 0; i < fragments.size(); ++i) {
            auto& f = fragments[i];
            for (size_t fi = 0; fi < faces.size(); ++fi) {
                std::set<int> fv(faces[fi].begin(), faces[fi].end());
                bool ok = true;
                for (int a : f.attachments)
                    if (!fv.count(a)) {
                        ok = false;
                        break;
                    }
                if (ok) f.admissible.push_back(fi);
            }
            if (f.admissible.empty()) return false; // stuck: nonplanar
            if (best == fragments.size() ||
                f.admissible.size() < fragments[best].admissible.size())
                best = i;
        }

        const Fragment& f = fragments[best];
        // alpha-path between two attachments through the fragment
        std::vector<int> path;
        if (f.interior.empty()) {
            path = {f.attachments[0], f.attachments[1]};
        } else {
            std::set<int> interior(f.interior.begin(), f.interior.end());
            int start = f.attachments.front();
            std::map<int, int> prev;
            std::queue<int> q;
            for (int w : adj[start])
                if (interior.count(w) && !prev.count(w)) {
                    prev[w] = start;
                    q.push(w);
                }
            int goal = -1;
            while (!q.empty() && goal == -1) {
                int x = q.front();
                q.pop();
                for (int w : adj[x]) {
                    if (w != start && embedded_vertices.count(w) &&
                        std::find(f.attachments.begin(), f.attachments.end(), w) !=
                            f.attachments.end()) {
                        prev[w] = x;
                        goal = w;
                        break;
                    }
                    if (interior.count(w) && !prev.count(w)) {
                        prev[w] = x;
                        q.push(w);
                    }
                }
            }
            if (goal == -1) return false; // fragment with a single attachment in a block
            for (int x = goal; x != start; x = prev[x]) path.push_back(x);
            path.push_back(start);
            std::reverse(path.begin(), path.end());
        }

        // split the chosen face along the path
        size_t fi = f.admissible.front();
        std::vector<int> face = faces[fi];
        int a = path.front(), b = path.back();
        size_t ia = std::find(face.begin(), face.end(), a) - face.begin();
        size_t ib = std::find(face.begin(), face.end(), b) - face.begin();
        std::vector<int> f1, f2;
        for (size_t i = ia;; i = (i + 1) % face.size()) {
            f1.push_back(face[i]);
            if (i == ib) break;
        }
        for (size_t i = ib;; i = (i + 1) % face.size()) {
            f2.push_back(face[i]);
            if (i == ia) break;
        }
        for (size_t i = path.size() - 2; i >= 1; --i) f1.push_back(path[i]);
        for (size_t i = 1; i + 1 < path.size(); ++i) f2.push_back(path[i]);
        faces[fi] = f1;
        faces.push_back(f2);

        for (size_t i = 0; i + 1 < path.size(); ++i)
            embedded_edges.insert(canon(path[i], path[i + 1]));
        for (int v : path) embedded_vertices.insert(v);
    }
    return true;
}

// biconnected components via Hopcroft-Tarjan, iterative
std::vector<std::vector<Edge>> biconnected_components(const SimpleGraph& g) {
    auto adj = g.adjacency();
    std::vector<int> num(static_cast<size_t>(g.n), 0), low(static_cast<size_t>(g.n), 0);
    std::vector<std::vector<Edge>> blocks;
    std::vector<Edge> stack;
    int counter = 0;

    struct Frame {
        int v, parent;
        size_t i = 0;
    };
    for (int root = 0; root < g.n; ++root) {
        if (num[static_cast<size_t>(root)]) continue;
        std::vector<Frame> frames{{root, -1}};
        num[static_cast<size_t>(root)] = low[static_cast<size_t>(root)] = ++counter;
        while (!frames.empty()) {
            Frame& f = frames.back();
            auto& nb = adj[static_cast<size_t>(f.v)];
            if (f.i < nb.size()) {
                int w = nb[f.i++];
                if (!num[static_cast<size_t>(w)]) {
                    stack.push_back(canon(f.v, w));
                    num[static_cast<size_t>(w)] = low[static_cast<size_t>(w)] = ++counter;
                    frames.push_back({w, f.v});
                } else if (w != f.parent && num[static_cast<size_t>(w)] < num[static_cast<size_t>(f.v)]) {
                    stack.push_back(canon(f.v, w));
                    low[static_cast<size_t>(f.v)] =
                        std::min(low[static_cast<size_t>(f.v)], num[static_cast<size_t>(w)]);
                }
            } else {
                int v = f.v, parent = f.parent;
                frames.pop_back();
                if (parent != -1) {
                    low[static_cast<size_t>(parent)] =
                        std::min(low[static_cast<size_t>(parent)], low[static_cast<size_t>(v)]);
                    if (low[static_cast<size_t>(v)] >= num[static_cast<size_t>(parent)]) {
                        std::vector<Edge> block;
                        Edge top = canon(parent, v);
                        while (!stack.empty()) {
                            Edge e = stack.back();
                            stack.pop_back();
                            block.push_back(e);
                            if (e == top) break;
                        }
                        if (!block.empty()) blocks.push_back(std::move(block));
                    }
                }
            }
        }
    }
    return blocks;
}

bool planar_decision(const SimpleGraph& g) {
    if (g.n >= 3 && static_cast<long long>(g.edges.size()) > 3ll * g.n - 6) return false;
    for (const auto& block : biconnected_components(g)) {
        std::set<int> vs;
        for (auto [a, b] : block) {
            vs.insert(a);
            vs.insert(b);
        }
        if (!dmp_planar(std::vector<int>(vs.begin(), vs.end()), block)) return false;
    }
    return true;
}

} // namespace

PlanarityResult planarity_test(const SimpleGraph& g) {
    g.check();
    PlanarityResult res;
    if (planar_decision(g)) return res;

    res.planar = false;
    // Edge-minimal nonplanar subgraph: what remains is a subdivision of K5
    // or K3,3 (plus isolated vertices, which we drop).
    SimpleGraph h = g;
    std::sort(h.edges.begin(), h.edges.end());
    for (size_t i = 0; i < h.edges.size();) {
        SimpleGraph trial = h;
        trial.edges.erase(trial.edges.begin() + static_cast<long>(i));
        if (!planar_decision(trial))
            h = trial;
        else
            ++i;
    }
    res.witness_edges = h.edges;
    std::map<int, int> degree;
    for (auto [a, b] : h.edges) {
        degree[a]++;
        degree[b]++;
    }
    int deg3 = 0, deg4 = 0;
    for (auto [v, d] : degree) {
        if (d == 3) ++deg3;
        if (d == 4) ++deg4;
    }
    res.witness_kind = (deg4 == 5) ? "K5" : "K3,3";
    (void)deg3;
    return res;
}

} // namespace esr
