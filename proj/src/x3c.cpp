#include "esr/x3c.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace esr {

void X3CInstance::normalize() {
    for (auto& s : sets) std::sort(s.begin(), s.end());
}

X3CReport validate_pcx3c(const X3CInstance& inst) {
    X3CReport rep;
    rep.is_x3c = true;
    if (inst.universe_size <= 0 || inst.universe_size % 3 != 0) {
        rep.is_x3c = false;
        rep.notes.push_back("universe size must be a positive multiple of 3");
    }
    for (const auto& s : inst.sets) {
        std::set<int> distinct(s.begin(), s.end());
        if (distinct.size() != 3 || *distinct.begin() < 1 || *distinct.rbegin() > inst.universe_size) {
            rep.is_x3c = false;
            rep.notes.push_back("set is not a 3-element subset of the universe");
            break;
        }
    }
    std::vector<int> occur(static_cast<size_t>(std::max(inst.universe_size, 0)) + 1, 0);
    if (rep.is_x3c) {
        for (const auto& s : inst.sets)
            for (int e : s) occur[static_cast<size_t>(e)]++;
        rep.is_cubic = true;
        for (int e = 1; e <= inst.universe_size; ++e)
            if (occur[static_cast<size_t>(e)] != 3) {
                rep.is_cubic = false;
                rep.notes.push_back("element " + std::to_string(e) + " occurs in " +
                                    std::to_string(occur[static_cast<size_t>(e)]) +
                                    " sets (expected 3)");
                break;
            }
        rep.sizes_ok = inst.universe_size >= 6 &&
                       static_cast<int>(inst.sets.size()) == inst.universe_size;
        if (rep.is_cubic && !rep.sizes_ok && static_cast<int>(inst.sets.size()) != inst.universe_size)
            rep.notes.push_back("internally inconsistent: cubicity forces |C| = |X|");
        auto ag = associated_graph(inst);
        rep.is_planar = planarity_test(ag.graph).planar;
        if (!rep.is_planar) rep.notes.push_back("associated graph is not planar");
    }
    return rep;
}

AssociatedGraph associated_graph(const X3CInstance& inst) {
    AssociatedGraph ag;
    ag.element_count = inst.universe_size;
    ag.set_count = static_cast<int>(inst.sets.size());
    ag.graph.n = ag.element_count + ag.set_count;
    for (int j = 0; j < ag.set_count; ++j)
        for (int e : inst.sets[static_cast<size_t>(j)])
            ag.graph.add_edge(ag.element_vertex(e), ag.set_vertex(j));
    return ag;
}

namespace {

struct CoverSearch {
    const X3CInstance& inst;
    long long limit;
    std::vector<std::vector<int>> containing; // element -> set indices
    std::vector<bool> covered;
    std::vector<bool> set_alive;
    std::vector<int> chosen;
    std::vector<CoverSolution> solutions;
    int uncovered_count;

    explicit CoverSearch(const X3CInstance& in, long long lim)
        : inst(in), limit(lim), containing(static_cast<size_t>(in.universe_size) + 1),
          covered(static_cast<size_t>(in.universe_size) + 1, false),
          set_alive(in.sets.size(), true), uncovered_count(in.universe_size) {
        for (size_t j = 0; j < in.sets.size(); ++j)
            for (int e : in.sets[j]) containing[static_cast<size_t>(e)].push_back(static_cast<int>(j));
    }

    bool done() const { return limit > 0 && static_cast<long long>(solutions.size()) >= limit; }

    void run() { recurse(); }

    void recurse() {
        if (done()) return;
        if (uncovered_count == 0) {
            CoverSolution sol = chosen;
            std::sort(sol.begin(), sol.end());
            solutions.push_back(std::move(sol));
            return;
        }
        // branch on the uncovered element with the fewest live sets
        int pivot = -1;
        size_t fewest = SIZE_MAX;
        for (int e = 1; e <= inst.universe_size; ++e) {
            if (covered[static_cast<size_t>(e)]) continue;
            size_t alive = 0;
            for (int j : containing[static_cast<size_t>(e)])
                if (set_alive[static_cast<size_t>(j)]) ++alive;
            if (alive < fewest) {
                fewest = alive;
                pivot = e;
            }
            if (fewest == 0) break;
        }
        if (fewest == 0) return; // dead end
        for (int j : containing[static_cast<size_t>(pivot)]) {
            if (!set_alive[static_cast<size_t>(j)]) continue;
            choose(j);
            recurse();
            unchoose(j);
            if (done()) return;
        }
    }

    std::vector<int> disabled_stack;

    void choose(int j) {
        chosen.push_back(j);
        int disabled = 0;
        for (int e : inst.sets[static_cast<size_t>(j)]) {
            covered[static_cast<size_t>(e)] = true;
            --uncovered_count;
            for (int k : containing[static_cast<size_t>(e)])
                if (set_alive[static_cast<size_t>(k)]) {
                    set_alive[static_cast<size_t>(k)] = false;
                    disabled_stack.push_back(k);
                    ++disabled;
                }
        }
        disabled_stack.push_back(disabled); // frame marker
    }

    void unchoose(int j) {
        int disabled = disabled_stack.back();
        disabled_stack.pop_back();
        for (int i = 0; i < disabled; ++i) {
            set_alive[static_cast<size_t>(disabled_stack.back())] = true;
            disabled_stack.pop_back();
        }
        for (int e : inst.sets[static_cast<size_t>(j)]) {
            covered[static_cast<size_t>(e)] = false;
            ++uncovered_count;
        }
        chosen.pop_back();
    }
};

} // namespace

std::vector<CoverSolution> solve_exact_cover(const X3CInstance& inst, long long limit) {
    for (const auto& s : inst.sets) {
        std::set<int> d(s.begin(), s.end());
        if (d.size() != 3 || *d.begin() < 1 || *d.rbegin() > inst.universe_size)
            throw std::invalid_argument("malformed 3-set in instance");
    }
    if (inst.universe_size % 3 != 0) return {};
    CoverSearch search(inst, limit);
    search.run();
    std::sort(search.solutions.begin(), search.solutions.end());
    return search.solutions;
}

bool is_cover_solution(const X3CInstance& inst, const CoverSolution& sol) {
    std::vector<int> hit(static_cast<size_t>(inst.universe_size) + 1, 0);
    for (int j : sol) {
        if (j < 0 || j >= static_cast<int>(inst.sets.size())) return false;
        for (int e : inst.sets[static_cast<size_t>(j)]) hit[static_cast<size_t>(e)]++;
    }
    for (int e = 1; e <= inst.universe_size; ++e)
        if (hit[static_cast<size_t>(e)] != 1) return false;
    return true;
}

X3CInstance perturb(const X3CInstance& inst, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<int> relabel(static_cast<size_t>(inst.universe_size) + 1);
    std::iota(relabel.begin(), relabel.end(), 0);
    std::shuffle(relabel.begin() + 1, relabel.end(), rng);
    X3CInstance out;
    out.universe_size = inst.universe_size;
    out.sets = inst.sets;
    for (auto& s : out.sets)
        for (int& e : s) e = relabel[static_cast<size_t>(e)];
    std::shuffle(out.sets.begin(), out.sets.end(), rng);
    out.normalize();
    return out;
}

} // namespace esr
