#pragma once

// Brute-force oracles used by the tests: exhaustive enumerations that are
// deliberately independent of the engine's own algorithms.

#include "xges/search.hpp"
#include "xges/simulate.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

namespace xges::testing {

inline std::set<std::pair<int, int>> skeleton_of(const Pdag &g) {
    std::set<std::pair<int, int>> edges;
    for (int i = 0; i < g.node_count(); ++i) {
        for (int j = i + 1; j < g.node_count(); ++j) {
            if (g.is_adjacent(i, j)) { edges.insert({i, j}); }
        }
    }
    return edges;
}

/// All DAGs over the same skeleton as `g` (every orientation of each skeleton
/// edge, acyclic). `g` may be any PDAG.
inline std::vector<Pdag> skeleton_orientations(const Pdag &g) {
    std::set<std::pair<int, int>> skel = skeleton_of(g);
    std::vector<std::pair<int, int>> edges(skel.begin(), skel.end());
    std::vector<Pdag> out;
    Pdag work(g.node_count());
    auto rec = [&](auto &&self, size_t k) -> void {
        if (k == edges.size()) {
            if (!work.has_directed_cycle()) { out.push_back(work); }
            return;
        }
        auto [i, j] = edges[k];
        work.add_directed_edge(i, j);
        self(self, k + 1);
        work.remove_directed_edge(i, j);
        work.add_directed_edge(j, i);
        self(self, k + 1);
        work.remove_directed_edge(j, i);
    };
    rec(rec, 0);
    return out;
}

/// Members of the MEC of a DAG: same skeleton and same v-structures
/// (Verma–Pearl characterization; independent of the compelled-edge labeling).
inline std::vector<Pdag> mec_members(const Pdag &dag) {
    auto target = dag.v_structures();
    std::vector<Pdag> members;
    for (const Pdag &cand: skeleton_orientations(dag)) {
        if (cand.v_structures() == target) { members.push_back(cand); }
    }
    return members;
}

/// Brute-force CPDAG: union of the orientations over all MEC members — a pair
/// directed the same way in every member stays directed, else undirected.
inline Pdag brute_cpdag(const Pdag &dag) {
    std::vector<Pdag> members = mec_members(dag);
    Pdag out(dag.node_count());
    for (auto [i, j]: skeleton_of(dag)) {
        bool to_j = false, to_i = false;
        for (const Pdag &m: members) {
            to_j |= m.has_directed_edge(i, j);
            to_i |= m.has_directed_edge(j, i);
        }
        if (to_j && to_i) {
            out.add_undirected_edge(i, j);
        } else if (to_j) {
            out.add_directed_edge(i, j);
        } else {
            out.add_directed_edge(j, i);
        }
    }
    return out;
}

/// Exhaustive simple-path DFS: is there a semi-directed path from → to whose
/// interior and endpoint nodes avoid `blocked` and that never traverses
/// `ignored_edge` as the directed step (u, v)?
inline bool brute_has_semidirected_path(
        const Pdag &g, int from, int to, const NodeSet &blocked,
        std::optional<std::pair<int, int>> ignored_edge = std::nullopt) {
    if (blocked.contains(from) || blocked.contains(to)) { return false; }
    std::vector<char> on_path(g.node_count(), 0);
    auto rec = [&](auto &&self, int u) -> bool {
        if (u == to) { return true; }
        on_path[u] = 1;
        for (int v: g.neighbors(u)) {
            if (!on_path[v] && !blocked.contains(v) && self(self, v)) { return true; }
        }
        for (int v: g.children(u)) {
            if (on_path[v] || blocked.contains(v)) { continue; }
            if (ignored_edge && ignored_edge->first == u && ignored_edge->second == v) {
                continue;
            }
            if (self(self, v)) { return true; }
        }
        on_path[u] = 0;
        return false;
    };
    return rec(rec, from);
}

inline std::string graph_key(const Pdag &g) { return g.to_text(); }

/// Simulated dataset + scorer inputs for randomized tests.
inline DataSet quick_dataset(int d, double rho, long n, unsigned long long seed) {
    SimConfig cfg;
    cfg.d = d;
    cfg.rho = rho;
    cfg.n = n;
    cfg.seed = seed;
    return sample_data(sample_ground_truth(cfg), n, seed);
}

}// namespace xges::testing
