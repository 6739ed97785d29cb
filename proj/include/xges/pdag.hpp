#pragma once

#include "xges/set_ops.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace xges {

/// Status of an ordered node pair (a, b).
enum class EdgeState {
    Absent,
    Undirected,
    TowardB,// a → b
    TowardA,// b → a
};

/// A single-edge update: pair (a, b) transitions from `before` to `after`.
/// These are the atomic graph diffs the candidate-refresh machinery consumes.
struct EdgeChange {
    int a;
    int b;
    EdgeState before;
    EdgeState after;

    EdgeChange reversed_in_time() const { return {a, b, after, before}; }
    bool is_noop() const { return before == after; }
};

/// Partially directed graph over d nodes. Maintains per-node sorted sets of
/// parents, children and (undirected) neighbors, plus the union of all three.
///
/// Invariants: symmetry of the adjacency sets, at most one edge kind per pair,
/// no self loops. Directed-cycle freedom is the caller's responsibility (all
/// mutations here go through CPDAG-preserving operator applications or checked
/// conversions).
class Pdag {
public:
    explicit Pdag(int num_nodes);

    int node_count() const { return d_; }
    int directed_edge_count() const { return num_directed_; }
    int undirected_edge_count() const { return num_undirected_; }
    int skeleton_edge_count() const { return num_directed_ + num_undirected_; }

    const NodeSet &parents(int x) const { return parents_[x]; }
    const NodeSet &children(int x) const { return children_[x]; }
    const NodeSet &neighbors(int x) const { return neighbors_[x]; }
    const NodeSet &adjacent(int x) const { return adjacent_[x]; }

    bool has_directed_edge(int x, int y) const { return children_[x].contains(y); }
    bool has_undirected_edge(int x, int y) const { return neighbors_[x].contains(y); }
    bool is_adjacent(int x, int y) const { return adjacent_[x].contains(y); }
    EdgeState edge_state(int a, int b) const;

    void add_directed_edge(int x, int y);
    void remove_directed_edge(int x, int y);
    void add_undirected_edge(int x, int y);
    void remove_undirected_edge(int x, int y);

    /// Applies a single-edge update. The pair's current state must match
    /// c.before; throws std::logic_error otherwise.
    void apply_change(const EdgeChange &c);

    NodeSet neighbors_adjacent(int y, int x) const {
        return set_intersection(neighbors_[y], adjacent_[x]);
    }
    NodeSet neighbors_not_adjacent(int y, int x) const {
        return set_difference(neighbors_[y], adjacent_[x]);
    }

    bool is_clique(const NodeSet &nodes) const;

    /// Finds a semi-directed path from `from` to `to` (edges undirected or
    /// directed toward `to`) that avoids `blocked`, or nullopt if every such
    /// path is blocked. `ignored_edge`, if set, is a directed edge (u, v) that
    /// may not be traversed. BFS; the returned path is node-minimal in hops.
    std::optional<std::vector<int>>
    find_unblocked_semidirected_path(int from, int to, const NodeSet &blocked,
                                     std::optional<std::pair<int, int>> ignored_edge =
                                             std::nullopt) const;

    /// All triples (x, y, z) with x → y ← z, x < z, and x, z non-adjacent.
    std::vector<std::array<int, 3>> v_structures() const;

    bool is_dag() const { return num_undirected_ == 0 && !has_directed_cycle(); }
    bool has_directed_cycle() const;

    bool operator==(const Pdag &other) const;

    std::string to_text() const;
    static Pdag from_text(const std::string &text);
    nlohmann::json to_json() const;
    static Pdag from_json(const nlohmann::json &j);

    /// Checks the symmetry/exclusivity representation invariants; throws on
    /// violation. Called after mutations in debug builds.
    void check_invariants() const;

private:
    int d_;
    std::vector<NodeSet> parents_;
    std::vector<NodeSet> children_;
    std::vector<NodeSet> neighbors_;
    std::vector<NodeSet> adjacent_;
    int num_directed_ = 0;
    int num_undirected_ = 0;
};

std::ostream &operator<<(std::ostream &os, const Pdag &g);

/// Topological order of a DAG (Kahn, smallest index first). Throws if cyclic.
std::vector<int> topological_order(const Pdag &dag);

/// Canonical CPDAG of the MEC containing `dag`: compelled edges stay directed,
/// reversible edges become undirected. Throws if `dag` is not a DAG.
Pdag dag_to_cpdag(const Pdag &dag);

/// A DAG with the same skeleton and v-structures as `g` that keeps all of g's
/// directed edges (Dor-Tarsi peeling, smallest eligible node first). Throws
/// std::runtime_error if no such extension exists.
Pdag consistent_extension(const Pdag &g);

/// dag_to_cpdag(consistent_extension(g)); idempotent on CPDAGs.
Pdag complete_pdag(const Pdag &g);

/// CPDAG equality; canonical forms are unique per MEC.
bool mec_equal(const Pdag &p, const Pdag &q);

}// namespace xges
