#pragma once

#include "xges/pdag.hpp"
#include "xges/scorer.hpp"

#include <map>
#include <variant>
#include <vector>

#include "json.hpp"

namespace xges {

/// Insert(x, y, T; E): add x → y, orient t - y as t → y for t ∈ T, complete.
/// E is the frozen effective parent set of y that makes delta graph-independent.
struct InsertOp {
    int x;
    int y;
    NodeSet T;
    NodeSet E;
    double delta;
};

/// Delete(x, y, C; E): remove x → y (or x - y). C is the subset of the common
/// boundary Ne(y) ∩ Ad(x) that keeps its undirected links to y; the complement
/// H gets oriented y → h (and x → h where undirected).
struct DeleteOp {
    int x;
    int y;
    NodeSet C;
    NodeSet E;
    double delta;
};

/// Reverse(x, y, T, E, F): turn the directed edge y → x into x → y (so x
/// becomes a parent of y), orienting t - y as t → y for t ∈ T. F = Pa(x).
struct ReverseOp {
    int x;
    int y;
    NodeSet T;
    NodeSet E;
    NodeSet F;
    double delta;
};

using Operator = std::variant<InsertOp, DeleteOp, ReverseOp>;

double operator_delta(const Operator &op);
nlohmann::json operator_to_json(const Operator &op);

// Heap comparators: order by delta, ties broken by canonical operator order
// (x, y, parameter sets) so equal-delta pops are reproducible.
bool heap_less(const InsertOp &a, const InsertOp &b);
bool heap_less(const DeleteOp &a, const DeleteOp &b);
bool heap_less(const ReverseOp &a, const ReverseOp &b);

/// Records, for operators rejected only by the semi-directed-path condition,
/// the unblocked path that rejected them: each traversed step (u, v) of the
/// path maps to the operator endpoints (x, y). When a later edge update hits
/// a recorded step, those operators are re-enumerated.
class PathStore {
public:
    void record(const std::vector<int> &path, int x, int y);
    /// Operator endpoints whose recorded path traverses (u, v); erases the
    /// consumed bucket.
    std::vector<std::pair<int, int>> take(int u, int v);

private:
    std::map<std::pair<int, int>, std::set<std::pair<int, int>>> by_step_;
};

bool insert_valid(const Pdag &g, const InsertOp &op, PathStore *paths = nullptr);
bool delete_valid(const Pdag &g, const DeleteOp &op);
bool reverse_valid(const Pdag &g, const ReverseOp &op, PathStore *paths = nullptr);

using ForbiddenPairs = std::set<std::pair<int, int>>;// canonical (min, max)

inline bool is_forbidden(const ForbiddenPairs &forbidden, int x, int y) {
    return forbidden.contains({std::min(x, y), std::max(x, y)});
}

/// Enumerates candidate Insert operators with target y: every x not adjacent
/// to y (or just `only_x` if ≥ 0, without the adjacency check — reversal
/// enumeration reuses this with x a child of y), T over clique-compatible
/// subsets of Ne(y) \ Ad(x). The path condition is deliberately not checked
/// here; it is verified lazily before application. Pushes onto the heap in
/// `out`; keeps only positive-delta candidates unless positive_only is false.
void find_inserts_to_y(const Pdag &g, const Scorer &scorer, int y,
                       std::vector<InsertOp> &out, int only_x = -1,
                       bool positive_only = true,
                       const ForbiddenPairs *forbidden = nullptr);

/// Candidate deletes of the edge x → y or x - y (x must be a parent or
/// neighbor of y); C over clique subsets of Ne(y) ∩ Ad(x).
void find_deletes_of_edge(const Pdag &g, const Scorer &scorer, int x, int y,
                          std::vector<DeleteOp> &out, bool nonnegative_only = true);
void find_deletes_to_y(const Pdag &g, const Scorer &scorer, int y,
                       std::vector<DeleteOp> &out, bool nonnegative_only = true);

/// Candidate reversals of the edge y → x (x runs over Ch(y) for
/// find_reversals_to_y; over Pa(x) for find_reversals_from_x).
void find_reversals_of_edge(const Pdag &g, const Scorer &scorer, int x, int y,
                            std::vector<ReverseOp> &out);
void find_reversals_to_y(const Pdag &g, const Scorer &scorer, int y,
                         std::vector<ReverseOp> &out);
void find_reversals_from_x(const Pdag &g, const Scorer &scorer, int x,
                           std::vector<ReverseOp> &out);

/// Convenience wrappers used by tests and the exhaustive refresh check.
std::vector<InsertOp> enumerate_inserts_to(const Pdag &g, const Scorer &scorer, int y,
                                           const ForbiddenPairs &forbidden = {});
std::vector<DeleteOp> enumerate_deletes(const Pdag &g, const Scorer &scorer,
                                        bool nonnegative_only = true);
std::vector<ReverseOp> enumerate_reversals(const Pdag &g, const Scorer &scorer);

/// Applies a valid operator to the CPDAG g, restores completeness via local
/// v-structure/orientation-rule repair, and returns the coalesced single-edge
/// diff between the old and new CPDAG. Throws std::invalid_argument if the
/// operator is not valid for g.
std::vector<EdgeChange> apply_operator(Pdag &g, const Operator &op);

// Unchecked variants used by the search engine after its own validity check.
std::vector<EdgeChange> apply_insert(Pdag &g, const InsertOp &op);
std::vector<EdgeChange> apply_delete(Pdag &g, const DeleteOp &op);
std::vector<EdgeChange> apply_reverse(Pdag &g, const ReverseOp &op);

}// namespace xges
