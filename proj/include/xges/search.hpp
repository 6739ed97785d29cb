#pragma once

#include "xges/operators.hpp"
#include "xges/pdag.hpp"
#include "xges/scorer.hpp"

#include <iosfwd>
#include <vector>

namespace xges {

// Operator-kind masks used to restrict which candidate heaps a phase maintains.
inline constexpr int kInserts = 1;
inline constexpr int kDeletes = 2;
inline constexpr int kReversals = 4;
inline constexpr int kAllKinds = kInserts | kDeletes | kReversals;

/// Lazily maintained candidate operators: three max-heaps ordered by delta
/// plus, per kind, the store of operators rejected only by the semi-directed
/// path condition (keyed by the path edges that caused the rejection). Stale
/// entries are allowed; validity is re-checked at pop time.
struct CandidateSet {
    std::vector<InsertOp> inserts;
    std::vector<DeleteOp> deletes;
    std::vector<ReverseOp> reversals;
    PathStore insert_paths;
    PathStore reverse_paths;
};

struct SearchStats {
    long operators_applied = 0;
    long inserts_applied = 0;
    long deletes_applied = 0;
    long reversals_applied = 0;
    long score_requests = 0;
    long cache_misses = 0;
    double runtime_ms = 0;
};

struct SearchState {
    const Scorer *scorer;
    Pdag graph;
    double total_score;
    ForbiddenPairs forbidden_inserts;
    CandidateSet candidates;
    SearchStats stats;
    std::ostream *trace = nullptr;

    SearchState(const Scorer &s, Pdag g);
};

struct SearchResult {
    Pdag cpdag;
    double score;
    SearchStats stats;

    nlohmann::json stats_json() const;
};

/// (Re)builds the candidate heaps of the selected kinds by full enumeration.
void init_candidates(SearchState &st, int kinds);

/// Incrementally restores the candidate superset property after an operator
/// whose coalesced single-edge diff is `changes`: the diff is rewound and
/// replayed one edge at a time, and for each single-edge update only the
/// affected (x, y) scopes given by the necessary-condition tables are
/// re-enumerated, plus any path-blocked operators whose saved path traverses
/// the updated edge.
void refresh_candidates(SearchState &st, const std::vector<EdgeChange> &changes,
                        int kinds);

/// Applies one operator, or returns false if no admissible one remains.
/// With `priority` (the XGES-0 rule): best delete if δ ≥ 0, else best reversal
/// if δ > 0, else best insert if δ > 0. Without it, the enabled kinds compete
/// by raw δ > 0. `strict_deletes` raises the delete threshold to δ > 0.
/// `naive` replaces incremental refresh by full re-enumeration.
bool search_step(SearchState &st, int kinds, bool priority,
                 bool strict_deletes = false, bool naive = false);

void run_xges0(SearchState &st, int kinds = kAllKinds);

/// Exhaustively verifies the superset property: every operator valid for
/// st.graph (under the enumeration thresholds) is present in a heap. Returns
/// the missing operators (empty = invariant holds).
std::vector<Operator> find_superset_violations(const SearchState &st);

SearchResult fit_xges0(const Scorer &scorer, const Pdag &init,
                   const ForbiddenPairs &forbidden = {},
                   std::ostream *trace = nullptr);
SearchResult fit_xges(const Scorer &scorer, std::ostream *trace = nullptr);
SearchResult fit_ges(const Scorer &scorer, bool reversal_phase, bool simultaneous_ops,
                 bool naive = false, std::ostream *trace = nullptr);

/// All DAGs on d small nodes (every acyclic assignment of the C(d,2) pairs).
std::vector<Pdag> all_dags(int d);

/// Scores every DAG on d ≤ 5 nodes and returns the CPDAG of an argmax with its
/// score. Throws std::invalid_argument for larger d.
std::pair<Pdag, double> exhaustive_oracle(const Scorer &scorer, int d);

}// namespace xges
