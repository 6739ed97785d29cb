#pragma once

#include "xges/pdag.hpp"
#include "xges/scorer.hpp"

#include "json.hpp"

namespace xges {

struct EvalReport {
    int shd = 0;
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    double delta_s = 0;
    double zeta = 0;// NaN when the truth has no edges
    int predicted_edges = 0;
    int true_edges = 0;
    bool both_empty = false;

    nlohmann::json to_json() const;
};

/// Number of unordered pairs whose edge status (absent / undirected / → / ←)
/// differs; an orientation-only mismatch counts one.
int shd(const Pdag &p, const Pdag &q);

struct EdgeClassification {
    double precision;
    double recall;
    double f1;
    bool both_empty;// both graphs empty: reported as perfect recovery
};

/// Binary classification over ordered pairs (i, j): a graph contains (i, j)
/// if the pair is directed i → j or undirected. Degenerate ratios are 0,
/// except that two empty graphs compare as (1, 1, 1) with both_empty set.
EdgeClassification edge_classification(const Pdag &pred, const Pdag &truth);

/// (S(pred) − S(truth_dag)) / d, scoring pred via a consistent extension.
double delta_s(const Scorer &scorer, const Pdag &pred, const Pdag &truth_dag);

/// Skeleton-edge count ratio pred/truth. Throws when the truth has no edges.
double edge_ratio(const Pdag &pred, const Pdag &truth);

/// Full report; zeta is quiet-NaN instead of an error when truth is empty.
EvalReport evaluate(const Scorer &scorer, const Pdag &pred, const Pdag &truth_dag);

}// namespace xges
