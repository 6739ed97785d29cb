#include "xges/metrics.hpp"

#include <cmath>
#include <limits>

namespace xges {

int shd(const Pdag &p, const Pdag &q) {
    if (p.node_count() != q.node_count()) {
        throw std::invalid_argument("shd: dimension mismatch");
    }
    int count = 0;
    for (int i = 0; i < p.node_count(); ++i) {
        for (int j = i + 1; j < p.node_count(); ++j) {
            if (p.edge_state(i, j) != q.edge_state(i, j)) { ++count; }
        }
    }
    return count;
}

namespace {

bool contains_pair(const Pdag &g, int i, int j) {
    return g.has_directed_edge(i, j) || g.has_undirected_edge(i, j);
}

}// namespace

EdgeClassification edge_classification(const Pdag &pred, const Pdag &truth) {
    if (pred.node_count() != truth.node_count()) {
        throw std::invalid_argument("edge_classification: dimension mismatch");
    }
    long tp = 0, fp = 0, fn = 0;
    for (int i = 0; i < pred.node_count(); ++i) {
        for (int j = 0; j < pred.node_count(); ++j) {
            if (i == j) { continue; }
            bool in_pred = contains_pair(pred, i, j);
            bool in_truth = contains_pair(truth, i, j);
            tp += in_pred && in_truth;
            fp += in_pred && !in_truth;
            fn += !in_pred && in_truth;
        }
    }
    if (tp + fp + fn == 0) { return {1.0, 1.0, 1.0, true}; }
    double precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    double recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    double f1 = precision + recall > 0
                        ? 2.0 * precision * recall / (precision + recall)
                        : 0.0;
    return {precision, recall, f1, false};
}

double delta_s(const Scorer &scorer, const Pdag &pred, const Pdag &truth_dag) {
    double s_pred = scorer.total_dag_score(consistent_extension(pred));
    double s_truth = scorer.total_dag_score(truth_dag);
    return (s_pred - s_truth) / pred.node_count();
}

double edge_ratio(const Pdag &pred, const Pdag &truth) {
    if (truth.skeleton_edge_count() == 0) {
        throw std::invalid_argument("edge_ratio undefined for an empty truth");
    }
    return static_cast<double>(pred.skeleton_edge_count()) /
           static_cast<double>(truth.skeleton_edge_count());
}

EvalReport evaluate(const Scorer &scorer, const Pdag &pred, const Pdag &truth_dag) {
    Pdag truth_cpdag = dag_to_cpdag(truth_dag);
    EvalReport r;
    r.shd = shd(pred, truth_cpdag);
    EdgeClassification cls = edge_classification(pred, truth_cpdag);
    r.precision = cls.precision;
    r.recall = cls.recall;
    r.f1 = cls.f1;
    r.both_empty = cls.both_empty;
    r.delta_s = delta_s(scorer, pred, truth_dag);
    r.predicted_edges = pred.skeleton_edge_count();
    r.true_edges = truth_cpdag.skeleton_edge_count();
    r.zeta = r.true_edges > 0 ? edge_ratio(pred, truth_cpdag)
                              : std::numeric_limits<double>::quiet_NaN();
    return r;
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json j{
            {"shd", shd},
            {"precision", precision},
            {"recall", recall},
            {"f1", f1},
            {"delta_s", delta_s},
            {"predicted_edges", predicted_edges},
            {"true_edges", true_edges},
            {"both_empty", both_empty},
    };
    if (std::isnan(zeta)) {
        j["zeta"] = nullptr;
    } else {
        j["zeta"] = zeta;
    }
    return j;
}

}// namespace xges
