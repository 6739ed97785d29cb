#pragma once

#include "xges/pdag.hpp"
#include "xges/set_ops.hpp"

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace xges {

struct DataSet {
    Eigen::MatrixXd values;// n × d

    int n() const { return static_cast<int>(values.rows()); }
    int d() const { return static_cast<int>(values.cols()); }

    /// One row per sample, comma-separated decimal floats, optional single
    /// header row. Throws on non-numeric cells (beyond the header), ragged
    /// rows, or non-finite values.
    static DataSet from_csv(const std::string &path);
    void to_csv(const std::string &path) const;
};

/// Gaussian-linear BIC scorer over a fixed dataset. Local scores are penalized
/// maximum log-likelihoods computed from the sample covariance alone, memoized
/// per (target, parent set). The sole authority on operator score deltas.
class Scorer {
public:
    Scorer(const DataSet &data, double alpha);
    Scorer(Eigen::MatrixXd covariance, long n, double alpha);

    int d() const { return static_cast<int>(cov_.rows()); }
    long n() const { return n_; }
    double alpha() const { return alpha_; }
    const Eigen::MatrixXd &covariance() const { return cov_; }

    /// Penalized Gaussian log-likelihood of node j given `parents`:
    ///   -(n/2)(1 + ln 2π + ln σ̂²) - (α/2) ln(n) |parents|
    /// with σ̂² the residual variance of regressing j on the parents.
    double local_score(int j, const NodeSet &parents) const;

    double insert_delta(int x, int y, const NodeSet &effective_parents) const;
    double delete_delta(int x, int y, const NodeSet &effective_parents) const;
    double reverse_delta(int x, int y, const NodeSet &effective_parents_y,
                         const NodeSet &parents_x) const;

    double total_dag_score(const Pdag &dag) const;
    double empty_graph_score() const;

    /// Every call to local_score, cached or not.
    long score_requests() const { return score_requests_; }
    /// Calls that actually computed a residual variance (cache misses).
    long cache_misses() const { return cache_misses_; }
    void reset_counters() { score_requests_ = 0; cache_misses_ = 0; }
    void clear_cache() { cache_.clear(); }

private:
    double residual_variance(int j, const NodeSet &parents) const;

    Eigen::MatrixXd cov_;
    long n_;
    double alpha_;
    mutable std::map<std::pair<int, std::vector<int>>, double> cache_;
    mutable long score_requests_ = 0;
    mutable long cache_misses_ = 0;
};

/// Sample covariance with divisor n (MLE), mean-centered.
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd &values);

}// namespace xges
