#pragma once

#include "xges/pdag.hpp"
#include "xges/scorer.hpp"

#include <map>
#include <vector>

#include "json.hpp"

namespace xges {

struct SimConfig {
    int d = 2;
    double rho = 1.0;// average number of parents per node
    long n = 1000;
    double weight_low = 1.0;
    double weight_high = 3.0;
    bool allow_negative = false;
    double eps_max = 0.5;
    unsigned long long seed = 0;

    void validate() const;// throws std::invalid_argument
};

struct GroundTruth {
    Pdag dag;
    std::vector<std::map<int, double>> weights;// per node: parent -> coefficient
    std::vector<double> noise;                 // per node: ε_i ≥ 0
    Pdag cpdag;
    bool p_clamped = false;// edge probability 2ρ/(d−1) exceeded 1

    nlohmann::json to_json() const;
    static GroundTruth from_json(const nlohmann::json &j);
};

/// Random linear-Gaussian ground truth: Erdős–Rényi skeleton with edge
/// probability p = 2ρ/(d−1) clamped to [0,1], edges oriented from the lower to
/// the higher index, node labels permuted uniformly; coefficient magnitudes
/// uniform in [weight_low, weight_high], signs flipped with probability 1/2
/// when allow_negative, coefficients L1-normalized per node; noise scales
/// uniform in [0, eps_max] except parentless nodes, which get scale 1 so
/// source variables have unit variance. Deterministic per (cfg, seed); the
/// RNG draw order is fixed (see simulate.cpp header comment).
GroundTruth sample_ground_truth(const SimConfig &cfg);

/// n i.i.d. rows by ancestral sampling: x_i = Σ_p W_ip x_p + ε_i z, z ~ N(0,1).
DataSet sample_data(const GroundTruth &gt, long n, unsigned long long seed);

/// Covariance implied by (W, ε): (I−W)⁻¹ diag(ε²) (I−W)⁻ᵀ.
Eigen::MatrixXd analytic_covariance(const GroundTruth &gt);

}// namespace xges
