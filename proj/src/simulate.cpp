// Deterministic generation of ground truths and data.
//
// All randomness comes from a std::mt19937_64 consumed through the fixed-width
// helpers below (never through std::uniform_*_distribution, whose outputs vary
// across standard libraries). Draw order for sample_ground_truth(cfg):
//   1. skeleton: for each pair (i, j), i < j, in lexicographic order, one
//      uniform [0,1) draw compared against p
//   2. permutation: Fisher–Yates over [d], one bounded draw per i = d−1 .. 1
//   3. weights: for each node 0..d−1, for each parent ascending, one uniform
//      [weight_low, weight_high) draw
//   4. signs (only if allow_negative): same iteration order, one uniform draw
//      per coefficient, negate when < 0.5
//   5. noise scales: one uniform [0, eps_max) draw per node 0..d−1; afterwards
//      parentless nodes are overridden to scale 1 (the draw is still consumed,
//      so the stream position is independent of the skeleton)
// sample_data(gt, n, seed) uses a fresh generator seeded with
// seed ^ 0xD1B54A32D192ED03 (stream separation from the structure draws) and,
// for each row, one standard normal (Box–Muller, pairs cached) per node in
// ascending topological order.

#include "xges/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace xges {

namespace {

class Rng {
public:
    explicit Rng(unsigned long long seed) : gen_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    int below(int n) { return std::min(n - 1, static_cast<int>(uniform() * n)); }

    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        // Box–Muller; u1 > 0 guaranteed by the offset.
        double u1 = 1.0 - uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

    void shuffle(std::vector<int> &v) {
        for (int i = static_cast<int>(v.size()) - 1; i >= 1; --i) {
            std::swap(v[i], v[below(i + 1)]);
        }
    }

private:
    std::mt19937_64 gen_;
    double cached_ = 0;
    bool have_cached_ = false;
};

constexpr unsigned long long kDataStreamTag = 0xD1B54A32D192ED03ULL;

}// namespace

void SimConfig::validate() const {
    if (d < 1) { throw std::invalid_argument("d must be >= 1"); }
    if (rho < 0) { throw std::invalid_argument("rho must be >= 0"); }
    if (n < 1) { throw std::invalid_argument("n must be >= 1"); }
    if (weight_low <= 0 || weight_high < weight_low) {
        throw std::invalid_argument("need 0 < weight_low <= weight_high");
    }
    if (eps_max < 0) { throw std::invalid_argument("eps_max must be >= 0"); }
}

GroundTruth sample_ground_truth(const SimConfig &cfg) {
    cfg.validate();
    int d = cfg.d;
    Rng rng(cfg.seed);

    double p = d > 1 ? 2.0 * cfg.rho / (d - 1) : 0.0;
    bool clamped = p > 1.0;
    p = std::clamp(p, 0.0, 1.0);

    std::vector<std::pair<int, int>> edges;// low → high
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            if (rng.uniform() < p) { edges.emplace_back(i, j); }
        }
    }

    std::vector<int> sigma(d);
    for (int i = 0; i < d; ++i) { sigma[i] = i; }
    rng.shuffle(sigma);

    GroundTruth gt{Pdag(d), {}, {}, Pdag(d), clamped};
    for (auto [i, j]: edges) { gt.dag.add_directed_edge(sigma[i], sigma[j]); }

    gt.weights.resize(d);
    for (int i = 0; i < d; ++i) {
        for (int p_node: gt.dag.parents(i)) {
            gt.weights[i][p_node] = rng.uniform(cfg.weight_low, cfg.weight_high);
        }
    }
    if (cfg.allow_negative) {
        for (int i = 0; i < d; ++i) {
            for (auto &[p_node, w]: gt.weights[i]) {
                if (rng.uniform() < 0.5) { w = -w; }
            }
        }
    }
    for (int i = 0; i < d; ++i) {
        double l1 = 0;
        for (const auto &[p_node, w]: gt.weights[i]) { l1 += std::abs(w); }
        if (l1 > 0) {
            for (auto &[p_node, w]: gt.weights[i]) { w /= l1; }
        }
    }

    gt.noise.resize(d);
    for (int i = 0; i < d; ++i) { gt.noise[i] = rng.uniform(0.0, cfg.eps_max); }
    // Parentless nodes are pure noise; give them unit scale so every variable
    // carries O(1) signal instead of the whole system shrinking toward zero.
    for (int i = 0; i < d; ++i) {
        if (gt.weights[i].empty()) { gt.noise[i] = 1.0; }
    }

    gt.cpdag = dag_to_cpdag(gt.dag);
    return gt;
}

DataSet sample_data(const GroundTruth &gt, long n, unsigned long long seed) {
    if (n < 1) { throw std::invalid_argument("n must be >= 1"); }
    int d = gt.dag.node_count();
    std::vector<int> order = topological_order(gt.dag);
    Rng rng(seed ^ kDataStreamTag);

    DataSet ds;
    ds.values.resize(n, d);
    for (long r = 0; r < n; ++r) {
        for (int i: order) {
            double v = gt.noise[i] * rng.normal();
            for (const auto &[p, w]: gt.weights[i]) { v += w * ds.values(r, p); }
            ds.values(r, i) = v;
        }
    }
    return ds;
}

Eigen::MatrixXd analytic_covariance(const GroundTruth &gt) {
    int d = gt.dag.node_count();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        for (const auto &[p, coeff]: gt.weights[i]) { w(i, p) = coeff; }
        d2(i, i) = gt.noise[i] * gt.noise[i];
    }
    Eigen::MatrixXd m = (Eigen::MatrixXd::Identity(d, d) - w).inverse();
    return m * d2 * m.transpose();
}

nlohmann::json GroundTruth::to_json() const {
    nlohmann::json j;
    j["d"] = dag.node_count();
    nlohmann::json edges = nlohmann::json::array();
    for (int x = 0; x < dag.node_count(); ++x) {
        for (int y: dag.children(x)) { edges.push_back({x, y}); }
    }
    j["dag_edges"] = edges;
    nlohmann::json weights_j = nlohmann::json::array();
    for (int i = 0; i < dag.node_count(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto &[p, w]: weights[i]) { row.push_back({{"parent", p}, {"weight", w}}); }
        weights_j.push_back(row);
    }
    j["weights"] = weights_j;
    j["noise"] = noise;
    j["cpdag"] = cpdag.to_json();
    j["p_clamped"] = p_clamped;
    return j;
}

GroundTruth GroundTruth::from_json(const nlohmann::json &j) {
    int d = j.at("d").get<int>();
    GroundTruth gt{Pdag(d), {}, {}, Pdag::from_json(j.at("cpdag")),
                   j.value("p_clamped", false)};
    for (const auto &e: j.at("dag_edges")) {
        gt.dag.add_directed_edge(e.at(0).get<int>(), e.at(1).get<int>());
    }
    gt.weights.resize(d);
    for (int i = 0; i < d; ++i) {
        for (const auto &entry: j.at("weights").at(i)) {
            gt.weights[i][entry.at("parent").get<int>()] =
                    entry.at("weight").get<double>();
        }
    }
    gt.noise = j.at("noise").get<std::vector<double>>();
    return gt;
}

}// namespace xges
