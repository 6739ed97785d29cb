// Acceptance suite: one PASS/FAIL line per criterion, exit code = number of
// failed criteria.

#include "test_support.hpp"

#include "xges/metrics.hpp"
#include "xges/search.hpp"
#include "xges/simulate.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

using namespace xges;
using namespace xges::testing;

namespace {

int failures = 0;

class Criterion {
public:
    explicit Criterion(std::string name)
        : name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}

    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
                .count();
    }

    void expect(bool ok, const std::string &what) {
        if (!ok) {
            passed_ = false;
            details_ << (details_.tellp() > 0 ? "; " : "") << "violated: " << what;
        }
    }

    void note(const std::string &what) {
        details_ << (details_.tellp() > 0 ? "; " : "") << what;
    }

    void finish(double time_budget_s = 0) {
        double t = seconds();
        if (time_budget_s > 0 && t > time_budget_s) {
            passed_ = false;
            details_ << (details_.tellp() > 0 ? "; " : "") << "over time budget";
        }
        std::ostringstream line;
        line << (passed_ ? "PASS" : "FAIL") << " — " << name_ << " (";
        if (details_.tellp() > 0) { line << details_.str() << ", "; }
        line << std::fixed;
        line.precision(1);
        line << t << "s)";
        std::cout << line.str() << "\n";
        if (!passed_) { ++failures; }
    }

private:
    std::string name_;
    std::chrono::steady_clock::time_point start_;
    bool passed_ = true;
    std::ostringstream details_;
};

std::pair<GroundTruth, DataSet> simulated(int d, double rho, long n,
                                          unsigned long long seed) {
    SimConfig cfg;
    cfg.d = d;
    cfg.rho = rho;
    cfg.n = n;
    cfg.seed = seed;
    GroundTruth gt = sample_ground_truth(cfg);
    DataSet data = sample_data(gt, n, seed);
    return {std::move(gt), std::move(data)};
}

void oracle_optimality_floor() {
    Criterion c("oracle optimality floor: oracle >= xges >= xges0 >= ges, 50 datasets");
    int oracle_hits = 0;
    for (unsigned long long seed = 0; seed < 50; ++seed) {
        auto [gt, data] = simulated(4, 1.5, 5000, seed);
        Scorer sc(data, 2.0);
        double s_ges = fit_ges(sc, false, false).score;
        double s_x0 = fit_xges0(sc, Pdag(4)).score;
        double s_x = fit_xges(sc).score;
        auto [g, s_oracle] = exhaustive_oracle(sc, 4);
        c.expect(s_oracle >= s_x - 1e-9, "oracle >= xges, seed " + std::to_string(seed));
        c.expect(s_x >= s_x0 - 1e-9, "xges >= xges0, seed " + std::to_string(seed));
        c.expect(s_x0 >= s_ges - 1e-9, "xges0 >= ges, seed " + std::to_string(seed));
        if (std::abs(s_oracle - s_x) <= 1e-9 * std::max(1.0, std::abs(s_oracle))) {
            ++oracle_hits;
        }
    }
    c.note("xges attains the oracle score on " + std::to_string(oracle_hits) + "/50");
    c.finish(60);
}

void recovery_at_desk_scale() {
    Criterion c("recovery: d=15, rho=2, n=1e5, mean SHD <= 1 and >= 7/10 exact");
    int zeros = 0;
    long total = 0;
    for (unsigned long long seed = 0; seed < 10; ++seed) {
        auto [gt, data] = simulated(15, 2.0, 100000, seed);
        Scorer sc(data, 2.0);
        int s = shd(fit_xges(sc).cpdag, gt.cpdag);
        total += s;
        zeros += s == 0;
    }
    double mean = total / 10.0;
    std::ostringstream d;
    d << "mean SHD " << mean << ", exact recoveries " << zeros << "/10";
    c.note(d.str());
    c.expect(mean <= 1.0, "mean SHD <= 1");
    c.expect(zeros >= 7, ">= 7/10 at SHD 0");
    c.finish(30);
}

void ges_failure_reproduction() {
    Criterion c("dense-regime contrast: d=25, rho=4, n=1e4");
    double sum_delta_s = 0, sum_zeta = 0;
    long shd_ges = 0, shd_xges = 0;
    for (unsigned long long seed = 0; seed < 10; ++seed) {
        auto [gt, data] = simulated(25, 4.0, 10000, seed);
        Scorer sc(data, 2.0);
        SearchResult r_ges = fit_ges(sc, false, false);
        SearchResult r_xges = fit_xges(sc);
        EvalReport e_ges = evaluate(sc, r_ges.cpdag, gt.dag);
        sum_delta_s += e_ges.delta_s;
        sum_zeta += e_ges.zeta;
        shd_ges += e_ges.shd;
        shd_xges += shd(r_xges.cpdag, gt.cpdag);
    }
    std::ostringstream d;
    d << "mean dS(ges) " << sum_delta_s / 10 << ", mean zeta(ges) " << sum_zeta / 10
      << ", mean SHD ges " << shd_ges / 10.0 << " vs xges " << shd_xges / 10.0;
    c.note(d.str());
    c.expect(sum_delta_s / 10 < 0, "mean score gap of ges negative");
    c.expect(sum_zeta / 10 > 1, "ges over-inserts edges");
    c.expect(shd_xges < shd_ges, "xges beats ges on mean SHD");
    c.finish(120);
}

void candidate_superset_invariant() {
    Criterion c("candidate superset invariant along 100 random searches, d <= 10");
    long violations = 0, steps = 0;
    for (unsigned long long run = 0; run < 100; ++run) {
        int d = 4 + static_cast<int>(run % 7);
        double rho = 0.5 + 0.5 * static_cast<double>(run % 6);
        auto [gt, data] = simulated(d, rho, 800 + 100 * (run % 5), run);
        Scorer sc(data, 2.0);
        SearchState st(sc, Pdag(d));
        init_candidates(st, kAllKinds);
        while (search_step(st, kAllKinds, true)) {
            ++steps;
            violations += static_cast<long>(find_superset_violations(st).size());
        }
    }
    c.note(std::to_string(steps) + " operator applications checked");
    c.expect(violations == 0,
             std::to_string(violations) + " missing candidate operators");
    c.finish();
}

void operator_bijection_and_completion() {
    Criterion c("operator successors and completion vs brute force, all DAGs d <= 4");
    long completion_mismatches = 0, op_mismatches = 0, mecs = 0;
    for (int d = 1; d <= 4; ++d) {
        Scorer sc(Eigen::MatrixXd::Identity(d, d), 100, 2.0);
        std::set<std::string> seen;
        for (const Pdag &dag: all_dags(d)) {
            if (!(dag_to_cpdag(dag) == brute_cpdag(dag))) { ++completion_mismatches; }
            Pdag cpdag = dag_to_cpdag(dag);
            if (!seen.insert(graph_key(cpdag)).second) { continue; }
            ++mecs;
            std::vector<Pdag> members = mec_members(dag);

            // Insert successors.
            std::set<std::string> ops_set, brute_set;
            for (int y = 0; y < d; ++y) {
                std::vector<InsertOp> ins;
                find_inserts_to_y(cpdag, sc, y, ins, -1, false);
                for (const InsertOp &op: ins) {
                    if (!insert_valid(cpdag, op)) { continue; }
                    Pdag g = cpdag;
                    apply_insert(g, op);
                    ops_set.insert(graph_key(g));
                }
            }
            for (const Pdag &m: members) {
                for (int x = 0; x < d; ++x) {
                    for (int y = 0; y < d; ++y) {
                        if (x == y || m.is_adjacent(x, y)) { continue; }
                        Pdag g = m;
                        g.add_directed_edge(x, y);
                        if (!g.has_directed_cycle()) {
                            brute_set.insert(graph_key(brute_cpdag(g)));
                        }
                    }
                }
            }
            if (ops_set != brute_set) { ++op_mismatches; }

            // Delete successors.
            ops_set.clear();
            brute_set.clear();
            std::vector<DeleteOp> dels = enumerate_deletes(cpdag, sc, false);
            for (const DeleteOp &op: dels) {
                if (!delete_valid(cpdag, op)) { continue; }
                Pdag g = cpdag;
                apply_delete(g, op);
                ops_set.insert(graph_key(g));
            }
            for (const Pdag &m: members) {
                for (int x = 0; x < d; ++x) {
                    for (int y: NodeSet(m.children(x))) {
                        Pdag g = m;
                        g.remove_directed_edge(x, y);
                        brute_set.insert(graph_key(brute_cpdag(g)));
                    }
                }
            }
            if (ops_set != brute_set) { ++op_mismatches; }

            // Reverse successors (reversals of edges compelled in the CPDAG).
            ops_set.clear();
            brute_set.clear();
            for (int x = 0; x < d; ++x) {
                for (int y: cpdag.parents(x)) {// edge y → x, reversed to x → y
                    std::vector<InsertOp> ins;
                    find_inserts_to_y(cpdag, sc, y, ins, x, false);
                    for (const InsertOp &part: ins) {
                        ReverseOp op{x, y, part.T, part.E, cpdag.parents(x), 0};
                        if (!reverse_valid(cpdag, op)) { continue; }
                        Pdag g = cpdag;
                        apply_reverse(g, op);
                        ops_set.insert(graph_key(g));
                    }
                }
            }
            for (const Pdag &m: members) {
                for (int x = 0; x < d; ++x) {
                    for (int y: cpdag.parents(x)) {
                        Pdag g = m;
                        g.remove_directed_edge(y, x);
                        g.add_directed_edge(x, y);
                        if (!g.has_directed_cycle()) {
                            brute_set.insert(graph_key(brute_cpdag(g)));
                        }
                    }
                }
            }
            if (ops_set != brute_set) { ++op_mismatches; }
        }
    }
    c.note(std::to_string(mecs) + " MECs checked");
    c.expect(completion_mismatches == 0,
             std::to_string(completion_mismatches) + " completion mismatches");
    c.expect(op_mismatches == 0,
             std::to_string(op_mismatches) + " successor-set mismatches");
    c.finish();
}

void score_equivalence_and_decomposability() {
    Criterion c("score equivalence on 20 random MECs, deltas bit-for-bit");
    long delta_mismatches = 0;
    double worst_rel = 0;
    for (unsigned long long seed = 0; seed < 20; ++seed) {
        int d = 3 + static_cast<int>(seed % 3);
        auto [gt, data] = simulated(d, 1.0 + 0.3 * (seed % 4), 1000, seed + 500);
        Scorer sc(data, 2.0);
        double ref = sc.total_dag_score(gt.dag);
        for (const Pdag &m: mec_members(gt.dag)) {
            double rel = std::abs(sc.total_dag_score(m) - ref) /
                         std::max(1.0, std::abs(ref));
            worst_rel = std::max(worst_rel, rel);
        }

        Pdag cpdag = gt.cpdag;
        Scorer fresh(data, 2.0);
        for (int y = 0; y < d; ++y) {
            std::vector<InsertOp> ins;
            find_inserts_to_y(cpdag, sc, y, ins, -1, false);
            for (const InsertOp &op: ins) {
                if (op.delta != fresh.insert_delta(op.x, op.y, op.E)) {
                    ++delta_mismatches;
                }
            }
        }
        for (const DeleteOp &op: enumerate_deletes(cpdag, sc, false)) {
            if (op.delta != fresh.delete_delta(op.x, op.y, op.E)) {
                ++delta_mismatches;
            }
        }
        for (const ReverseOp &op: enumerate_reversals(cpdag, sc)) {
            if (op.delta != fresh.reverse_delta(op.x, op.y, op.E, op.F)) {
                ++delta_mismatches;
            }
        }
    }
    std::ostringstream d;
    d << "worst member-score relative gap " << worst_rel;
    c.note(d.str());
    c.expect(worst_rel <= 1e-9, "member scores equal within 1e-9 relative");
    c.expect(delta_mismatches == 0,
             std::to_string(delta_mismatches) + " delta mismatches");
    c.finish();
}

void efficiency_ordering() {
    Criterion c("efficiency: d=50, rho=3, n=1e4 score-call counts");
    auto [gt, data] = simulated(50, 3.0, 10000, 0);

    Scorer sc_x0(data, 2.0);
    long calls_x0 = fit_xges0(sc_x0, Pdag(50)).stats.score_requests;
    Scorer sc_naive(data, 2.0);
    long calls_naive = fit_ges(sc_naive, false, false, /*naive=*/true).stats.score_requests;
    Scorer sc_x(data, 2.0);
    long calls_x = fit_xges(sc_x).stats.score_requests;

    double naive_ratio = static_cast<double>(calls_naive) / calls_x0;
    double xges_ratio = static_cast<double>(calls_x) / calls_x0;
    std::ostringstream d;
    d << "naive ges/xges0 " << naive_ratio << "x, xges/xges0 " << xges_ratio << "x";
    c.note(d.str());
    c.expect(naive_ratio >= 5.0, "incremental xges0 at least 5x fewer score calls");
    c.expect(xges_ratio >= 1.0 && xges_ratio <= 100.0, "xges/xges0 ratio in [1, 100]");
    c.finish();
}

}// namespace

int main() {
    oracle_optimality_floor();
    recovery_at_desk_scale();
    ges_failure_reproduction();
    candidate_superset_invariant();
    operator_bijection_and_completion();
    score_equivalence_and_decomposability();
    efficiency_ordering();
    std::cout << (failures == 0 ? "all criteria passed"
                                : std::to_string(failures) + " criteria failed")
              << "\n";
    return failures;
}
