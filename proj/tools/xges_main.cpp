// Command-line front end: fit / simulate / benchmark / oracle.
// Exit codes: 0 success, 1 partial benchmark failure, 2 usage or data error.

#include "xges/metrics.hpp"
#include "xges/search.hpp"
#include "xges/simulate.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

namespace {

using namespace xges;

SearchResult run_method(const std::string &method, const Scorer &scorer, bool naive,
                        std::ostream *trace) {
    if (method == "ges") { return fit_ges(scorer, false, false, naive, trace); }
    if (method == "ges-r") { return fit_ges(scorer, true, false, naive, trace); }
    if (method == "ops") { return fit_ges(scorer, false, true, naive, trace); }
    if (method == "xges0") {
        return fit_xges0(scorer, Pdag(scorer.d()), {}, trace);
    }
    if (method == "xges") { return xges::fit_xges(scorer, trace); }
    throw CLI::ValidationError("method", "unknown method: " + method);
}

void write_graph(const Pdag &g, const std::string &path) {
    std::ofstream out(path);
    if (!out) { throw std::runtime_error("cannot write " + path); }
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        out << g.to_json().dump(2) << "\n";
    } else {
        out << g.to_text();
    }
}

void write_json(const nlohmann::json &j, const std::string &path) {
    std::ofstream out(path);
    if (!out) { throw std::runtime_error("cannot write " + path); }
    out << j.dump(2) << "\n";
}

int cmd_fit(const std::string &input, const std::string &method, double alpha,
            const std::string &output, const std::string &stats_path,
            const std::string &trace_path, bool naive) {
    DataSet data = DataSet::from_csv(input);
    Scorer scorer(data, alpha);
    std::ofstream trace_file;
    std::ostream *trace = nullptr;
    if (!trace_path.empty()) {
        trace_file.open(trace_path);
        if (!trace_file) { throw std::runtime_error("cannot write " + trace_path); }
        trace = &trace_file;
    }
    SearchResult res = run_method(method, scorer, naive, trace);
    if (!output.empty()) { write_graph(res.cpdag, output); }
    if (!stats_path.empty()) { write_json(res.stats_json(), stats_path); }
    return 0;
}

int cmd_simulate(const SimConfig &cfg, const std::string &prefix) {
    GroundTruth gt = sample_ground_truth(cfg);
    DataSet data = sample_data(gt, cfg.n, cfg.seed);
    data.to_csv(prefix + ".csv");
    write_json(gt.to_json(), prefix + ".truth.json");
    return 0;
}

int cmd_oracle(const std::string &input, double alpha, const std::string &output,
               const std::string &stats_path) {
    DataSet data = DataSet::from_csv(input);
    if (data.d() > 5) {
        std::cerr << "oracle: exhaustive search limited to 5 variables\n";
        return 2;
    }
    Scorer scorer(data, alpha);
    auto [best, score] = exhaustive_oracle(scorer, data.d());
    if (!output.empty()) { write_graph(best, output); }
    if (!stats_path.empty()) {
        write_json({{"score", score}, {"score_calls", scorer.score_requests()}},
                   stats_path);
    }
    return 0;
}

struct Cell {
    std::string method;
    int d;
    double rho;
    long n;
    double alpha;
    unsigned long long seed;
};

std::string format_row(const Cell &c, const EvalReport *r, const SearchStats *s) {
    std::ostringstream os;
    os.precision(12);
    os << c.method << "," << c.d << "," << c.rho << "," << c.n << "," << c.alpha << ","
       << c.seed << ",";
    if (r && s) {
        os << r->shd << "," << r->f1 << "," << r->precision << "," << r->recall << ","
           << r->delta_s << "," << r->zeta << "," << s->score_requests << ","
           << s->runtime_ms;
    } else {
        os << "nan,nan,nan,nan,nan,nan,nan,nan";
    }
    return os.str();
}

int worker_count(size_t cells) {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("XGES_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) { hw = static_cast<unsigned>(v); }
    }
    return static_cast<int>(std::min<size_t>(hw, cells));
}

int cmd_benchmark(const std::vector<int> &ds, const std::vector<double> &rhos,
                  const std::vector<long> &ns, const std::vector<double> &alphas,
                  int num_seeds, const std::vector<std::string> &methods,
                  double eps_max, bool negative_weights, const std::string &output) {
    std::vector<Cell> cells;
    for (int d: ds) {
        for (double rho: rhos) {
            for (long n: ns) {
                for (double alpha: alphas) {
                    for (const std::string &m: methods) {
                        for (int s = 0; s < num_seeds; ++s) {
                            cells.push_back({m, d, rho, n, alpha,
                                             static_cast<unsigned long long>(s)});
                        }
                    }
                }
            }
        }
    }

    std::vector<std::string> rows(cells.size());
    std::atomic<size_t> next{0};
    std::atomic<bool> any_failed{false};
    std::mutex log_mutex;

    auto work = [&] {
        for (size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
            const Cell &c = cells[i];
            try {
                SimConfig cfg;
                cfg.d = c.d;
                cfg.rho = c.rho;
                cfg.n = c.n;
                cfg.seed = c.seed;
                cfg.eps_max = eps_max;
                cfg.allow_negative = negative_weights;
                GroundTruth gt = sample_ground_truth(cfg);
                DataSet data = sample_data(gt, c.n, c.seed);
                Scorer scorer(data, c.alpha);
                SearchResult res = run_method(c.method, scorer, false, nullptr);
                EvalReport report = evaluate(scorer, res.cpdag, gt.dag);
                rows[i] = format_row(c, &report, &res.stats);
            } catch (const std::exception &e) {
                any_failed = true;
                rows[i] = format_row(c, nullptr, nullptr);
                std::lock_guard<std::mutex> lock(log_mutex);
                std::cerr << "benchmark cell failed (" << c.method << ", d=" << c.d
                          << ", seed=" << c.seed << "): " << e.what() << "\n";
            }
        }
    };

    std::vector<std::thread> pool;
    int workers = cells.empty() ? 0 : worker_count(cells.size());
    for (int t = 1; t < workers; ++t) { pool.emplace_back(work); }
    if (workers > 0) { work(); }
    for (auto &t: pool) { t.join(); }

    std::ofstream out(output);
    if (!out) { throw std::runtime_error("cannot write " + output); }
    out << "method,d,rho,n,alpha,seed,shd,f1,precision,recall,delta_s,zeta,"
           "score_calls,runtime_ms\n";
    for (const std::string &row: rows) { out << row << "\n"; }
    return any_failed ? 1 : 0;
}

}// namespace

int main(int argc, char **argv) {
    CLI::App app{"Greedy equivalence-class search over CPDAGs"};
    app.require_subcommand(1);

    // fit
    auto *fit = app.add_subcommand("fit", "Learn a CPDAG from a CSV dataset");
    std::string fit_input, fit_method = "xges", fit_output, fit_stats, fit_trace;
    double fit_alpha = 2.0;
    bool fit_naive = false;
    fit->add_option("--input", fit_input, "input CSV (rows = samples)")->required();
    fit->add_option("--method", fit_method, "ges | ges-r | ops | xges0 | xges")
            ->check(CLI::IsMember({"ges", "ges-r", "ops", "xges0", "xges"}));
    fit->add_option("--alpha", fit_alpha, "BIC penalty multiplier");
    fit->add_option("--output", fit_output, "output graph path (.json or text)");
    fit->add_option("--stats", fit_stats, "output stats JSON path");
    fit->add_option("--trace", fit_trace, "JSON-lines trace of applied operators");
    fit->add_flag("--naive", fit_naive,
                  "full re-enumeration after each operator (ges/ges-r/ops only)");

    // simulate
    auto *sim = app.add_subcommand("simulate", "Sample a ground truth and dataset");
    SimConfig cfg;
    std::string sim_prefix;
    sim->add_option("--d", cfg.d, "number of variables")->required();
    sim->add_option("--rho", cfg.rho, "average parents per node")->required();
    sim->add_option("--n", cfg.n, "number of samples")->required();
    sim->add_option("--seed", cfg.seed, "random seed");
    sim->add_option("--eps-max", cfg.eps_max, "max noise scale");
    sim->add_option("--weight-low", cfg.weight_low, "min |coefficient|");
    sim->add_option("--weight-high", cfg.weight_high, "max |coefficient|");
    bool sim_negative = false;
    sim->add_flag("--negative-weights", sim_negative, "allow negative coefficients");
    sim->add_option("--out-prefix", sim_prefix, "writes <prefix>.csv, <prefix>.truth.json")
            ->required();

    // benchmark
    auto *bench = app.add_subcommand("benchmark", "Grid of simulate+fit+evaluate runs");
    std::vector<int> b_ds{25};
    std::vector<double> b_rhos{2.0};
    std::vector<long> b_ns{10000};
    std::vector<double> b_alphas{2.0};
    std::vector<std::string> b_methods{"xges"};
    int b_seeds = 5;
    double b_eps = 0.5;
    bool b_negative = false;
    std::string b_output = "benchmark.csv";
    bench->add_option("--d", b_ds, "variable counts");
    bench->add_option("--rho", b_rhos, "densities");
    bench->add_option("--n", b_ns, "sample counts");
    bench->add_option("--alpha", b_alphas, "BIC penalties");
    bench->add_option("--seeds", b_seeds, "seeds 0..k-1 per cell");
    bench->add_option("--methods", b_methods, "subset of ges ges-r ops xges0 xges");
    bench->add_option("--eps-max", b_eps, "max noise scale");
    bench->add_flag("--negative-weights", b_negative, "allow negative coefficients");
    bench->add_option("--output", b_output, "output CSV path");

    // oracle
    auto *orc = app.add_subcommand("oracle", "Exhaustive search (up to 5 variables)");
    std::string orc_input, orc_output, orc_stats;
    double orc_alpha = 2.0;
    orc->add_option("--input", orc_input, "input CSV")->required();
    orc->add_option("--alpha", orc_alpha, "BIC penalty multiplier");
    orc->add_option("--output", orc_output, "output graph path");
    orc->add_option("--stats", orc_stats, "output stats JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (fit->parsed()) {
            return cmd_fit(fit_input, fit_method, fit_alpha, fit_output, fit_stats,
                           fit_trace, fit_naive);
        }
        if (sim->parsed()) {
            cfg.allow_negative = sim_negative;
            return cmd_simulate(cfg, sim_prefix);
        }
        if (bench->parsed()) {
            return cmd_benchmark(b_ds, b_rhos, b_ns, b_alphas, b_seeds, b_methods,
                                 b_eps, b_negative, b_output);
        }
        if (orc->parsed()) {
            return cmd_oracle(orc_input, orc_alpha, orc_output, orc_stats);
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
