#include "xges/scorer.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace xges {

namespace {

bool parse_row(const std::string &line, std::vector<double> &out) {
    out.clear();
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        size_t pos = 0;
        double v;
        try {
            v = std::stod(cell, &pos);
        } catch (const std::exception &) { return false; }
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) {
            ++pos;
        }
        if (pos != cell.size()) { return false; }
        out.push_back(v);
    }
    return !out.empty();
}

}// namespace

DataSet DataSet::from_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in) { throw std::runtime_error("cannot open data file: " + path); }
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    size_t width = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') { line.pop_back(); }
        if (line.empty()) { continue; }
        std::vector<double> row;
        if (!parse_row(line, row)) {
            if (first) {
                first = false;// header row
                continue;
            }
            throw std::runtime_error("non-numeric data row in " + path + ": " + line);
        }
        first = false;
        if (width == 0) {
            width = row.size();
        } else if (row.size() != width) {
            throw std::runtime_error("ragged row in " + path);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) { throw std::runtime_error("no data rows in " + path); }
    DataSet ds;
    ds.values.resize(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(width));
    for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t j = 0; j < width; ++j) {
            double v = rows[i][j];
            if (!std::isfinite(v)) {
                throw std::runtime_error("non-finite value in " + path);
            }
            ds.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }
    return ds;
}

void DataSet::to_csv(const std::string &path) const {
    std::ofstream out(path);
    if (!out) { throw std::runtime_error("cannot write data file: " + path); }
    out.precision(17);
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            if (j > 0) { out << ","; }
            out << values(i, j);
        }
        out << "\n";
    }
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd &values) {
    Eigen::RowVectorXd mean = values.colwise().mean();
    Eigen::MatrixXd centered = values.rowwise() - mean;
    return (centered.transpose() * centered) / static_cast<double>(values.rows());
}

Scorer::Scorer(const DataSet &data, double alpha)
    : Scorer(sample_covariance(data.values), data.n(), alpha) {
    if (!data.values.allFinite()) {
        throw std::invalid_argument("data contains non-finite values");
    }
    if (data.n() < 2) { throw std::invalid_argument("need at least 2 samples"); }
}

Scorer::Scorer(Eigen::MatrixXd covariance, long n, double alpha)
    : cov_(std::move(covariance)), n_(n), alpha_(alpha) {
    if (alpha <= 0) { throw std::invalid_argument("alpha must be positive"); }
    if (cov_.rows() != cov_.cols()) { throw std::invalid_argument("covariance not square"); }
}

double Scorer::residual_variance(int j, const NodeSet &parents) const {
    if (parents.empty()) { return cov_(j, j); }
    Eigen::Index k = static_cast<Eigen::Index>(parents.size());
    Eigen::MatrixXd cov_pp(k, k);
    Eigen::VectorXd cov_pj(k);
    Eigen::Index r = 0;
    for (int p: parents) {
        Eigen::Index c = 0;
        for (int q: parents) { cov_pp(r, c++) = cov_(p, q); }
        cov_pj(r++) = cov_(p, j);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov_pp);
    if (llt.info() != Eigen::Success) {
        double jitter = 1e-10 * cov_pp.diagonal().mean();
        cov_pp.diagonal().array() += jitter;
        llt.compute(cov_pp);
        if (llt.info() != Eigen::Success) {
            return -std::numeric_limits<double>::infinity();
        }
    }
    return cov_(j, j) - cov_pj.dot(llt.solve(cov_pj));
}

double Scorer::local_score(int j, const NodeSet &parents) const {
    if (parents.contains(j)) { throw std::invalid_argument("node among its parents"); }
    score_requests_++;
    auto key = std::make_pair(j, std::vector<int>(parents.begin(), parents.end()));
    if (auto it = cache_.find(key); it != cache_.end()) { return it->second; }
    cache_misses_++;

    double sigma2 = residual_variance(j, parents);
    double score;
    if (sigma2 == -std::numeric_limits<double>::infinity()) {
        score = -std::numeric_limits<double>::infinity();
    } else {
        // Finite-precision collinearity must not produce NaN.
        sigma2 = std::max({sigma2, 1e-12 * cov_(j, j), 1e-300});
        double n = static_cast<double>(n_);
        score = -0.5 * n * (1.0 + std::log(2.0 * std::numbers::pi) + std::log(sigma2)) -
                0.5 * alpha_ * std::log(n) * static_cast<double>(parents.size());
    }
    cache_.emplace(std::move(key), score);
    return score;
}

double Scorer::insert_delta(int x, int y, const NodeSet &effective_parents) const {
    if (x == y || effective_parents.contains(x)) {
        throw std::invalid_argument("bad insert delta arguments");
    }
    NodeSet with_x = effective_parents;
    with_x.insert(x);
    return local_score(y, with_x) - local_score(y, effective_parents);
}

double Scorer::delete_delta(int x, int y, const NodeSet &effective_parents) const {
    if (x == y) { throw std::invalid_argument("bad delete delta arguments"); }
    NodeSet with_x = effective_parents;
    with_x.insert(x);
    NodeSet without_x = effective_parents;
    without_x.erase(x);
    return local_score(y, without_x) - local_score(y, with_x);
}

double Scorer::reverse_delta(int x, int y, const NodeSet &effective_parents_y,
                             const NodeSet &parents_x) const {
    if (!parents_x.contains(y)) {
        throw std::invalid_argument("reverse delta requires y among x's parents");
    }
    NodeSet parents_x_without_y = parents_x;
    parents_x_without_y.erase(y);
    return insert_delta(x, y, effective_parents_y) +
           (local_score(x, parents_x_without_y) - local_score(x, parents_x));
}

double Scorer::total_dag_score(const Pdag &dag) const {
    if (!dag.is_dag()) { throw std::invalid_argument("total_dag_score needs a DAG"); }
    double total = 0;
    for (int j = 0; j < dag.node_count(); ++j) { total += local_score(j, dag.parents(j)); }
    return total;
}

double Scorer::empty_graph_score() const {
    double total = 0;
    for (int j = 0; j < d(); ++j) { total += local_score(j, {}); }
    return total;
}

}// namespace xges
