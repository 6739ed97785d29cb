#include "xges/pdag.hpp"

#include <cassert>
#include <deque>
#include <ostream>
#include <sstream>

namespace xges {

Pdag::Pdag(int num_nodes)
    : d_(num_nodes), parents_(num_nodes), children_(num_nodes),
      neighbors_(num_nodes), adjacent_(num_nodes) {
    if (num_nodes < 0) { throw std::invalid_argument("negative node count"); }
}

EdgeState Pdag::edge_state(int a, int b) const {
    if (children_[a].contains(b)) { return EdgeState::TowardB; }
    if (children_[b].contains(a)) { return EdgeState::TowardA; }
    if (neighbors_[a].contains(b)) { return EdgeState::Undirected; }
    return EdgeState::Absent;
}

void Pdag::add_directed_edge(int x, int y) {
    assert(x != y && !is_adjacent(x, y));
    children_[x].insert(y);
    parents_[y].insert(x);
    adjacent_[x].insert(y);
    adjacent_[y].insert(x);
    num_directed_++;
}

void Pdag::remove_directed_edge(int x, int y) {
    assert(has_directed_edge(x, y));
    children_[x].erase(y);
    parents_[y].erase(x);
    adjacent_[x].erase(y);
    adjacent_[y].erase(x);
    num_directed_--;
}

void Pdag::add_undirected_edge(int x, int y) {
    assert(x != y && !is_adjacent(x, y));
    neighbors_[x].insert(y);
    neighbors_[y].insert(x);
    adjacent_[x].insert(y);
    adjacent_[y].insert(x);
    num_undirected_++;
}

void Pdag::remove_undirected_edge(int x, int y) {
    assert(has_undirected_edge(x, y));
    neighbors_[x].erase(y);
    neighbors_[y].erase(x);
    adjacent_[x].erase(y);
    adjacent_[y].erase(x);
    num_undirected_--;
}

void Pdag::apply_change(const EdgeChange &c) {
    if (edge_state(c.a, c.b) != c.before) {
        throw std::logic_error("edge change does not match the graph's state");
    }
    switch (c.before) {
        case EdgeState::Absent: break;
        case EdgeState::Undirected: remove_undirected_edge(c.a, c.b); break;
        case EdgeState::TowardB: remove_directed_edge(c.a, c.b); break;
        case EdgeState::TowardA: remove_directed_edge(c.b, c.a); break;
    }
    switch (c.after) {
        case EdgeState::Absent: break;
        case EdgeState::Undirected: add_undirected_edge(c.a, c.b); break;
        case EdgeState::TowardB: add_directed_edge(c.a, c.b); break;
        case EdgeState::TowardA: add_directed_edge(c.b, c.a); break;
    }
#ifndef NDEBUG
    check_invariants();
#endif
}

bool Pdag::is_clique(const NodeSet &nodes) const {
    for (int u: nodes) {
        const NodeSet &adjacent_u = adjacent_[u];
        for (int v: nodes) {
            if (u != v && !adjacent_u.contains(v)) { return false; }
        }
    }
    return true;
}

std::optional<std::vector<int>> Pdag::find_unblocked_semidirected_path(
        int from, int to, const NodeSet &blocked,
        std::optional<std::pair<int, int>> ignored_edge) const {
    if (from == to) { throw std::invalid_argument("from == to"); }
    if (blocked.contains(from) || blocked.contains(to)) { return std::nullopt; }

    std::vector<int> predecessor(d_, -1);
    std::vector<char> visited(d_, 0);
    visited[from] = 1;
    std::deque<int> queue{from};

    while (!queue.empty()) {
        int node = queue.front();
        queue.pop_front();
        // traversable edges: node - next or node → next
        for (const NodeSet *step: {&children_[node], &neighbors_[node]}) {
            for (int next: *step) {
                if (visited[next] || blocked.contains(next)) { continue; }
                if (ignored_edge && node == ignored_edge->first &&
                    next == ignored_edge->second && has_directed_edge(node, next)) {
                    continue;
                }
                predecessor[next] = node;
                if (next == to) {
                    std::vector<int> path{to};
                    for (int v = node; v != -1; v = predecessor[v]) {
                        path.push_back(v);
                    }
                    std::reverse(path.begin(), path.end());
                    return path;
                }
                visited[next] = 1;
                queue.push_back(next);
            }
        }
    }
    return std::nullopt;
}

std::vector<std::array<int, 3>> Pdag::v_structures() const {
    std::vector<std::array<int, 3>> out;
    for (int y = 0; y < d_; ++y) {
        const NodeSet &pa = parents_[y];
        for (int x: pa) {
            for (int z: pa) {
                if (x >= z) { continue; }
                if (!adjacent_[x].contains(z)) { out.push_back({x, y, z}); }
            }
        }
    }
    return out;
}

bool Pdag::has_directed_cycle() const {
    // Kahn over directed edges only; undirected edges are ignored.
    std::vector<int> in_degree(d_);
    for (int v = 0; v < d_; ++v) { in_degree[v] = static_cast<int>(parents_[v].size()); }
    std::deque<int> queue;
    for (int v = 0; v < d_; ++v) {
        if (in_degree[v] == 0) { queue.push_back(v); }
    }
    int removed = 0;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        removed++;
        for (int c: children_[v]) {
            if (--in_degree[c] == 0) { queue.push_back(c); }
        }
    }
    return removed != d_;
}

bool Pdag::operator==(const Pdag &other) const {
    return d_ == other.d_ && children_ == other.children_ &&
           neighbors_ == other.neighbors_;
}

std::string Pdag::to_text() const {
    std::ostringstream os;
    os << "d=" << d_ << "\n";
    for (int x = 0; x < d_; ++x) {
        for (int y: children_[x]) { os << x << " -> " << y << "\n"; }
    }
    for (int x = 0; x < d_; ++x) {
        for (int y: neighbors_[x]) {
            if (x < y) { os << x << " -- " << y << "\n"; }
        }
    }
    return os.str();
}

Pdag Pdag::from_text(const std::string &text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line.rfind("d=", 0) != 0) {
        throw std::runtime_error("graph text must start with 'd=<int>'");
    }
    Pdag g(std::stoi(line.substr(2)));
    while (std::getline(is, line)) {
        if (line.empty()) { continue; }
        std::istringstream ls(line);
        int a, b;
        std::string arrow;
        if (!(ls >> a >> arrow >> b) || (arrow != "->" && arrow != "--")) {
            throw std::runtime_error("bad graph line: " + line);
        }
        if (a < 0 || b < 0 || a >= g.d_ || b >= g.d_) {
            throw std::runtime_error("node out of range: " + line);
        }
        if (arrow == "->") {
            g.add_directed_edge(a, b);
        } else {
            g.add_undirected_edge(a, b);
        }
    }
    return g;
}

nlohmann::json Pdag::to_json() const {
    nlohmann::json directed = nlohmann::json::array();
    nlohmann::json undirected = nlohmann::json::array();
    for (int x = 0; x < d_; ++x) {
        for (int y: children_[x]) { directed.push_back({x, y}); }
        for (int y: neighbors_[x]) {
            if (x < y) { undirected.push_back({x, y}); }
        }
    }
    return {{"d", d_}, {"directed", directed}, {"undirected", undirected}};
}

Pdag Pdag::from_json(const nlohmann::json &j) {
    Pdag g(j.at("d").get<int>());
    for (const auto &e: j.at("directed")) {
        g.add_directed_edge(e.at(0).get<int>(), e.at(1).get<int>());
    }
    for (const auto &e: j.at("undirected")) {
        g.add_undirected_edge(e.at(0).get<int>(), e.at(1).get<int>());
    }
    return g;
}

void Pdag::check_invariants() const {
    for (int x = 0; x < d_; ++x) {
        if (adjacent_[x].contains(x)) { throw std::logic_error("self loop"); }
        for (int y: children_[x]) {
            if (!parents_[y].contains(x)) { throw std::logic_error("asym directed"); }
            if (neighbors_[x].contains(y) || children_[y].contains(x)) {
                throw std::logic_error("pair has two edge kinds");
            }
        }
        for (int y: neighbors_[x]) {
            if (!neighbors_[y].contains(x)) { throw std::logic_error("asym undirected"); }
        }
        if (adjacent_[x] != set_union(set_union(parents_[x], children_[x]),
                                      neighbors_[x])) {
            throw std::logic_error("adjacent set out of sync");
        }
    }
}

std::ostream &operator<<(std::ostream &os, const Pdag &g) {
    os << "Pdag{";
    for (int x = 0; x < g.node_count(); ++x) {
        for (int y: g.children(x)) { os << x << "->" << y << " "; }
        for (int y: g.neighbors(x)) {
            if (x < y) { os << x << "--" << y << " "; }
        }
    }
    return os << "}";
}

std::vector<int> topological_order(const Pdag &dag) {
    int d = dag.node_count();
    std::vector<int> in_degree(d);
    for (int v = 0; v < d; ++v) {
        in_degree[v] = static_cast<int>(dag.parents(v).size());
    }
    std::set<int> ready;
    for (int v = 0; v < d; ++v) {
        if (in_degree[v] == 0) { ready.insert(v); }
    }
    std::vector<int> order;
    order.reserve(d);
    while (!ready.empty()) {
        int v = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(v);
        for (int c: dag.children(v)) {
            if (--in_degree[c] == 0) { ready.insert(c); }
        }
    }
    if (static_cast<int>(order.size()) != d) {
        throw std::runtime_error("graph has a directed cycle");
    }
    return order;
}

namespace {

// Chickering-style edge ordering for compelled-edge labeling: edges sorted by
// ascending topological rank of the head, then descending rank of the tail.
std::vector<std::pair<int, int>> ordered_edges(const Pdag &dag,
                                               const std::vector<int> &rank) {
    std::vector<std::pair<int, int>> edges;
    for (int x = 0; x < dag.node_count(); ++x) {
        for (int y: dag.children(x)) { edges.emplace_back(x, y); }
    }
    std::sort(edges.begin(), edges.end(), [&](const auto &e1, const auto &e2) {
        if (rank[e1.second] != rank[e2.second]) {
            return rank[e1.second] < rank[e2.second];
        }
        return rank[e1.first] > rank[e2.first];
    });
    return edges;
}

}// namespace

Pdag dag_to_cpdag(const Pdag &dag) {
    if (dag.undirected_edge_count() > 0) {
        throw std::invalid_argument("input has undirected edges");
    }
    std::vector<int> order = topological_order(dag);// throws if cyclic
    int d = dag.node_count();
    std::vector<int> rank(d);
    for (int i = 0; i < d; ++i) { rank[order[i]] = i; }

    enum Label { Unknown, Compelled, Reversible };
    std::map<std::pair<int, int>, Label> label;
    auto edges = ordered_edges(dag, rank);
    for (const auto &e: edges) { label[e] = Unknown; }

    for (const auto &[x, y]: edges) {
        if (label[{x, y}] != Unknown) { continue; }
        bool done = false;
        for (int w: dag.parents(x)) {
            if (label[{w, x}] != Compelled) { continue; }
            if (!dag.parents(y).contains(w)) {
                // w → x compelled and w is not a parent of y: every edge into y
                // is compelled.
                for (int p: dag.parents(y)) { label[{p, y}] = Compelled; }
                done = true;
                break;
            }
            label[{w, y}] = Compelled;
        }
        if (done) { continue; }
        // z → y with z not a parent of x forces x → y (and the rest of y's
        // unknown in-edges) to be compelled; otherwise they are reversible.
        bool exists_external_parent = false;
        for (int z: dag.parents(y)) {
            if (z != x && !dag.parents(x).contains(z)) {
                exists_external_parent = true;
                break;
            }
        }
        for (int p: dag.parents(y)) {
            if (label[{p, y}] == Unknown) {
                label[{p, y}] = exists_external_parent ? Compelled : Reversible;
            }
        }
    }

    Pdag cpdag(d);
    for (const auto &[edge, lab]: label) {
        if (lab == Compelled) {
            cpdag.add_directed_edge(edge.first, edge.second);
        } else {
            cpdag.add_undirected_edge(edge.first, edge.second);
        }
    }
    return cpdag;
}

Pdag consistent_extension(const Pdag &g) {
    int d = g.node_count();
    Pdag work = g;
    Pdag result = g;// keeps g's directed edges; undirected ones get oriented
    std::vector<char> removed(d, 0);
    int remaining = d;

    while (remaining > 0) {
        int sink = -1;
        for (int x = 0; x < d && sink == -1; ++x) {
            if (removed[x] || !work.children(x).empty()) { continue; }
            // every undirected neighbor of x must be adjacent to all of x's
            // other adjacent nodes
            bool ok = true;
            for (int nb: work.neighbors(x)) {
                for (int ad: work.adjacent(x)) {
                    if (ad != nb && !work.is_adjacent(nb, ad)) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) { break; }
            }
            if (ok) { sink = x; }
        }
        if (sink == -1) {
            throw std::runtime_error("PDAG admits no consistent extension");
        }
        for (int nb: NodeSet(work.neighbors(sink))) {
            result.remove_undirected_edge(nb, sink);
            result.add_directed_edge(nb, sink);
            work.remove_undirected_edge(nb, sink);
        }
        for (int p: NodeSet(work.parents(sink))) {
            work.remove_directed_edge(p, sink);
        }
        removed[sink] = 1;
        remaining--;
    }
    return result;
}

Pdag complete_pdag(const Pdag &g) { return dag_to_cpdag(consistent_extension(g)); }

bool mec_equal(const Pdag &p, const Pdag &q) {
    if (p.node_count() != q.node_count()) {
        throw std::invalid_argument("node count mismatch");
    }
    return p == q;
}

}// namespace xges
