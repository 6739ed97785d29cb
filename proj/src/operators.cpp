#include "xges/operators.hpp"

#include <algorithm>
#include <deque>
#include <tuple>

namespace xges {

double operator_delta(const Operator &op) {
    return std::visit([](const auto &o) { return o.delta; }, op);
}

namespace {

nlohmann::json set_to_json(const NodeSet &s) {
    return nlohmann::json(std::vector<int>(s.begin(), s.end()));
}

}// namespace

nlohmann::json operator_to_json(const Operator &op) {
    nlohmann::json j;
    if (const auto *ins = std::get_if<InsertOp>(&op)) {
        j["kind"] = "insert";
        j["x"] = ins->x;
        j["y"] = ins->y;
        j["T"] = set_to_json(ins->T);
        j["E"] = set_to_json(ins->E);
        j["delta"] = ins->delta;
    } else if (const auto *del = std::get_if<DeleteOp>(&op)) {
        j["kind"] = "delete";
        j["x"] = del->x;
        j["y"] = del->y;
        j["C"] = set_to_json(del->C);
        j["E"] = set_to_json(del->E);
        j["delta"] = del->delta;
    } else {
        const auto &rev = std::get<ReverseOp>(op);
        j["kind"] = "reverse";
        j["x"] = rev.x;
        j["y"] = rev.y;
        j["T"] = set_to_json(rev.T);
        j["E"] = set_to_json(rev.E);
        j["F"] = set_to_json(rev.F);
        j["delta"] = rev.delta;
    }
    return j;
}

bool heap_less(const InsertOp &a, const InsertOp &b) {
    if (a.delta != b.delta) { return a.delta < b.delta; }
    return std::tie(a.x, a.y, a.T) > std::tie(b.x, b.y, b.T);
}

bool heap_less(const DeleteOp &a, const DeleteOp &b) {
    if (a.delta != b.delta) { return a.delta < b.delta; }
    return std::tie(a.x, a.y, a.C) > std::tie(b.x, b.y, b.C);
}

bool heap_less(const ReverseOp &a, const ReverseOp &b) {
    if (a.delta != b.delta) { return a.delta < b.delta; }
    return std::tie(a.x, a.y, a.T) > std::tie(b.x, b.y, b.T);
}

void PathStore::record(const std::vector<int> &path, int x, int y) {
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        by_step_[{path[i], path[i + 1]}].insert({x, y});
    }
}

std::vector<std::pair<int, int>> PathStore::take(int u, int v) {
    auto it = by_step_.find({u, v});
    if (it == by_step_.end()) { return {}; }
    std::vector<std::pair<int, int>> out(it->second.begin(), it->second.end());
    by_step_.erase(it);
    return out;
}

bool insert_valid(const Pdag &g, const InsertOp &op, PathStore *paths) {
    int x = op.x, y = op.y;
    if (x == y || g.is_adjacent(x, y)) { return false; }
    if (op.T.contains(x) || op.T.contains(y)) { return false; }
    if (!is_subset(op.T, g.neighbors(y)) || have_overlap(op.T, g.adjacent(x))) {
        return false;
    }
    NodeSet blocking = g.neighbors_adjacent(y, x);
    blocking.insert(op.T.begin(), op.T.end());
    if (!g.is_clique(blocking)) { return false; }
    if (!equals_union(op.E, blocking, g.parents(y))) { return false; }
    auto path = g.find_unblocked_semidirected_path(y, x, blocking);
    if (path) {
        if (paths) { paths->record(*path, x, y); }
        return false;
    }
    return true;
}

bool delete_valid(const Pdag &g, const DeleteOp &op) {
    int x = op.x, y = op.y;
    if (x == y) { return false; }
    if (!g.has_directed_edge(x, y) && !g.has_undirected_edge(x, y)) { return false; }
    if (!is_subset(op.C, g.neighbors_adjacent(y, x))) { return false; }
    if (!g.is_clique(op.C)) { return false; }
    return equals_union(op.E, op.C, g.parents(y));
}

bool reverse_valid(const Pdag &g, const ReverseOp &op, PathStore *paths) {
    int x = op.x, y = op.y;
    if (!g.has_directed_edge(y, x)) { return false; }
    if (op.T.contains(x) || op.T.contains(y)) { return false; }
    if (!is_subset(op.T, g.neighbors(y)) || have_overlap(op.T, g.adjacent(x))) {
        return false;
    }
    if (op.F != g.parents(x)) { return false; }
    NodeSet clique = g.neighbors_adjacent(y, x);
    clique.insert(op.T.begin(), op.T.end());
    if (!g.is_clique(clique)) { return false; }
    if (!equals_union(op.E, clique, g.parents(y))) { return false; }
    NodeSet blocking = clique;
    blocking.insert(g.neighbors(x).begin(), g.neighbors(x).end());
    auto path = g.find_unblocked_semidirected_path(y, x, blocking,
                                                   std::make_pair(y, x));
    if (path) {
        if (paths) { paths->record(*path, x, y); }
        return false;
    }
    return true;
}

void find_inserts_to_y(const Pdag &g, const Scorer &scorer, int y,
                       std::vector<InsertOp> &out, int only_x, bool positive_only,
                       const ForbiddenPairs *forbidden) {
    std::vector<int> xs;
    if (only_x >= 0) {
        xs.push_back(only_x);
    } else {
        for (int x = 0; x < g.node_count(); ++x) {
            if (x != y && !g.is_adjacent(x, y)) { xs.push_back(x); }
        }
    }
    for (int x: xs) {
        if (forbidden && is_forbidden(*forbidden, x, y)) { continue; }
        NodeSet ne_y_ad_x = g.neighbors_adjacent(y, x);
        // Every T contains this base, so a non-clique base rules out all T.
        if (!g.is_clique(ne_y_ad_x)) { continue; }
        NodeSet t_pool = g.neighbors_not_adjacent(y, x);
        t_pool.erase(x);
        std::vector<int> pool(t_pool.begin(), t_pool.end());

        // Depth-first over clique-compatible subsets T of the pool; each stack
        // entry carries T and the pool index extensions may start from, so
        // every subset is generated exactly once.
        std::vector<std::pair<NodeSet, size_t>> stack{{NodeSet{}, 0}};
        while (!stack.empty()) {
            auto [T, next] = std::move(stack.back());
            stack.pop_back();

            NodeSet clique = ne_y_ad_x;
            clique.insert(T.begin(), T.end());
            NodeSet effective = set_union(clique, g.parents(y));
            double delta = scorer.insert_delta(x, y, effective);
            if (delta > 0 || !positive_only) {
                out.push_back({x, y, T, std::move(effective), delta});
                std::push_heap(out.begin(), out.end(),
                               [](const InsertOp &a, const InsertOp &b) {
                                   return heap_less(a, b);
                               });
            }
            for (size_t i = next; i < pool.size(); ++i) {
                int t = pool[i];
                if (!is_subset(clique, g.adjacent(t))) { continue; }
                NodeSet T2 = T;
                T2.insert(t);
                stack.emplace_back(std::move(T2), i + 1);
            }
        }
    }
}

void find_deletes_of_edge(const Pdag &g, const Scorer &scorer, int x, int y,
                          std::vector<DeleteOp> &out, bool nonnegative_only) {
    if (!g.has_directed_edge(x, y) && !g.has_undirected_edge(x, y)) { return; }
    NodeSet pool_set = g.neighbors_adjacent(y, x);
    std::vector<int> pool(pool_set.begin(), pool_set.end());

    std::vector<std::pair<NodeSet, size_t>> stack{{NodeSet{}, 0}};
    while (!stack.empty()) {
        auto [C, next] = std::move(stack.back());
        stack.pop_back();

        NodeSet effective = set_union(C, g.parents(y));
        double delta = scorer.delete_delta(x, y, effective);
        if (delta >= 0 || !nonnegative_only) {
            out.push_back({x, y, C, std::move(effective), delta});
            std::push_heap(out.begin(), out.end(),
                           [](const DeleteOp &a, const DeleteOp &b) {
                               return heap_less(a, b);
                           });
        }
        for (size_t i = next; i < pool.size(); ++i) {
            int c = pool[i];
            if (!is_subset(C, g.adjacent(c))) { continue; }
            NodeSet C2 = C;
            C2.insert(c);
            stack.emplace_back(std::move(C2), i + 1);
        }
    }
}

void find_deletes_to_y(const Pdag &g, const Scorer &scorer, int y,
                       std::vector<DeleteOp> &out, bool nonnegative_only) {
    for (int x: g.parents(y)) { find_deletes_of_edge(g, scorer, x, y, out, nonnegative_only); }
    for (int x: g.neighbors(y)) { find_deletes_of_edge(g, scorer, x, y, out, nonnegative_only); }
}

void find_reversals_of_edge(const Pdag &g, const Scorer &scorer, int x, int y,
                            std::vector<ReverseOp> &out) {
    if (!g.has_directed_edge(y, x)) { return; }
    NodeSet pa_x_without_y = g.parents(x);
    pa_x_without_y.erase(y);
    double delta_x = scorer.local_score(x, pa_x_without_y) -
                     scorer.local_score(x, g.parents(x));

    std::vector<InsertOp> inserts;
    find_inserts_to_y(g, scorer, y, inserts, x, /*positive_only=*/false);
    for (auto &ins: inserts) {
        double delta = ins.delta + delta_x;
        if (delta <= 0) { continue; }
        out.push_back({x, y, std::move(ins.T), std::move(ins.E), g.parents(x), delta});
        std::push_heap(out.begin(), out.end(),
                       [](const ReverseOp &a, const ReverseOp &b) {
                           return heap_less(a, b);
                       });
    }
}

void find_reversals_to_y(const Pdag &g, const Scorer &scorer, int y,
                         std::vector<ReverseOp> &out) {
    for (int x: g.children(y)) { find_reversals_of_edge(g, scorer, x, y, out); }
}

void find_reversals_from_x(const Pdag &g, const Scorer &scorer, int x,
                           std::vector<ReverseOp> &out) {
    for (int y: g.parents(x)) { find_reversals_of_edge(g, scorer, x, y, out); }
}

std::vector<InsertOp> enumerate_inserts_to(const Pdag &g, const Scorer &scorer, int y,
                                           const ForbiddenPairs &forbidden) {
    std::vector<InsertOp> out;
    find_inserts_to_y(g, scorer, y, out, -1, true, &forbidden);
    return out;
}

std::vector<DeleteOp> enumerate_deletes(const Pdag &g, const Scorer &scorer,
                                        bool nonnegative_only) {
    std::vector<DeleteOp> out;
    for (int y = 0; y < g.node_count(); ++y) {
        find_deletes_to_y(g, scorer, y, out, nonnegative_only);
    }
    return out;
}

std::vector<ReverseOp> enumerate_reversals(const Pdag &g, const Scorer &scorer) {
    std::vector<ReverseOp> out;
    for (int y = 0; y < g.node_count(); ++y) { find_reversals_to_y(g, scorer, y, out); }
    return out;
}

namespace {

/// Mutation wrapper that records the first-seen state of every touched pair so
/// the final diff can be coalesced per pair.
struct Editor {
    Pdag &g;
    std::map<std::pair<int, int>, EdgeState> initial;

    void note(int a, int b) {
        std::pair<int, int> k{std::min(a, b), std::max(a, b)};
        initial.try_emplace(k, g.edge_state(k.first, k.second));
    }
    void add_directed(int x, int y) {
        note(x, y);
        g.add_directed_edge(x, y);
    }
    void remove_directed(int x, int y) {
        note(x, y);
        g.remove_directed_edge(x, y);
    }
    void remove_undirected(int x, int y) {
        note(x, y);
        g.remove_undirected_edge(x, y);
    }
    void direct(int x, int y) {
        note(x, y);
        g.remove_undirected_edge(x, y);
        g.add_directed_edge(x, y);
    }
    void undirect(int x, int y) {
        note(x, y);
        g.remove_directed_edge(x, y);
        g.add_undirected_edge(x, y);
    }

    std::vector<EdgeChange> finish() const {
        std::vector<EdgeChange> out;
        for (const auto &[k, before]: initial) {
            EdgeState after = g.edge_state(k.first, k.second);
            if (after != before) { out.push_back({k.first, k.second, before, after}); }
        }
        return out;
    }
};

/// FIFO of edges whose orientation must be rechecked; deduplicated.
struct EdgeQueue {
    std::deque<std::tuple<int, int, bool>> q;// (x, y, directed)
    std::set<std::tuple<int, int, bool>> seen;

    void push_directed(int x, int y) { push(x, y, true); }
    void push_undirected(int x, int y) { push(std::min(x, y), std::max(x, y), false); }
    void push(int x, int y, bool directed) {
        if (seen.insert({x, y, directed}).second) { q.push_back({x, y, directed}); }
    }
    bool empty() const { return q.empty(); }
    std::tuple<int, int, bool> pop() {
        auto e = q.front();
        q.pop_front();
        seen.erase(e);
        return e;
    }
};

/// Some z → y with z not adjacent to x makes x → y part of a v-structure.
bool part_of_v_structure(const Pdag &g, int x, int y) {
    for (int z: g.parents(y)) {
        if (z != x && !g.is_adjacent(z, x)) { return true; }
    }
    return false;
}

/// Would the orientation rules compel x → y (given the rest of the graph)?
/// Rule 1: z → x with z, y non-adjacent. Rule 2: directed path x → z → y.
/// Rule 3: two non-adjacent z, w with z - x, w - x, z → y, w → y.
bool oriented_by_rules(const Pdag &g, int x, int y) {
    for (int z: g.parents(x)) {
        if (z != y && !g.is_adjacent(z, y)) { return true; }
    }
    for (int z: g.children(x)) {
        if (z != y && g.has_directed_edge(z, y)) { return true; }
    }
    const NodeSet &ne_x = g.neighbors(x);
    for (int z: ne_x) {
        if (z == y || !g.has_directed_edge(z, y)) { continue; }
        for (int w: ne_x) {
            if (w <= z || w == y || !g.has_directed_edge(w, y)) { continue; }
            if (!g.is_adjacent(z, w)) { return true; }
        }
    }
    return false;
}

void add_edges_around(const Pdag &g, int a, int b, EdgeQueue &q) {
    for (int v: {a, b}) {
        for (int n: g.neighbors(v)) {
            if (n != a && n != b) { q.push_undirected(v, n); }
        }
        for (int c: g.children(v)) {
            if (c != a && c != b) { q.push_directed(v, c); }
        }
        for (int p: g.parents(v)) {
            if (p != a && p != b) { q.push_directed(p, v); }
        }
    }
}

/// Local repair after an operator application: rechecks queued edges against
/// the v-structure and orientation rules, undirecting directed edges that are
/// no longer compelled and orienting undirected edges that now are, cascading
/// through the affected neighborhood.
void maintain_cpdag(Editor &ed, EdgeQueue &q) {
    const Pdag &g = ed.g;
    while (!q.empty()) {
        auto [x, y, directed] = q.pop();
        if (directed) {
            if (!g.has_directed_edge(x, y)) { continue; }
            if (part_of_v_structure(g, x, y) || oriented_by_rules(g, x, y)) { continue; }
            ed.undirect(x, y);
            q.push_undirected(x, y);
            add_edges_around(g, x, y, q);
        } else {
            if (!g.has_undirected_edge(x, y)) { continue; }
            if (oriented_by_rules(g, x, y)) {
                ed.direct(x, y);
            } else if (oriented_by_rules(g, y, x)) {
                ed.direct(y, x);
            } else {
                continue;
            }
            add_edges_around(g, x, y, q);
        }
    }
}

void do_insert(Editor &ed, const InsertOp &op, EdgeQueue &q) {
    ed.add_directed(op.x, op.y);
    q.push_directed(op.x, op.y);
    for (int t: op.T) {
        ed.direct(t, op.y);
        q.push_directed(t, op.y);
    }
    add_edges_around(ed.g, op.x, op.y, q);
    for (int t: op.T) { add_edges_around(ed.g, t, op.y, q); }
}

}// namespace

std::vector<EdgeChange> apply_insert(Pdag &g, const InsertOp &op) {
    Editor ed{g, {}};
    EdgeQueue q;
    do_insert(ed, op, q);
    maintain_cpdag(ed, q);
    return ed.finish();
}

std::vector<EdgeChange> apply_delete(Pdag &g, const DeleteOp &op) {
    Editor ed{g, {}};
    EdgeQueue q;
    NodeSet h = set_difference(g.neighbors_adjacent(op.y, op.x), op.C);
    if (g.has_directed_edge(op.x, op.y)) {
        ed.remove_directed(op.x, op.y);
    } else {
        ed.remove_undirected(op.x, op.y);
    }
    for (int v: h) {
        ed.direct(op.y, v);
        q.push_directed(op.y, v);
        if (g.has_undirected_edge(op.x, v)) {
            ed.direct(op.x, v);
            q.push_directed(op.x, v);
        } else if (g.has_directed_edge(op.x, v)) {
            q.push_directed(op.x, v);
        }
    }
    add_edges_around(g, op.x, op.y, q);
    for (int v: h) { add_edges_around(g, op.y, v, q); }
    maintain_cpdag(ed, q);
    return ed.finish();
}

std::vector<EdgeChange> apply_reverse(Pdag &g, const ReverseOp &op) {
    Editor ed{g, {}};
    EdgeQueue q;
    ed.remove_directed(op.y, op.x);
    add_edges_around(g, op.y, op.x, q);
    do_insert(ed, InsertOp{op.x, op.y, op.T, op.E, op.delta}, q);
    maintain_cpdag(ed, q);
    return ed.finish();
}

std::vector<EdgeChange> apply_operator(Pdag &g, const Operator &op) {
    if (const auto *ins = std::get_if<InsertOp>(&op)) {
        if (!insert_valid(g, *ins)) { throw std::invalid_argument("invalid insert"); }
        return apply_insert(g, *ins);
    }
    if (const auto *del = std::get_if<DeleteOp>(&op)) {
        if (!delete_valid(g, *del)) { throw std::invalid_argument("invalid delete"); }
        return apply_delete(g, *del);
    }
    const auto &rev = std::get<ReverseOp>(op);
    if (!reverse_valid(g, rev)) { throw std::invalid_argument("invalid reverse"); }
    return apply_reverse(g, rev);
}

}// namespace xges
