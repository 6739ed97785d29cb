#include "xges/search.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

namespace xges {

namespace {

const auto insert_cmp = [](const InsertOp &a, const InsertOp &b) { return heap_less(a, b); };
const auto delete_cmp = [](const DeleteOp &a, const DeleteOp &b) { return heap_less(a, b); };
const auto reverse_cmp = [](const ReverseOp &a, const ReverseOp &b) { return heap_less(a, b); };

}// namespace

SearchState::SearchState(const Scorer &s, Pdag g)
    : scorer(&s), graph(std::move(g)),
      total_score(s.total_dag_score(consistent_extension(graph))) {}

nlohmann::json SearchResult::stats_json() const {
    return {
            {"score", score},
            {"operators_applied", stats.operators_applied},
            {"inserts_applied", stats.inserts_applied},
            {"deletes_applied", stats.deletes_applied},
            {"reversals_applied", stats.reversals_applied},
            {"score_calls", stats.score_requests},
            {"cache_misses", stats.cache_misses},
            {"runtime_ms", stats.runtime_ms},
    };
}

void init_candidates(SearchState &st, int kinds) {
    st.candidates = CandidateSet{};
    for (int y = 0; y < st.graph.node_count(); ++y) {
        if (kinds & kInserts) {
            find_inserts_to_y(st.graph, *st.scorer, y, st.candidates.inserts, -1, true,
                              &st.forbidden_inserts);
        }
        if (kinds & kDeletes) {
            find_deletes_to_y(st.graph, *st.scorer, y, st.candidates.deletes, true);
        }
        if (kinds & kReversals) {
            find_reversals_to_y(st.graph, *st.scorer, y, st.candidates.reversals);
        }
    }
}

namespace {

// One single-edge update in canonical roles: U1 none→a-b, U2 none→a→b,
// U3 a-b→none, U4 a-b→a→b, U5 a→b→none, U6 a→b→a-b, U7 a→b→a←b.
struct Update {
    int type;
    int a;
    int b;
};

Update classify(const EdgeChange &c) {
    using S = EdgeState;
    switch (c.before) {
        case S::Absent:
            if (c.after == S::Undirected) { return {1, c.a, c.b}; }
            return c.after == S::TowardB ? Update{2, c.a, c.b} : Update{2, c.b, c.a};
        case S::Undirected:
            if (c.after == S::Absent) { return {3, c.a, c.b}; }
            return c.after == S::TowardB ? Update{4, c.a, c.b} : Update{4, c.b, c.a};
        case S::TowardB:
            if (c.after == S::Absent) { return {5, c.a, c.b}; }
            if (c.after == S::Undirected) { return {6, c.a, c.b}; }
            return {7, c.a, c.b};
        case S::TowardA:
            if (c.after == S::Absent) { return {5, c.b, c.a}; }
            if (c.after == S::Undirected) { return {6, c.b, c.a}; }
            return {7, c.b, c.a};
    }
    throw std::logic_error("bad edge state");
}

struct RefreshTasks {
    std::set<int> ins_full;
    std::set<std::pair<int, int>> ins_partial;// (x, y)
    std::set<int> del_target, del_source;
    std::set<int> rev_target, rev_source;
    std::set<std::pair<int, int>> rev_partial;// (x, y): reversal of y → x
};

void take_paths(PathStore &store, int u, int v, std::set<std::pair<int, int>> &out) {
    for (const auto &p: store.take(u, v)) { out.insert(p); }
}

/// Necessary-condition scopes of one single-edge update, evaluated against the
/// graph state just before the update is applied.
void collect_scopes(const Pdag &g, const EdgeChange &c, int kinds, CandidateSet &cand,
                    RefreshTasks &t) {
    Update u = classify(c);
    int a = u.a, b = u.b;
    const NodeSet &ne_a = g.neighbors(a);
    const NodeSet &ne_b = g.neighbors(b);
    NodeSet ne_common = set_intersection(ne_a, ne_b);

    if (kinds & kInserts) {
        switch (u.type) {
            case 1:
                t.ins_full.insert(a);
                [[fallthrough]];
            case 2:
                t.ins_full.insert(b);
                for (int y: ne_common) { t.ins_full.insert(y); }
                for (int y: ne_b) { t.ins_partial.insert({a, y}); }
                for (int y: ne_a) { t.ins_partial.insert({b, y}); }
                break;
            case 3:
                for (int y: ne_b) { t.ins_partial.insert({a, y}); }
                t.ins_partial.insert({a, b});
                for (int y: ne_a) { t.ins_partial.insert({b, y}); }
                t.ins_partial.insert({b, a});
                for (int x: g.adjacent(b)) { t.ins_partial.insert({x, a}); }
                for (int x: g.adjacent(a)) { t.ins_partial.insert({x, b}); }
                take_paths(cand.insert_paths, a, b, t.ins_partial);
                take_paths(cand.insert_paths, b, a, t.ins_partial);
                break;
            case 4:
                for (int x: g.adjacent(b)) { t.ins_partial.insert({x, a}); }
                t.ins_full.insert(b);
                take_paths(cand.insert_paths, b, a, t.ins_partial);
                break;
            case 5:
                t.ins_full.insert(b);
                for (int y: ne_b) { t.ins_partial.insert({a, y}); }
                t.ins_partial.insert({a, b});
                for (int y: ne_a) { t.ins_partial.insert({b, y}); }
                t.ins_partial.insert({b, a});
                take_paths(cand.insert_paths, a, b, t.ins_partial);
                break;
            case 6:
                t.ins_full.insert(a);
                t.ins_full.insert(b);
                break;
            case 7:
                t.ins_full.insert(a);
                t.ins_full.insert(b);
                take_paths(cand.insert_paths, a, b, t.ins_partial);
                break;
        }
    }

    if (kinds & kDeletes) {
        switch (u.type) {
            case 1:
                t.del_target.insert(a);
                [[fallthrough]];
            case 2:
                t.del_target.insert(b);
                t.del_source.insert(a);
                t.del_source.insert(b);
                for (int y: ne_common) { t.del_target.insert(y); }
                break;
            case 3:
                break;
            case 4:
            case 5:
                t.del_target.insert(b);
                break;
            case 6:
            case 7:
                t.del_target.insert(a);
                t.del_target.insert(b);
                break;
        }
    }

    if (kinds & kReversals) {
        switch (u.type) {
            case 1:
                t.rev_target.insert(a);
                t.rev_target.insert(b);
                for (int y: ne_common) { t.rev_target.insert(y); }
                t.rev_source.insert(a);
                t.rev_source.insert(b);
                break;
            case 2:
                t.rev_target.insert(b);
                for (int y: ne_common) { t.rev_target.insert(y); }
                for (int y: ne_b) { t.rev_partial.insert({a, y}); }
                t.rev_source.insert(b);
                break;
            case 3:
                for (int y: ne_b) { t.rev_partial.insert({a, y}); }
                t.rev_partial.insert({a, b});
                for (int y: ne_a) { t.rev_partial.insert({b, y}); }
                t.rev_partial.insert({b, a});
                for (int x: g.adjacent(b)) { t.rev_partial.insert({x, a}); }
                for (int x: g.adjacent(a)) { t.rev_partial.insert({x, b}); }
                take_paths(cand.reverse_paths, a, b, t.rev_partial);
                take_paths(cand.reverse_paths, b, a, t.rev_partial);
                break;
            case 4:
                for (int x: g.adjacent(b)) { t.rev_partial.insert({x, a}); }
                t.rev_target.insert(b);
                t.rev_source.insert(b);
                take_paths(cand.reverse_paths, b, a, t.rev_partial);
                break;
            case 5:
                t.rev_target.insert(b);
                for (int y: ne_b) { t.rev_partial.insert({a, y}); }
                t.rev_partial.insert({a, b});
                t.rev_source.insert(b);
                take_paths(cand.reverse_paths, a, b, t.rev_partial);
                break;
            case 6:
                t.rev_target.insert(a);
                t.rev_target.insert(b);
                t.rev_source.insert(b);
                break;
            case 7:
                t.rev_target.insert(a);
                t.rev_target.insert(b);
                t.rev_source.insert(a);
                t.rev_source.insert(b);
                take_paths(cand.reverse_paths, a, b, t.rev_partial);
                break;
        }
    }
}

void run_tasks(SearchState &st, const RefreshTasks &t, int kinds) {
    const Pdag &g = st.graph;
    const Scorer &sc = *st.scorer;
    CandidateSet &c = st.candidates;

    if (kinds & kInserts) {
        for (int y: t.ins_full) {
            find_inserts_to_y(g, sc, y, c.inserts, -1, true, &st.forbidden_inserts);
        }
        for (auto [x, y]: t.ins_partial) {
            if (x == y || t.ins_full.contains(y)) { continue; }
            if (g.is_adjacent(x, y)) { continue; }
            if (is_forbidden(st.forbidden_inserts, x, y)) { continue; }
            find_inserts_to_y(g, sc, y, c.inserts, x, true, nullptr);
        }
    }
    if (kinds & kDeletes) {
        for (int y: t.del_target) { find_deletes_to_y(g, sc, y, c.deletes, true); }
        for (int x: t.del_source) {
            for (int y: g.children(x)) {
                if (!t.del_target.contains(y)) {
                    find_deletes_of_edge(g, sc, x, y, c.deletes, true);
                }
            }
            for (int y: g.neighbors(x)) {
                if (!t.del_target.contains(y)) {
                    find_deletes_of_edge(g, sc, x, y, c.deletes, true);
                }
            }
        }
    }
    if (kinds & kReversals) {
        for (int y: t.rev_target) { find_reversals_to_y(g, sc, y, c.reversals); }
        for (int x: t.rev_source) {
            for (int y: g.parents(x)) {
                if (!t.rev_target.contains(y)) {
                    find_reversals_of_edge(g, sc, x, y, c.reversals);
                }
            }
        }
        for (auto [x, y]: t.rev_partial) {
            if (t.rev_target.contains(y) || t.rev_source.contains(x)) { continue; }
            find_reversals_of_edge(g, sc, x, y, c.reversals);
        }
    }
}

}// namespace

void refresh_candidates(SearchState &st, const std::vector<EdgeChange> &changes,
                        int kinds) {
    if (changes.empty()) { return; }
    Pdag &g = st.graph;
    // Rewind the diff, then replay it one single-edge update at a time so each
    // update's scopes are computed against the state it actually applied to.
    for (auto it = changes.rbegin(); it != changes.rend(); ++it) {
        g.apply_change(it->reversed_in_time());
    }
    RefreshTasks tasks;
    for (const EdgeChange &c: changes) {
        collect_scopes(g, c, kinds, st.candidates, tasks);
        g.apply_change(c);
    }
    run_tasks(st, tasks, kinds);
}

namespace {

const InsertOp *peek_valid_insert(SearchState &st) {
    auto &h = st.candidates.inserts;
    while (!h.empty()) {
        if (h.front().delta <= 0) {
            h.clear();
            return nullptr;
        }
        if (!is_forbidden(st.forbidden_inserts, h.front().x, h.front().y) &&
            insert_valid(st.graph, h.front(), &st.candidates.insert_paths)) {
            return &h.front();
        }
        std::pop_heap(h.begin(), h.end(), insert_cmp);
        h.pop_back();
    }
    return nullptr;
}

const DeleteOp *peek_valid_delete(SearchState &st, bool strict) {
    auto &h = st.candidates.deletes;
    while (!h.empty()) {
        double delta = h.front().delta;
        if (strict ? delta <= 0 : delta < 0) {
            h.clear();
            return nullptr;
        }
        if (delete_valid(st.graph, h.front())) { return &h.front(); }
        std::pop_heap(h.begin(), h.end(), delete_cmp);
        h.pop_back();
    }
    return nullptr;
}

const ReverseOp *peek_valid_reverse(SearchState &st) {
    auto &h = st.candidates.reversals;
    while (!h.empty()) {
        if (h.front().delta <= 0) {
            h.clear();
            return nullptr;
        }
        if (reverse_valid(st.graph, h.front(), &st.candidates.reverse_paths)) {
            return &h.front();
        }
        std::pop_heap(h.begin(), h.end(), reverse_cmp);
        h.pop_back();
    }
    return nullptr;
}

void trace_op(SearchState &st, const char *kind, int x, int y, double delta) {
    if (!st.trace) { return; }
    nlohmann::json j{{"step", st.stats.operators_applied},
                     {"kind", kind},
                     {"x", x},
                     {"y", y},
                     {"delta", delta},
                     {"total_score", st.total_score}};
    *st.trace << j.dump() << "\n";
}

void check_score_accounting(const SearchState &st) {
#ifndef NDEBUG
    if (st.graph.node_count() <= 30) {
        double truth = st.scorer->total_dag_score(consistent_extension(st.graph));
        assert(std::abs(st.total_score - truth) <=
               1e-6 * std::max(1.0, std::abs(truth)));
    }
#else
    (void) st;
#endif
}

void after_apply(SearchState &st, const std::vector<EdgeChange> &changes, int kinds,
                 bool naive) {
    if (naive) {
        init_candidates(st, kinds);
    } else {
        refresh_candidates(st, changes, kinds);
    }
    check_score_accounting(st);
}

enum class Kind { None, Insert, Delete, Reverse };

void apply_top(SearchState &st, Kind kind, int kinds, bool naive) {
    switch (kind) {
        case Kind::Insert: {
            InsertOp op = st.candidates.inserts.front();
            std::pop_heap(st.candidates.inserts.begin(), st.candidates.inserts.end(),
                          insert_cmp);
            st.candidates.inserts.pop_back();
            auto changes = apply_insert(st.graph, op);
            st.total_score += op.delta;
            st.stats.operators_applied++;
            st.stats.inserts_applied++;
            trace_op(st, "insert", op.x, op.y, op.delta);
            after_apply(st, changes, kinds, naive);
            break;
        }
        case Kind::Delete: {
            DeleteOp op = st.candidates.deletes.front();
            std::pop_heap(st.candidates.deletes.begin(), st.candidates.deletes.end(),
                          delete_cmp);
            st.candidates.deletes.pop_back();
            auto changes = apply_delete(st.graph, op);
            st.total_score += op.delta;
            st.stats.operators_applied++;
            st.stats.deletes_applied++;
            trace_op(st, "delete", op.x, op.y, op.delta);
            after_apply(st, changes, kinds, naive);
            break;
        }
        case Kind::Reverse: {
            ReverseOp op = st.candidates.reversals.front();
            std::pop_heap(st.candidates.reversals.begin(), st.candidates.reversals.end(),
                          reverse_cmp);
            st.candidates.reversals.pop_back();
            auto changes = apply_reverse(st.graph, op);
            st.total_score += op.delta;
            st.stats.operators_applied++;
            st.stats.reversals_applied++;
            trace_op(st, "reverse", op.x, op.y, op.delta);
            after_apply(st, changes, kinds, naive);
            break;
        }
        case Kind::None:
            break;
    }
}

}// namespace

bool search_step(SearchState &st, int kinds, bool priority, bool strict_deletes,
                 bool naive) {
    if (priority) {
        if ((kinds & kDeletes) && peek_valid_delete(st, strict_deletes)) {
            apply_top(st, Kind::Delete, kinds, naive);
            return true;
        }
        if ((kinds & kReversals) && peek_valid_reverse(st)) {
            apply_top(st, Kind::Reverse, kinds, naive);
            return true;
        }
        if ((kinds & kInserts) && peek_valid_insert(st)) {
            apply_top(st, Kind::Insert, kinds, naive);
            return true;
        }
        return false;
    }

    // Simultaneous mode: enabled kinds compete by raw delta, all strictly
    // positive; ties broken delete > reverse > insert for determinism.
    Kind best = Kind::None;
    double best_delta = 0;
    if (kinds & kDeletes) {
        if (const DeleteOp *d = peek_valid_delete(st, true); d && d->delta > best_delta) {
            best = Kind::Delete;
            best_delta = d->delta;
        }
    }
    if (kinds & kReversals) {
        if (const ReverseOp *r = peek_valid_reverse(st); r && r->delta > best_delta) {
            best = Kind::Reverse;
            best_delta = r->delta;
        }
    }
    if (kinds & kInserts) {
        if (const InsertOp *i = peek_valid_insert(st); i && i->delta > best_delta) {
            best = Kind::Insert;
            best_delta = i->delta;
        }
    }
    if (best == Kind::None) { return false; }
    apply_top(st, best, kinds, naive);
    return true;
}

void run_xges0(SearchState &st, int kinds) {
    while (search_step(st, kinds, /*priority=*/true)) {}
}

std::vector<Operator> find_superset_violations(const SearchState &st) {
    const Pdag &g = st.graph;
    const Scorer &sc = *st.scorer;
    std::vector<Operator> missing;

    auto has_insert = [&](const InsertOp &op) {
        return std::any_of(st.candidates.inserts.begin(), st.candidates.inserts.end(),
                           [&](const InsertOp &h) {
                               return h.x == op.x && h.y == op.y && h.T == op.T &&
                                      h.E == op.E;
                           });
    };
    auto has_delete = [&](const DeleteOp &op) {
        return std::any_of(st.candidates.deletes.begin(), st.candidates.deletes.end(),
                           [&](const DeleteOp &h) {
                               return h.x == op.x && h.y == op.y && h.C == op.C &&
                                      h.E == op.E;
                           });
    };
    auto has_reverse = [&](const ReverseOp &op) {
        return std::any_of(st.candidates.reversals.begin(),
                           st.candidates.reversals.end(), [&](const ReverseOp &h) {
                               return h.x == op.x && h.y == op.y && h.T == op.T &&
                                      h.E == op.E && h.F == op.F;
                           });
    };

    for (int y = 0; y < g.node_count(); ++y) {
        std::vector<InsertOp> ins;
        find_inserts_to_y(g, sc, y, ins, -1, true, &st.forbidden_inserts);
        for (const InsertOp &op: ins) {
            if (insert_valid(g, op) && !has_insert(op)) { missing.push_back(op); }
        }
        std::vector<DeleteOp> dels;
        find_deletes_to_y(g, sc, y, dels, true);
        for (const DeleteOp &op: dels) {
            if (delete_valid(g, op) && !has_delete(op)) { missing.push_back(op); }
        }
        std::vector<ReverseOp> revs;
        find_reversals_to_y(g, sc, y, revs);
        for (const ReverseOp &op: revs) {
            if (reverse_valid(g, op) && !has_reverse(op)) { missing.push_back(op); }
        }
    }
    return missing;
}

namespace {

class RunTimer {
public:
    explicit RunTimer(const Scorer &sc)
        : scorer_(sc), start_(std::chrono::steady_clock::now()),
          requests0_(sc.score_requests()), misses0_(sc.cache_misses()) {}

    SearchResult finish(SearchState &st) const {
        st.stats.score_requests = scorer_.score_requests() - requests0_;
        st.stats.cache_misses = scorer_.cache_misses() - misses0_;
        st.stats.runtime_ms =
                std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start_)
                        .count();
        return {std::move(st.graph), st.total_score, st.stats};
    }

private:
    const Scorer &scorer_;
    std::chrono::steady_clock::time_point start_;
    long requests0_;
    long misses0_;
};

}// namespace

SearchResult fit_xges0(const Scorer &scorer, const Pdag &init,
                   const ForbiddenPairs &forbidden, std::ostream *trace) {
    RunTimer timer(scorer);
    SearchState st(scorer, init);
    st.forbidden_inserts = forbidden;
    st.trace = trace;
    init_candidates(st, kAllKinds);
    run_xges0(st);
    return timer.finish(st);
}

SearchResult fit_xges(const Scorer &scorer, std::ostream *trace) {
    RunTimer timer(scorer);
    SearchState st(scorer, Pdag(scorer.d()));
    st.trace = trace;
    init_candidates(st, kAllKinds);
    run_xges0(st);

    auto build_deletions = [&] {
        std::vector<DeleteOp> dels =
                enumerate_deletes(st.graph, scorer, /*nonnegative_only=*/false);
        // Try the highest-delta deletions first.
        std::sort(dels.begin(), dels.end(),
                  [](const DeleteOp &a, const DeleteOp &b) { return heap_less(b, a); });
        return dels;
    };

    std::vector<DeleteOp> deletions = build_deletions();
    size_t idx = 0;
    while (idx < deletions.size()) {
        DeleteOp del = deletions[idx++];
        if (!delete_valid(st.graph, del)) { continue; }

        SearchState trial = st;
        std::ostringstream trial_trace;
        trial.trace = st.trace ? &trial_trace : nullptr;
        std::pair<int, int> pair{std::min(del.x, del.y), std::max(del.x, del.y)};
        trial.forbidden_inserts.insert(pair);

        auto changes = apply_delete(trial.graph, del);
        trial.total_score += del.delta;
        trial.stats.operators_applied++;
        trial.stats.deletes_applied++;
        trace_op(trial, "delete", del.x, del.y, del.delta);
        refresh_candidates(trial, changes, kAllKinds);
        run_xges0(trial);

        if (trial.total_score > st.total_score + 1e-7) {
            if (st.trace) { *st.trace << trial_trace.str(); }
            st = std::move(trial);
            st.trace = trace;
            // The deleted pair is only off-limits during its own resumed run;
            // re-admit its inserts so the candidate superset holds again.
            st.forbidden_inserts.erase(pair);
            if (!st.graph.is_adjacent(pair.first, pair.second)) {
                find_inserts_to_y(st.graph, scorer, pair.second, st.candidates.inserts,
                                  pair.first, true, &st.forbidden_inserts);
                find_inserts_to_y(st.graph, scorer, pair.first, st.candidates.inserts,
                                  pair.second, true, &st.forbidden_inserts);
            }
            deletions = build_deletions();
            idx = 0;
        }
    }
    return timer.finish(st);
}

SearchResult fit_ges(const Scorer &scorer, bool reversal_phase, bool simultaneous_ops,
                 bool naive, std::ostream *trace) {
    RunTimer timer(scorer);
    SearchState st(scorer, Pdag(scorer.d()));
    st.trace = trace;

    if (simultaneous_ops) {
        int kinds = kInserts | kDeletes;
        init_candidates(st, kinds);
        while (search_step(st, kinds, /*priority=*/false, /*strict_deletes=*/true,
                           naive)) {}
        return timer.finish(st);
    }

    bool progress = true;
    while (progress) {
        progress = false;
        init_candidates(st, kInserts);
        while (search_step(st, kInserts, true, true, naive)) { progress = true; }
        init_candidates(st, kDeletes);
        while (search_step(st, kDeletes, true, true, naive)) { progress = true; }
        if (!reversal_phase) { break; }
        init_candidates(st, kReversals);
        while (search_step(st, kReversals, true, true, naive)) { progress = true; }
    }
    return timer.finish(st);
}

std::vector<Pdag> all_dags(int d) {
    if (d < 1 || d > 6) { throw std::invalid_argument("all_dags limited to d <= 6"); }
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) { pairs.emplace_back(i, j); }
    }
    std::vector<Pdag> out;
    Pdag g(d);
    auto rec = [&](auto &&self, size_t k) -> void {
        if (k == pairs.size()) {
            if (!g.has_directed_cycle()) { out.push_back(g); }
            return;
        }
        auto [i, j] = pairs[k];
        self(self, k + 1);
        g.add_directed_edge(i, j);
        self(self, k + 1);
        g.remove_directed_edge(i, j);
        g.add_directed_edge(j, i);
        self(self, k + 1);
        g.remove_directed_edge(j, i);
    };
    rec(rec, 0);
    return out;
}

std::pair<Pdag, double> exhaustive_oracle(const Scorer &scorer, int d) {
    if (d > 5) { throw std::invalid_argument("exhaustive_oracle limited to d <= 5"); }
    if (d != scorer.d()) { throw std::invalid_argument("dimension mismatch"); }
    std::optional<Pdag> best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (const Pdag &dag: all_dags(d)) {
        double s = scorer.total_dag_score(dag);
        if (s > best_score) {
            best_score = s;
            best = dag;
        }
    }
    return {dag_to_cpdag(*best), best_score};
}

}// namespace xges
