#pragma once

#include <algorithm>
#include <set>

namespace xges {

using NodeSet = std::set<int>;

inline bool is_subset(const NodeSet &small, const NodeSet &big) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

inline bool have_overlap(const NodeSet &a, const NodeSet &b) {
    auto it_a = a.begin();
    auto it_b = b.begin();
    while (it_a != a.end() && it_b != b.end()) {
        if (*it_a < *it_b) {
            ++it_a;
        } else if (*it_b < *it_a) {
            ++it_b;
        } else {
            return true;
        }
    }
    return false;
}

inline NodeSet set_intersection(const NodeSet &a, const NodeSet &b) {
    NodeSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::inserter(out, out.begin()));
    return out;
}

inline NodeSet set_difference(const NodeSet &a, const NodeSet &b) {
    NodeSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.begin()));
    return out;
}

inline NodeSet set_union(const NodeSet &a, const NodeSet &b) {
    NodeSet out = a;
    out.insert(b.begin(), b.end());
    return out;
}

/// true iff target == a ∪ b
inline bool equals_union(const NodeSet &target, const NodeSet &a, const NodeSet &b) {
    if (!is_subset(a, target) || !is_subset(b, target)) { return false; }
    for (int v: target) {
        if (!a.contains(v) && !b.contains(v)) { return false; }
    }
    return true;
}

}// namespace xges
