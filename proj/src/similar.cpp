#include "pgmhd/similar.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace pgmhd {

namespace {

struct Accum {
    double log_co = 0.0;
    std::size_t common = 0;
};

NodeIndex require_outcome(const LeveledGraph& g, NodeRef x) {
    if (x.level == 0 || x.level >= g.levels()) {
        throw ArgumentError("similarity is defined for outcomes on levels 1.." + std::to_string(g.levels() - 1));
    }
    if (auto idx = g.find(x)) return *idx;
    throw LookupError("unknown node '" + std::string(x.label) + "' at level " + std::to_string(x.level));
}

double log_edge_prob(const LeveledGraph& g, std::size_t parent_level, NodeIndex w, NodeIndex v) {
    return std::log(static_cast<double>(g.arc_frequency_at(parent_level, w, v))) -
           std::log(static_cast<double>(g.out_weight_at(parent_level, w)));
}

// Walks pa(x) and, for every sibling y reached, accumulates log p(w,x) + log p(w,y).
// Each y is reached once per common parent, so the sum covers pa(x) & pa(y) exactly.
std::unordered_map<NodeIndex, Accum> accumulate(const LeveledGraph& g, std::size_t level, NodeIndex x) {
    std::unordered_map<NodeIndex, Accum> acc;
    const std::size_t up = level - 1;
    for (const NodeIndex w : g.parents_of(level, x)) {
        const double lx = log_edge_prob(g, up, w, x);
        for (const NodeIndex y : g.children_of(up, w)) {
            if (y == x) continue;
            auto& a = acc[y];
            a.log_co += lx + log_edge_prob(g, up, w, y);
            ++a.common;
        }
    }
    return acc;
}

std::vector<SimilarityResult> finish(const LeveledGraph& g, std::size_t level,
                                     const std::unordered_map<NodeIndex, Accum>& acc, std::size_t top_k, double min_co,
                                     const std::unordered_set<NodeIndex>* allowed) {
    std::vector<std::pair<NodeIndex, Accum>> ranked;
    ranked.reserve(acc.size());
    for (const auto& [y, a] : acc) {
        if (allowed && !allowed->contains(y)) continue;
        if (std::exp(a.log_co) < min_co) continue;
        ranked.emplace_back(y, a);
    }
    std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
        if (a.second.log_co != b.second.log_co) return a.second.log_co > b.second.log_co;
        return g.label(level, a.first) < g.label(level, b.first);
    });
    if (ranked.size() > top_k) ranked.resize(top_k);
    std::vector<SimilarityResult> out;
    out.reserve(ranked.size());
    for (const auto& [y, a] : ranked) out.push_back(SimilarityResult{g.label(level, y), std::exp(a.log_co), a.common});
    return out;
}

}  // namespace

double edge_prob(const LeveledGraph& g, NodeRef parent, NodeRef child) {
    if (parent.level + 1 != child.level) throw ArgumentError("edge_prob needs nodes on adjacent levels");
    const Frequency out = g.out_weight(parent);
    if (out == 0) throw UndefinedDistribution("Out('" + std::string(parent.label) + "') is 0");
    return static_cast<double>(g.arc_frequency(parent, child)) / static_cast<double>(out);
}

double co_score(const LeveledGraph& g, NodeRef x, NodeRef y) {
    if (x.level != y.level) throw ArgumentError("co_score needs two outcomes on the same level");
    const NodeIndex xi = require_outcome(g, x);
    const NodeIndex yi = require_outcome(g, y);
    const std::size_t up = x.level - 1;

    auto px = std::vector<NodeIndex>(g.parents_of(x.level, xi).begin(), g.parents_of(x.level, xi).end());
    auto py = std::vector<NodeIndex>(g.parents_of(y.level, yi).begin(), g.parents_of(y.level, yi).end());
    std::sort(px.begin(), px.end());
    std::sort(py.begin(), py.end());
    std::vector<NodeIndex> common;
    std::set_intersection(px.begin(), px.end(), py.begin(), py.end(), std::back_inserter(common));
    if (common.empty()) return 0.0;

    double log_co = 0.0;
    for (const NodeIndex w : common) log_co += log_edge_prob(g, up, w, xi) + log_edge_prob(g, up, w, yi);
    return std::exp(log_co);
}

std::vector<SimilarityResult> related_terms(const LeveledGraph& g, NodeRef x, std::size_t top_k, double min_co) {
    const NodeIndex xi = require_outcome(g, x);
    return finish(g, x.level, accumulate(g, x.level, xi), top_k, min_co, nullptr);
}

std::vector<SimilarityResult> related_within(const LeveledGraph& g, NodeRef x, std::span<const NodeIndex> parents,
                                             std::size_t top_k, double min_co) {
    const NodeIndex xi = require_outcome(g, x);
    std::unordered_set<NodeIndex> allowed;
    for (const NodeIndex w : parents) {
        for (const NodeIndex y : g.children_of(x.level - 1, w)) allowed.insert(y);
    }
    return finish(g, x.level, accumulate(g, x.level, xi), top_k, min_co, &allowed);
}

}  // namespace pgmhd
