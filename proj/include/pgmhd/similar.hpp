#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pgmhd/graph.hpp"

namespace pgmhd {

struct SimilarityResult {
    std::string outcome;
    double co = 0.0;
    std::size_t common_parents = 0;
};

/// p(w,v) = f(w,v) / Out(w). Throws LookupError for an unknown parent and
/// UndefinedDistribution when Out(w) = 0.
double edge_prob(const LeveledGraph& g, NodeRef parent, NodeRef child);

/// Co-occurrence score of two outcomes on the same level:
///
///     CO(x, y) = prod_{w in pa(x) & pa(y)} p(w,x) * p(w,y)
///
/// Zero when x and y share no parent. Accumulated in log space.
double co_score(const LeveledGraph& g, NodeRef x, NodeRef y);

/// Same-level outcomes sharing at least one parent with `x`, ranked by CO
/// (descending, label ascending on ties). Never contains `x`.
std::vector<SimilarityResult> related_terms(const LeveledGraph& g, NodeRef x, std::size_t top_k = 10, double min_co = 0.0);

/// Scores every candidate among `children` of `parents` (level `x.level - 1`)
/// against `x`. Used by the ambiguity report to rank terms within one sense.
std::vector<SimilarityResult> related_within(const LeveledGraph& g, NodeRef x, std::span<const NodeIndex> parents,
                                             std::size_t top_k, double min_co = 0.0);

}  // namespace pgmhd
