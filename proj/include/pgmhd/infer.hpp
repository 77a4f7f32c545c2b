#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pgmhd/graph.hpp"

namespace pgmhd {

struct ClassScore {
    std::string label;
    double score = 0.0;
    std::size_t rank = 0;  // 1-based
};

struct Classification {
    /// Sorted by score descending, label ascending on ties.
    std::vector<ClassScore> scores;
    std::vector<std::string> diagnostics;
};

struct ClassifyOptions {
    SmoothingParams smoothing{};
    std::size_t top_k = 10;
    double threshold = 0.0;
    /// Rescale the returned scores to sum to 1.
    bool normalize = false;
};

/// Cl(w|v) = f(w,v) / In(v), the estimate of P(parent = w | child = v).
/// Throws LookupError for an unknown child, UndefinedDistribution when
/// In(v) = 0, ArgumentError when the nodes are not on adjacent levels.
double classification_score(const LeveledGraph& g, NodeRef parent, NodeRef child);

/// (f(w,v) + m*p) / (In(v) + m). Unknown nodes count as zero frequency.
/// Throws UndefinedDistribution when In(v) + m = 0.
double m_estimate_score(const LeveledGraph& g, NodeRef parent, NodeRef child, const SmoothingParams& s);

/// Multi-label classification of an instance whose features are outcomes
/// at `level` (>= 1). Each candidate parent c (any parent of a known
/// feature) scores
///
///     Out(c)/T * prod_j (f(c, v_j) + m*p) / (Out(c) + m)
///
/// where T is the total frequency of the transition into `level`. All
/// probabilities are derived from raw counts at query time.
Classification classify_instance(const LeveledGraph& g, std::size_t level, std::span<const std::string> features,
                                 const ClassifyOptions& options = {});

/// Classifies a partial path whose first element sits at `level`. The
/// candidate's prior and its link to path[0] are scored as above, then the
/// remaining transitions are chained with their smoothed conditionals.
Classification classify_path(const LeveledGraph& g, std::size_t level, std::span<const std::string> path,
                             const ClassifyOptions& options = {});

}  // namespace pgmhd
