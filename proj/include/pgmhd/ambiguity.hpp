#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pgmhd/graph.hpp"
#include "pgmhd/similar.hpp"

namespace pgmhd {

/// Normalized pointwise mutual information of a parent/child pair, with
/// every probability taken over the total frequency T of their transition:
///
///     npmi = ln(p(w,v) / (p(w) p(v))) / -ln p(w,v)
///
/// p(w,v) = f/T, p(w) = Out(w)/T, p(v) = In(v)/T. Returns 1 when
/// p(w,v) = 1 and nullopt when f(w,v) = 0 (no association).
std::optional<double> npmi(const LeveledGraph& g, NodeRef parent, NodeRef child);

/// Cosine similarity of two same-level nodes' child edge-probability vectors.
double child_distribution_cosine(const LeveledGraph& g, std::size_t level, NodeIndex a, NodeIndex b);

struct ParentAssociation {
    std::string parent;
    double npmi = 0.0;
};

struct Sense {
    std::vector<std::string> parents;          // qualifying parents, by npmi descending
    std::vector<SimilarityResult> related;     // top related terms reached through these parents
};

struct AmbiguityReport {
    std::string term;
    std::vector<ParentAssociation> parent_scores;  // every parent, by npmi descending
    std::vector<Sense> senses;
    bool ambiguous = false;
};

struct AmbiguityOptions {
    double tau = 0.1;             // minimum npmi for a parent to count as a sense carrier
    double sim_threshold = 0.2;   // cosine at or above which two parents share a sense
    std::size_t related_k = 5;
};

/// Groups the parents whose npmi with `term` reaches `tau` into senses by
/// single-link clustering on child-distribution cosine. The term is
/// ambiguous when at least two senses remain.
AmbiguityReport ambiguity_report(const LeveledGraph& g, NodeRef term, const AmbiguityOptions& options = {});

}  // namespace pgmhd
