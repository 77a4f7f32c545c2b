#include "pgmhd/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace pgmhd {

std::optional<double> npmi(const LeveledGraph& g, NodeRef parent, NodeRef child) {
    if (parent.level + 1 != child.level) throw ArgumentError("npmi needs nodes on adjacent levels");
    for (const NodeRef n : {parent, child}) {
        if (!g.contains(n)) throw LookupError("unknown node '" + std::string(n.label) + "' at level " + std::to_string(n.level));
    }
    const Frequency f = g.arc_frequency(parent, child);
    if (f == 0) return std::nullopt;
    const Frequency total = g.transition_total(parent.level);
    if (f == total) return 1.0;

    const double log_f = std::log(static_cast<double>(f));
    const double log_t = std::log(static_cast<double>(total));
    const double pmi = log_f + log_t - std::log(static_cast<double>(g.out_weight(parent))) -
                       std::log(static_cast<double>(g.in_weight(child)));
    return std::clamp(pmi / (log_t - log_f), -1.0, 1.0);
}

double child_distribution_cosine(const LeveledGraph& g, std::size_t level, NodeIndex a, NodeIndex b) {
    const double out_a = static_cast<double>(g.out_weight_at(level, a));
    const double out_b = static_cast<double>(g.out_weight_at(level, b));
    if (out_a == 0.0 || out_b == 0.0) return 0.0;

    std::unordered_map<NodeIndex, double> pa;
    double norm_a = 0.0;
    for (const NodeIndex y : g.children_of(level, a)) {
        const double p = static_cast<double>(g.arc_frequency_at(level, a, y)) / out_a;
        pa.emplace(y, p);
        norm_a += p * p;
    }
    double norm_b = 0.0, dot = 0.0;
    for (const NodeIndex y : g.children_of(level, b)) {
        const double p = static_cast<double>(g.arc_frequency_at(level, b, y)) / out_b;
        norm_b += p * p;
        if (auto it = pa.find(y); it != pa.end()) dot += it->second * p;
    }
    return dot / std::sqrt(norm_a * norm_b);
}

AmbiguityReport ambiguity_report(const LeveledGraph& g, NodeRef term, const AmbiguityOptions& options) {
    if (term.level == 0 || term.level >= g.levels()) throw ArgumentError("ambiguity needs a term on levels 1..m-1");
    if (!(options.tau >= -1.0 && options.tau <= 1.0)) throw ArgumentError("tau must lie in [-1, 1]");
    if (!(options.sim_threshold >= -1.0 && options.sim_threshold <= 1.0)) {
        throw ArgumentError("sim_threshold must lie in [-1, 1]");
    }
    const auto idx = g.find(term);
    if (!idx) throw LookupError("unknown term '" + std::string(term.label) + "' at level " + std::to_string(term.level));
    const std::size_t up = term.level - 1;

    AmbiguityReport report;
    report.term = std::string(term.label);

    struct Scored {
        NodeIndex parent;
        double npmi;
    };
    std::vector<Scored> scored;
    for (const NodeIndex w : g.parents_of(term.level, *idx)) {
        // Every stored parent has f > 0, so npmi is defined.
        scored.push_back({w, *npmi(g, {up, g.label(up, w)}, term)});
    }
    std::sort(scored.begin(), scored.end(), [&](const Scored& a, const Scored& b) {
        if (a.npmi != b.npmi) return a.npmi > b.npmi;
        return g.label(up, a.parent) < g.label(up, b.parent);
    });
    for (const auto& s : scored) report.parent_scores.push_back({g.label(up, s.parent), s.npmi});

    std::vector<Scored> qualifying;
    std::copy_if(scored.begin(), scored.end(), std::back_inserter(qualifying),
                 [&](const Scored& s) { return s.npmi >= options.tau; });

    // Single-link clustering: union every pair at or above the threshold.
    std::vector<std::size_t> root(qualifying.size());
    std::iota(root.begin(), root.end(), 0);
    auto find = [&](std::size_t i) {
        while (root[i] != i) i = root[i] = root[root[i]];
        return i;
    };
    for (std::size_t i = 0; i < qualifying.size(); ++i) {
        for (std::size_t j = i + 1; j < qualifying.size(); ++j) {
            if (find(i) == find(j)) continue;
            if (child_distribution_cosine(g, up, qualifying[i].parent, qualifying[j].parent) >= options.sim_threshold) {
                root[find(j)] = find(i);
            }
        }
    }

    // `qualifying` is already in report order, so groups come out ordered by
    // their strongest parent.
    std::vector<std::size_t> group_of(qualifying.size(), SIZE_MAX);
    std::vector<std::vector<NodeIndex>> groups;
    for (std::size_t i = 0; i < qualifying.size(); ++i) {
        const std::size_t r = find(i);
        if (group_of[r] == SIZE_MAX) {
            group_of[r] = groups.size();
            groups.emplace_back();
        }
        groups[group_of[r]].push_back(qualifying[i].parent);
    }

    for (const auto& members : groups) {
        Sense sense;
        for (const NodeIndex w : members) sense.parents.push_back(g.label(up, w));
        sense.related = related_within(g, term, members, options.related_k);
        report.senses.push_back(std::move(sense));
    }
    report.ambiguous = report.senses.size() >= 2;
    return report;
}

}  // namespace pgmhd
