#include "pgmhd/infer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace pgmhd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Candidate {
    const std::string* label;
    double log_score;  // -inf for an exact zero
};

void check_adjacent(NodeRef parent, NodeRef child) {
    if (parent.level + 1 != child.level) {
        throw ArgumentError("'" + std::string(parent.label) + "' is not on the level above '" + std::string(child.label) + "'");
    }
}

void check_feature_level(const LeveledGraph& g, std::size_t level) {
    if (level == 0 || level >= g.levels()) {
        throw ArgumentError("feature level must lie in [1, " + std::to_string(g.levels() - 1) + "], got " + std::to_string(level));
    }
}

// log((f + m*p) / (n + m)); -inf when the numerator is zero.
double log_smoothed(Frequency f, Frequency n, const SmoothingParams& s) {
    const double num = static_cast<double>(f) + s.m_est * s.p_prior;
    const double den = static_cast<double>(n) + s.m_est;
    if (num <= 0.0 || den <= 0.0) return kNegInf;
    return std::log(num) - std::log(den);
}

Classification rank(std::vector<Candidate> candidates, const ClassifyOptions& options,
                    std::vector<std::string> diagnostics) {
    Classification out;
    out.diagnostics = std::move(diagnostics);

    // A zero-probability class is not a classification.
    std::erase_if(candidates, [&](const Candidate& c) {
        return c.log_score == kNegInf || std::exp(c.log_score) < options.threshold;
    });
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.log_score != b.log_score) return a.log_score > b.log_score;
        return *a.label < *b.label;
    });
    if (candidates.size() > options.top_k) candidates.resize(options.top_k);

    double log_total = kNegInf;
    if (options.normalize && !candidates.empty() && candidates.front().log_score != kNegInf) {
        const double peak = candidates.front().log_score;
        double sum = 0.0;
        for (const auto& c : candidates) sum += std::exp(c.log_score - peak);
        log_total = peak + std::log(sum);
    }

    out.scores.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double log_score = log_total == kNegInf ? candidates[i].log_score : candidates[i].log_score - log_total;
        out.scores.push_back(ClassScore{*candidates[i].label, std::exp(log_score), i + 1});
    }
    return out;
}

std::vector<std::string> dedupe(std::span<const std::string> items) {
    std::vector<std::string> out(items.begin(), items.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

double classification_score(const LeveledGraph& g, NodeRef parent, NodeRef child) {
    check_adjacent(parent, child);
    const Frequency in = g.in_weight(child);
    if (in == 0) throw UndefinedDistribution("In('" + std::string(child.label) + "') is 0");
    return static_cast<double>(g.arc_frequency(parent, child)) / static_cast<double>(in);
}

double m_estimate_score(const LeveledGraph& g, NodeRef parent, NodeRef child, const SmoothingParams& s) {
    s.check();
    check_adjacent(parent, child);
    if (child.level >= g.levels()) throw ArgumentError("child level out of range");
    const auto c = g.find(child);
    const Frequency in = c ? g.in_weight_at(child.level, *c) : 0;
    const double den = static_cast<double>(in) + s.m_est;
    if (den <= 0.0) throw UndefinedDistribution("In('" + std::string(child.label) + "') + m is 0");
    return (static_cast<double>(g.arc_frequency(parent, child)) + s.m_est * s.p_prior) / den;
}

Classification classify_instance(const LeveledGraph& g, std::size_t level, std::span<const std::string> features,
                                 const ClassifyOptions& options) {
    options.smoothing.check();
    check_feature_level(g, level);
    if (features.empty()) throw ArgumentError("feature set is empty");

    const auto unique = dedupe(features);
    std::vector<std::string> diagnostics;
    std::vector<std::optional<NodeIndex>> known;
    std::vector<NodeIndex> candidate_ids;
    for (const auto& f : unique) {
        const auto idx = g.find({level, f});
        known.push_back(idx);
        if (!idx) {
            diagnostics.push_back(options.smoothing.m_est > 0.0
                                      ? "unknown feature '" + f + "'"
                                      : "unknown feature '" + f + "' scores 0 for every class without smoothing");
            continue;
        }
        const auto parents = g.parents_of(level, *idx);
        candidate_ids.insert(candidate_ids.end(), parents.begin(), parents.end());
    }
    std::sort(candidate_ids.begin(), candidate_ids.end());
    candidate_ids.erase(std::unique(candidate_ids.begin(), candidate_ids.end()), candidate_ids.end());
    if (candidate_ids.empty()) {
        diagnostics.push_back("no candidate classes: none of the features is known at level " + std::to_string(level));
        return rank({}, options, std::move(diagnostics));
    }

    const double log_total = std::log(static_cast<double>(g.transition_total(level - 1)));
    std::vector<Candidate> candidates;
    candidates.reserve(candidate_ids.size());
    for (const NodeIndex c : candidate_ids) {
        const Frequency out = g.out_weight_at(level - 1, c);
        double log_score = std::log(static_cast<double>(out)) - log_total;
        for (const auto& idx : known) {
            const Frequency f = idx ? g.arc_frequency_at(level - 1, c, *idx) : 0;
            log_score += log_smoothed(f, out, options.smoothing);
        }
        candidates.push_back(Candidate{&g.label(level - 1, c), log_score});
    }
    return rank(std::move(candidates), options, std::move(diagnostics));
}

Classification classify_path(const LeveledGraph& g, std::size_t level, std::span<const std::string> path,
                             const ClassifyOptions& options) {
    options.smoothing.check();
    check_feature_level(g, level);
    if (path.empty()) throw ArgumentError("path is empty");
    if (level + path.size() > g.levels()) throw ArgumentError("path runs past the last level");

    std::vector<std::string> diagnostics;
    const auto head = g.find({level, path[0]});
    if (!head) {
        diagnostics.push_back("unknown path head '" + path[0] + "'");
        diagnostics.push_back("no candidate classes: the path head is unknown at level " + std::to_string(level));
        return rank({}, options, std::move(diagnostics));
    }

    // Candidate-independent tail of the chain.
    double log_chain = 0.0;
    std::optional<NodeIndex> prev = head;
    for (std::size_t k = 1; k < path.size(); ++k) {
        const std::size_t lv = level + k;
        const auto cur = g.find({lv, path[k]});
        if (!cur) diagnostics.push_back("unknown path element '" + path[k] + "' at level " + std::to_string(lv));
        const Frequency f = (prev && cur) ? g.arc_frequency_at(lv - 1, *prev, *cur) : 0;
        const Frequency n = prev ? g.out_weight_at(lv - 1, *prev) : 0;
        log_chain += log_smoothed(f, n, options.smoothing);
        prev = cur;
    }

    const double log_total = std::log(static_cast<double>(g.transition_total(level - 1)));
    std::vector<Candidate> candidates;
    for (const NodeIndex c : g.parents_of(level, *head)) {
        const Frequency out = g.out_weight_at(level - 1, c);
        const double log_score = std::log(static_cast<double>(out)) - log_total +
                                 log_smoothed(g.arc_frequency_at(level - 1, c, *head), out, options.smoothing) + log_chain;
        candidates.push_back(Candidate{&g.label(level - 1, c), log_score});
    }
    return rank(std::move(candidates), options, std::move(diagnostics));
}

}  // namespace pgmhd
