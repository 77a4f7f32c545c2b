#include "pgmhd/graph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace pgmhd {

void SmoothingParams::check() const {
    if (!(m_est >= 0.0)) throw ArgumentError("m-estimate equivalent sample size must be >= 0");
    if (!(p_prior > 0.0 && p_prior < 1.0)) throw ArgumentError("m-estimate prior must lie in (0, 1)");
}

LeveledGraph::LeveledGraph(std::size_t levels) {
    if (levels < 2) throw StructuralError("a leveled graph needs at least 2 levels, got " + std::to_string(levels));
    levels_.resize(levels);
}

const LeveledGraph::Level& LeveledGraph::level_at(std::size_t level) const {
    if (level >= levels_.size()) {
        throw StructuralError("level " + std::to_string(level) + " out of range [0, " + std::to_string(levels_.size() - 1) + "]");
    }
    return levels_[level];
}

void LeveledGraph::check_mutable() const {
    if (frozen_) throw MutationError("graph is frozen");
}

std::size_t LeveledGraph::node_count() const noexcept {
    std::size_t n = 0;
    for (const auto& l : levels_) n += l.nodes.size();
    return n;
}

std::size_t LeveledGraph::node_count(std::size_t level) const { return level_at(level).nodes.size(); }

std::size_t LeveledGraph::arc_count() const noexcept {
    std::size_t n = 0;
    for (const auto& l : levels_) n += l.arcs.size();
    return n;
}

std::size_t LeveledGraph::arc_count(std::size_t parent_level) const { return level_at(parent_level).arcs.size(); }

Frequency LeveledGraph::transition_total(std::size_t parent_level) const { return level_at(parent_level).transition_total; }

NodeIndex LeveledGraph::add_node(std::size_t level, std::string_view label) {
    check_mutable();
    if (label.empty()) throw ArgumentError("node labels must be non-empty");
    level_at(level);
    auto& l = levels_[level];
    if (auto it = l.index.find(label); it != l.index.end()) return it->second;
    const auto index = static_cast<NodeIndex>(l.nodes.size());
    l.nodes.push_back(NodeData{std::string(label), 0, 0, {}, {}});
    l.index.emplace(std::string(label), index);
    return index;
}

void LeveledGraph::increment(std::size_t parent_level, NodeIndex parent, NodeIndex child, Frequency delta) {
    auto& upper = levels_[parent_level];
    auto& lower = levels_[parent_level + 1];
    auto [it, inserted] = upper.arcs.try_emplace(arc_key(parent, child), 0);
    if (inserted) {
        upper.nodes[parent].children.push_back(child);
        lower.nodes[child].parents.push_back(parent);
    }
    it->second += delta;
    upper.nodes[parent].out += delta;
    lower.nodes[child].in += delta;
    upper.transition_total += delta;
}

Frequency LeveledGraph::add_arc_increment(NodeRef parent, NodeRef child, Frequency delta) {
    check_mutable();
    if (parent.level + 1 != child.level) {
        throw StructuralError("arc from level " + std::to_string(parent.level) + " to level " + std::to_string(child.level) +
                              " does not join adjacent levels");
    }
    if (delta == 0) throw ArgumentError("arc increment must be >= 1");
    const NodeIndex p = add_node(parent.level, parent.label);
    const NodeIndex c = add_node(child.level, child.label);
    increment(parent.level, p, c, delta);
    return levels_[parent.level].arcs.at(arc_key(p, c));
}

void LeveledGraph::learn_path(std::span<const std::string_view> labels) {
    check_mutable();
    if (labels.size() < 2) throw StructuralError("an observation must span at least 2 levels");
    if (labels.size() > levels_.size()) {
        throw StructuralError("observation spans " + std::to_string(labels.size()) + " levels but the graph has " +
                              std::to_string(levels_.size()));
    }
    for (auto label : labels) {
        if (label.empty()) throw ArgumentError("node labels must be non-empty");
    }
    NodeIndex parent = add_node(0, labels[0]);
    for (std::size_t level = 1; level < labels.size(); ++level) {
        const NodeIndex child = add_node(level, labels[level]);
        increment(level - 1, parent, child, 1);
        parent = child;
    }
    ++observations_;
}

void LeveledGraph::merge_from(const LeveledGraph& other) {
    check_mutable();
    if (other.levels() != levels()) {
        throw StructuralError("cannot merge graphs with " + std::to_string(levels()) + " and " +
                              std::to_string(other.levels()) + " levels");
    }
    std::vector<std::vector<NodeIndex>> remap(levels());
    for (std::size_t level = 0; level < levels(); ++level) {
        const auto& src = other.levels_[level];
        remap[level].reserve(src.nodes.size());
        for (const auto& node : src.nodes) remap[level].push_back(add_node(level, node.label));
    }
    for (std::size_t level = 0; level + 1 < levels(); ++level) {
        for (const auto& [key, freq] : other.levels_[level].arcs) {
            const auto parent = static_cast<NodeIndex>(key >> 32);
            const auto child = static_cast<NodeIndex>(key & 0xffffffffu);
            increment(level, remap[level][parent], remap[level + 1][child], freq);
        }
    }
    observations_ += other.observations_;
}

bool LeveledGraph::contains(NodeRef node) const { return find(node).has_value(); }

std::optional<NodeIndex> LeveledGraph::find(NodeRef node) const {
    const auto& l = level_at(node.level);
    if (auto it = l.index.find(node.label); it != l.index.end()) return it->second;
    return std::nullopt;
}

namespace {

NodeIndex require(const LeveledGraph& g, NodeRef node) {
    if (auto idx = g.find(node)) return *idx;
    throw LookupError("unknown node '" + std::string(node.label) + "' at level " + std::to_string(node.level));
}

}  // namespace

Frequency LeveledGraph::in_weight(NodeRef node) const { return in_weight_at(node.level, require(*this, node)); }

Frequency LeveledGraph::out_weight(NodeRef node) const { return out_weight_at(node.level, require(*this, node)); }

Frequency LeveledGraph::arc_frequency(NodeRef parent, NodeRef child) const {
    if (parent.level + 1 != child.level || child.level >= levels()) return 0;
    const auto p = find(parent);
    const auto c = find(child);
    if (!p || !c) return 0;
    return arc_frequency_at(parent.level, *p, *c);
}

Frequency LeveledGraph::arc_frequency_at(std::size_t parent_level, NodeIndex parent, NodeIndex child) const {
    const auto& arcs = level_at(parent_level).arcs;
    auto it = arcs.find(arc_key(parent, child));
    return it == arcs.end() ? 0 : it->second;
}

GraphRecord LeveledGraph::record() const {
    GraphRecord r;
    r.levels = levels();
    r.observations = observations_;
    r.nodes.reserve(node_count());
    r.arcs.reserve(arc_count());
    for (std::size_t level = 0; level < levels(); ++level) {
        for (const auto& node : levels_[level].nodes) r.nodes.push_back(Node{level, node.label});
        if (level + 1 == levels()) continue;
        const auto& lower = levels_[level + 1].nodes;
        for (const auto& [key, freq] : levels_[level].arcs) {
            r.arcs.push_back(ArcRecord{level, levels_[level].nodes[key >> 32].label, level + 1,
                                       lower[key & 0xffffffffu].label, freq});
        }
    }
    std::sort(r.nodes.begin(), r.nodes.end());
    std::sort(r.arcs.begin(), r.arcs.end());
    return r;
}

LeveledGraph LeveledGraph::from_record(const GraphRecord& record) {
    LeveledGraph g(record.levels);
    for (const auto& node : record.nodes) {
        if (node.level >= record.levels) throw StructuralError("node '" + node.label + "' declared at out-of-range level");
        g.add_node(node.level, node.label);
    }
    for (const auto& arc : record.arcs) {
        if (arc.parent_level + 1 != arc.child_level || arc.child_level >= record.levels) {
            throw StructuralError("arc '" + arc.parent + "' -> '" + arc.child + "' does not join adjacent levels");
        }
        if (arc.freq == 0) throw StructuralError("arc '" + arc.parent + "' -> '" + arc.child + "' has zero frequency");
        const auto p = g.find({arc.parent_level, arc.parent});
        const auto c = g.find({arc.child_level, arc.child});
        if (!p || !c) throw StructuralError("arc '" + arc.parent + "' -> '" + arc.child + "' references an undeclared node");
        g.increment(arc.parent_level, *p, *c, arc.freq);
    }
    g.observations_ = record.observations;
    return g;
}

std::size_t LeveledGraph::memory_footprint() const noexcept {
    std::size_t bytes = sizeof(*this) + levels_.capacity() * sizeof(Level);
    for (const auto& l : levels_) {
        bytes += l.nodes.capacity() * sizeof(NodeData);
        for (const auto& node : l.nodes) {
            if (node.label.capacity() > 15) bytes += node.label.capacity() + 1;
            bytes += (node.parents.capacity() + node.children.capacity()) * sizeof(NodeIndex);
        }
        // Hash nodes: key/value plus a next pointer and cached hash.
        bytes += l.index.bucket_count() * sizeof(void*);
        bytes += l.index.size() * (sizeof(std::pair<const std::string, NodeIndex>) + 2 * sizeof(void*));
        for (const auto& [key, _] : l.index) {
            if (key.capacity() > 15) bytes += key.capacity() + 1;
        }
        bytes += l.arcs.bucket_count() * sizeof(void*);
        bytes += l.arcs.size() * (sizeof(std::pair<const std::uint64_t, Frequency>) + sizeof(void*));
    }
    return bytes;
}

LeveledGraph merge(const LeveledGraph& a, const LeveledGraph& b) {
    if (a.levels() != b.levels()) {
        throw StructuralError("cannot merge graphs with " + std::to_string(a.levels()) + " and " +
                              std::to_string(b.levels()) + " levels");
    }
    LeveledGraph out(a.levels());
    out.merge_from(a);
    out.merge_from(b);
    return out;
}

std::vector<Violation> validate(const GraphRecord& r) {
    std::vector<Violation> out;
    if (r.levels < 2) {
        out.push_back({"levels", "graph", "level count " + std::to_string(r.levels) + " is below 2"});
        return out;
    }
    std::set<std::pair<std::size_t, std::string>> declared;
    for (const auto& node : r.nodes) {
        if (node.level >= r.levels) {
            out.push_back({"levels", node.label, "node declared at level " + std::to_string(node.level) + " >= " +
                                                     std::to_string(r.levels)});
        }
        declared.emplace(node.level, node.label);
    }

    std::map<std::pair<std::size_t, std::string>, Frequency> in, out_w;
    std::vector<Frequency> totals(r.levels, 0);
    for (const auto& arc : r.arcs) {
        const std::string name = "'" + arc.parent + "'@" + std::to_string(arc.parent_level) + " -> '" + arc.child + "'@" +
                                 std::to_string(arc.child_level);
        if (arc.parent_level + 1 != arc.child_level) {
            out.push_back({"adjacency", name, "arc does not join adjacent levels"});
            continue;
        }
        if (arc.child_level >= r.levels) {
            out.push_back({"levels", name, "arc leaves the last level"});
            continue;
        }
        if (arc.freq == 0) out.push_back({"frequency", name, "stored arc has zero frequency"});
        if (!declared.contains({arc.parent_level, arc.parent}) || !declared.contains({arc.child_level, arc.child})) {
            out.push_back({"dangling", name, "arc references an undeclared node"});
        }
        in[{arc.child_level, arc.child}] += arc.freq;
        out_w[{arc.parent_level, arc.parent}] += arc.freq;
        totals[arc.parent_level] += arc.freq;
    }

    for (const auto& node : r.nodes) {
        if (node.level == 0 || node.level >= r.levels) continue;
        const auto key = std::make_pair(node.level, node.label);
        const auto it = in.find(key);
        const Frequency node_in = it == in.end() ? 0 : it->second;
        if (node_in == 0) {
            out.push_back({"orphan", "'" + node.label + "'@" + std::to_string(node.level), "non-root node has no incoming arc"});
            continue;
        }
        const auto ot = out_w.find(key);
        const Frequency node_out = ot == out_w.end() ? 0 : ot->second;
        if (node_out > node_in) {
            out.push_back({"flow", "'" + node.label + "'@" + std::to_string(node.level),
                           "Out " + std::to_string(node_out) + " exceeds In " + std::to_string(node_in)});
        }
    }

    if (r.observations != totals[0]) {
        out.push_back({"consistency", "graph",
                       "t = " + std::to_string(r.observations) + " but the first transition carries " +
                           std::to_string(totals[0])});
    }
    return out;
}

std::vector<Violation> validate(const LeveledGraph& graph) { return validate(graph.record()); }

}  // namespace pgmhd
