#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pgmhd/errors.hpp"

namespace pgmhd {

using Frequency = std::uint64_t;

/// Index of a node inside its level.
using NodeIndex = std::uint32_t;

/// Non-owning (level, label) handle used by the query API.
struct NodeRef {
    std::size_t level;
    std::string_view label;
};

struct Node {
    std::size_t level = 0;
    std::string label;

    auto operator<=>(const Node&) const = default;
};

/// One arc in exploded form. Both endpoint levels are kept so that a record
/// can describe (and `validate` can report) arcs that skip levels.
struct ArcRecord {
    std::size_t parent_level = 0;
    std::string parent;
    std::size_t child_level = 0;
    std::string child;
    Frequency freq = 0;

    auto operator<=>(const ArcRecord&) const = default;
};

/// Canonical, fully materialized view of a graph: nodes sorted by
/// (level, label), arcs by (parent level, parent label, child label).
/// This is what persistence writes and what equality compares.
struct GraphRecord {
    std::size_t levels = 0;
    Frequency observations = 0;
    std::vector<Node> nodes;
    std::vector<ArcRecord> arcs;

    bool operator==(const GraphRecord&) const = default;
};

struct Violation {
    std::string rule;     // adjacency | frequency | dangling | orphan | consistency | flow | levels
    std::string subject;  // node or arc the rule failed on
    std::string message;
};

/// Smoothing parameters of the m-estimate (f + m*p) / (n + m).
struct SmoothingParams {
    double m_est = 1.0;
    double p_prior = 0.1;

    /// Throws ArgumentError unless m_est >= 0 and 0 < p_prior < 1.
    void check() const;

    static SmoothingParams none() { return {0.0, 0.1}; }
};

/// Leveled frequency multigraph.
///
/// Nodes are partitioned into `levels()` levels; arcs only join level i to
/// level i+1 and carry integer co-occurrence counts. Node identity is the
/// pair (level, label). In/Out aggregates are kept up to date on every
/// increment so queries never scan arcs.
///
/// Mutation is single-writer. After `freeze()` the graph is read-only and
/// safe to share between threads.
class LeveledGraph {
public:
    explicit LeveledGraph(std::size_t levels);

    std::size_t levels() const noexcept { return levels_.size(); }
    /// Number of observations learned (t).
    Frequency observations() const noexcept { return observations_; }

    std::size_t node_count() const noexcept;
    std::size_t node_count(std::size_t level) const;
    std::size_t arc_count() const noexcept;
    /// Number of distinct arcs from `parent_level` to `parent_level + 1`.
    std::size_t arc_count(std::size_t parent_level) const;
    /// Sum of arc frequencies from `parent_level` to `parent_level + 1`.
    Frequency transition_total(std::size_t parent_level) const;

    bool frozen() const noexcept { return frozen_; }
    void freeze() noexcept { frozen_ = true; }

    // -- mutation ---------------------------------------------------------

    /// Finds or creates the node. Returns its index within the level.
    NodeIndex add_node(std::size_t level, std::string_view label);

    /// Adds `delta` to f(parent, child), creating nodes and the arc on first
    /// sight. Does not touch the observation counter. Returns the new count.
    Frequency add_arc_increment(NodeRef parent, NodeRef child, Frequency delta);

    /// Learns one observation: `labels[i]` is the outcome at level i.
    /// Every consecutive pair gets +1 and t gets +1.
    void learn_path(std::span<const std::string_view> labels);

    /// Adds every node, arc count and the observation counter of `other`.
    void merge_from(const LeveledGraph& other);

    // -- queries by label -------------------------------------------------

    bool contains(NodeRef node) const;
    std::optional<NodeIndex> find(NodeRef node) const;
    /// In(v): sum of incoming arc frequencies. Throws LookupError.
    Frequency in_weight(NodeRef node) const;
    /// Out(w): sum of outgoing arc frequencies. Throws LookupError.
    Frequency out_weight(NodeRef node) const;
    /// f(parent, child); 0 when either node or the arc is absent.
    Frequency arc_frequency(NodeRef parent, NodeRef child) const;

    // -- queries by index -------------------------------------------------

    const std::string& label(std::size_t level, NodeIndex index) const { return level_at(level).nodes[index].label; }
    Frequency in_weight_at(std::size_t level, NodeIndex index) const { return level_at(level).nodes[index].in; }
    Frequency out_weight_at(std::size_t level, NodeIndex index) const { return level_at(level).nodes[index].out; }
    std::span<const NodeIndex> parents_of(std::size_t level, NodeIndex index) const { return level_at(level).nodes[index].parents; }
    std::span<const NodeIndex> children_of(std::size_t level, NodeIndex index) const { return level_at(level).nodes[index].children; }
    Frequency arc_frequency_at(std::size_t parent_level, NodeIndex parent, NodeIndex child) const;

    // -- whole-graph views ------------------------------------------------

    GraphRecord record() const;
    /// Rebuilds a graph from a record. Throws StructuralError on arcs that
    /// skip levels, reference undeclared nodes or carry zero frequency.
    static LeveledGraph from_record(const GraphRecord& record);

    /// Approximate heap bytes held by the graph (labels, adjacency, indexes).
    std::size_t memory_footprint() const noexcept;

    friend bool operator==(const LeveledGraph& a, const LeveledGraph& b) { return a.record() == b.record(); }

private:
    struct NodeData {
        std::string label;
        Frequency in = 0;
        Frequency out = 0;
        std::vector<NodeIndex> parents;
        std::vector<NodeIndex> children;
    };

    struct LabelHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
    };

    struct Level {
        std::vector<NodeData> nodes;
        std::unordered_map<std::string, NodeIndex, LabelHash, std::equal_to<>> index;
        // Arcs to the next level keyed by (parent << 32 | child).
        std::unordered_map<std::uint64_t, Frequency> arcs;
        Frequency transition_total = 0;
    };

    static std::uint64_t arc_key(NodeIndex parent, NodeIndex child) noexcept {
        return (static_cast<std::uint64_t>(parent) << 32) | child;
    }

    const Level& level_at(std::size_t level) const;
    void check_mutable() const;
    void increment(std::size_t parent_level, NodeIndex parent, NodeIndex child, Frequency delta);

    std::vector<Level> levels_;
    Frequency observations_ = 0;
    bool frozen_ = false;
};

/// Pointwise sum of two graphs with the same level count. Commutative and
/// associative; an empty graph is the identity.
LeveledGraph merge(const LeveledGraph& a, const LeveledGraph& b);

/// Empty list iff every structural invariant holds.
std::vector<Violation> validate(const GraphRecord& record);
std::vector<Violation> validate(const LeveledGraph& graph);

}  // namespace pgmhd
