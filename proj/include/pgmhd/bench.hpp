#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pgmhd/graph.hpp"
#include "pgmhd/infer.hpp"

namespace pgmhd::bench {

/// Entries of a dense class x term conditional probability table.
/// Throws ArgumentError on overflow.
std::uint64_t dense_cpt_entries(std::uint64_t classes, std::uint64_t distinct_terms);

struct CorpusParams {
    std::size_t classes = 100;
    std::size_t terms_per_class = 50;
    /// Size of the private vocabulary classes draw from; 0 gives every class
    /// its own terms (classes * private terms per class).
    std::size_t vocabulary = 0;
    std::size_t rows = 100'000;
    std::size_t terms_per_row = 1;
    double zipf = 1.0;
    /// Fraction of each class's term slots filled from a pool shared by all classes.
    double shared_fraction = 0.0;
    std::uint64_t seed = 1;

    void check() const;
};

/// Seeded synthetic classified search log.
///
/// Each class owns `terms_per_class` term slots. Private slots map onto the
/// private vocabulary through a seeded permutation (classes overlap only
/// when the vocabulary is smaller than classes * slots); shared slots are
/// drawn from a common pool. Slot order is shuffled per class and a row's
/// terms are Zipf-distributed over slot rank. Row i is a pure function of
/// (seed, i), so any row range can be regenerated independently.
class SyntheticCorpus {
public:
    explicit SyntheticCorpus(CorpusParams params);

    const CorpusParams& params() const noexcept { return params_; }

    std::size_t class_of(std::size_t row) const noexcept;
    /// Distinct term ids of `row`, in draw order.
    void row_terms(std::size_t row, std::vector<std::uint32_t>& out) const;

    const std::string& class_label(std::size_t c) const { return class_labels_[c]; }
    const std::string& term_label(std::uint32_t t) const { return term_labels_[t]; }
    std::span<const std::uint32_t> class_terms(std::size_t c) const { return class_terms_[c]; }

    /// Number of term ids (private vocabulary plus shared pool).
    std::size_t term_id_count() const noexcept { return term_labels_.size(); }
    /// Term ids assigned to at least one class.
    std::size_t assigned_terms() const noexcept { return assigned_terms_; }

    /// Trains rows [0, rows) into a 2-level graph with `shards` workers.
    LeveledGraph train(std::size_t shards) const;

private:
    std::uint64_t draw(std::size_t row, std::uint64_t salt) const noexcept;

    CorpusParams params_;
    std::vector<std::string> class_labels_;
    std::vector<std::string> term_labels_;
    std::vector<std::vector<std::uint32_t>> class_terms_;
    std::vector<double> zipf_cdf_;
    std::size_t assigned_terms_ = 0;
};

/// Dense class x term count table Naive Bayes. Every cell is allocated
/// whether or not the pair was ever observed.
class DenseNaiveBayes {
public:
    DenseNaiveBayes(std::size_t classes, std::size_t terms);

    void learn(std::size_t cls, std::uint32_t term);
    /// Laplace-smoothed argmax class.
    std::size_t classify(std::span<const std::uint32_t> terms) const;

    std::uint64_t entries() const noexcept { return counts_.size(); }
    std::size_t memory_bytes() const noexcept;

private:
    std::size_t classes_;
    std::size_t terms_;
    std::vector<std::uint32_t> counts_;
    std::vector<std::uint64_t> class_totals_;
    std::uint64_t total_ = 0;
};

/// Fraction of rows in [first, first + count) whose generating class is
/// among the top `k` labels returned by classify_instance.
double top_k_recall(const LeveledGraph& g, const SyntheticCorpus& corpus, std::size_t first, std::size_t count,
                    std::size_t k, const SmoothingParams& smoothing);

struct BaselineResult {
    std::uint64_t entries = 0;
    std::size_t memory_bytes = 0;
    double train_seconds = 0.0;
    /// Fraction of held-out rows where the baseline's argmax is the true class.
    double top1_accuracy = 0.0;
};

struct BenchResult {
    CorpusParams params;
    std::size_t shards = 1;
    std::uint64_t observations = 0;
    std::size_t root_nodes = 0;
    std::size_t distinct_terms = 0;
    std::size_t stored_arcs = 0;
    std::uint64_t dense_cpt_entries = 0;
    double arc_ratio = 0.0;
    std::size_t memory_bytes = 0;
    std::uint64_t dense_cpt_bytes = 0;
    double top1_accuracy = 0.0;
    double train_seconds = 0.0;
    double classify_per_second = 0.0;
    std::optional<BaselineResult> baseline;
};

struct BenchOptions {
    std::size_t shards = 1;
    std::size_t eval_rows = 1000;
    bool baseline = false;
    /// Refuse to allocate a dense baseline larger than this many cells.
    std::uint64_t baseline_cell_limit = 1ull << 28;
};

BenchResult run_bench(const CorpusParams& params, const BenchOptions& options);

}  // namespace pgmhd::bench
