#include "pgmhd/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "pgmhd/learn.hpp"

namespace pgmhd::bench {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double to_unit(std::uint64_t bits) noexcept { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::size_t below(std::uint64_t bits, std::size_t n) noexcept {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(bits) * n) >> 64);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::uint64_t dense_cpt_entries(std::uint64_t classes, std::uint64_t distinct_terms) {
    if (distinct_terms != 0 && classes > std::numeric_limits<std::uint64_t>::max() / distinct_terms) {
        throw ArgumentError("dense table size overflows 64 bits");
    }
    return classes * distinct_terms;
}

void CorpusParams::check() const {
    if (classes == 0 || terms_per_class == 0 || terms_per_row == 0) {
        throw ArgumentError("classes, terms per class and terms per row must be positive");
    }
    if (terms_per_row > terms_per_class) throw ArgumentError("terms per row cannot exceed terms per class");
    if (!(zipf >= 0.0) || !std::isfinite(zipf)) throw ArgumentError("zipf exponent must be a finite value >= 0");
    if (!(shared_fraction >= 0.0 && shared_fraction <= 1.0)) throw ArgumentError("shared fraction must lie in [0, 1]");
    const auto shared = static_cast<std::size_t>(std::llround(shared_fraction * static_cast<double>(terms_per_class)));
    const std::size_t priv = terms_per_class - shared;
    if (vocabulary != 0 && vocabulary < priv) {
        throw ArgumentError("vocabulary must hold at least the private terms of one class");
    }
    if (classes > std::numeric_limits<std::uint32_t>::max() / terms_per_class) throw ArgumentError("corpus too large");
}

SyntheticCorpus::SyntheticCorpus(CorpusParams params) : params_(params) {
    params_.check();
    std::mt19937_64 rng(params_.seed);
    const std::size_t C = params_.classes;
    const std::size_t T = params_.terms_per_class;
    const auto shared = static_cast<std::size_t>(std::llround(params_.shared_fraction * static_cast<double>(T)));
    const std::size_t priv = T - shared;
    const std::size_t vocab = params_.vocabulary != 0 ? params_.vocabulary : C * priv;
    const std::size_t pool =
        shared == 0 ? 0
                    : std::max(shared, static_cast<std::size_t>(std::ceil(params_.shared_fraction * static_cast<double>(vocab))));

    class_labels_.reserve(C);
    for (std::size_t c = 0; c < C; ++c) class_labels_.push_back("c" + std::to_string(c));
    term_labels_.reserve(vocab + pool);
    for (std::size_t t = 0; t < vocab; ++t) term_labels_.push_back("t" + std::to_string(t));
    for (std::size_t t = 0; t < pool; ++t) term_labels_.push_back("s" + std::to_string(t));

    std::vector<std::uint32_t> perm(vocab);
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::uint32_t> pool_ids(pool);
    std::iota(pool_ids.begin(), pool_ids.end(), static_cast<std::uint32_t>(vocab));

    std::vector<bool> used(vocab + pool, false);
    class_terms_.resize(C);
    for (std::size_t c = 0; c < C; ++c) {
        auto& terms = class_terms_[c];
        terms.reserve(T);
        for (std::size_t j = 0; j < priv; ++j) terms.push_back(perm[(c * priv + j) % vocab]);
        // Partial Fisher-Yates: the first `shared` entries become this class's pick.
        for (std::size_t j = 0; j < shared; ++j) {
            std::swap(pool_ids[j], pool_ids[j + below(rng(), pool - j)]);
            terms.push_back(pool_ids[j]);
        }
        std::shuffle(terms.begin(), terms.end(), rng);
        for (auto t : terms) used[t] = true;
    }
    assigned_terms_ = static_cast<std::size_t>(std::count(used.begin(), used.end(), true));

    zipf_cdf_.resize(T);
    double acc = 0.0;
    for (std::size_t r = 0; r < T; ++r) {
        acc += 1.0 / std::pow(static_cast<double>(r + 1), params_.zipf);
        zipf_cdf_[r] = acc;
    }
    for (auto& v : zipf_cdf_) v /= acc;
}

std::uint64_t SyntheticCorpus::draw(std::size_t row, std::uint64_t salt) const noexcept {
    return splitmix64(splitmix64(params_.seed ^ (row * 0xd1b54a32d192ed03ull)) + salt);
}

std::size_t SyntheticCorpus::class_of(std::size_t row) const noexcept { return below(draw(row, 0), params_.classes); }

void SyntheticCorpus::row_terms(std::size_t row, std::vector<std::uint32_t>& out) const {
    out.clear();
    const auto& terms = class_terms_[class_of(row)];
    for (std::size_t j = 0; j < params_.terms_per_row; ++j) {
        const double u = to_unit(draw(row, j + 1));
        auto rank = static_cast<std::size_t>(std::upper_bound(zipf_cdf_.begin(), zipf_cdf_.end(), u) - zipf_cdf_.begin());
        rank = std::min(rank, terms.size() - 1);
        const auto t = terms[rank];
        if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    }
}

LeveledGraph SyntheticCorpus::train(std::size_t shards) const {
    const std::size_t k = params_.terms_per_row;
    if (k == 1) {
        return train_sharded(
            2, params_.rows,
            [this](std::size_t row, std::vector<std::string_view>& out) {
                const auto& terms = class_terms_[class_of(row)];
                const double u = to_unit(draw(row, 1));
                auto rank =
                    static_cast<std::size_t>(std::upper_bound(zipf_cdf_.begin(), zipf_cdf_.end(), u) - zipf_cdf_.begin());
                rank = std::min(rank, terms.size() - 1);
                out.push_back(class_labels_[class_of(row)]);
                out.push_back(term_labels_[terms[rank]]);
            },
            shards);
    }
    // One source index per (row, slot); slots past the row's distinct terms are skipped.
    return train_sharded(
        2, params_.rows * k,
        [this, k](std::size_t index, std::vector<std::string_view>& out) {
            thread_local std::vector<std::uint32_t> ids;
            const std::size_t row = index / k;
            const std::size_t slot = index % k;
            row_terms(row, ids);
            if (slot >= ids.size()) return;
            out.push_back(class_labels_[class_of(row)]);
            out.push_back(term_labels_[ids[slot]]);
        },
        shards);
}

// -- dense baseline ----------------------------------------------------------

DenseNaiveBayes::DenseNaiveBayes(std::size_t classes, std::size_t terms)
    : classes_(classes), terms_(terms), counts_(dense_cpt_entries(classes, terms), 0), class_totals_(classes, 0) {}

void DenseNaiveBayes::learn(std::size_t cls, std::uint32_t term) {
    ++counts_[cls * terms_ + term];
    ++class_totals_[cls];
    ++total_;
}

std::size_t DenseNaiveBayes::classify(std::span<const std::uint32_t> terms) const {
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < classes_; ++c) {
        if (class_totals_[c] == 0) continue;
        const double denom = std::log(static_cast<double>(class_totals_[c] + terms_));
        double score = std::log(static_cast<double>(class_totals_[c]) / static_cast<double>(total_));
        for (const auto t : terms) score += std::log(static_cast<double>(counts_[c * terms_ + t]) + 1.0) - denom;
        if (score > best_score) {
            best_score = score;
            best = c;
        }
    }
    return best;
}

std::size_t DenseNaiveBayes::memory_bytes() const noexcept {
    return counts_.capacity() * sizeof(std::uint32_t) + class_totals_.capacity() * sizeof(std::uint64_t);
}

// -- evaluation ----------------------------------------------------------------

double top_k_recall(const LeveledGraph& g, const SyntheticCorpus& corpus, std::size_t first, std::size_t count,
                    std::size_t k, const SmoothingParams& smoothing) {
    if (count == 0) return 0.0;
    std::size_t hits = 0;
    std::vector<std::uint32_t> ids;
    std::vector<std::string> features;
    ClassifyOptions options{smoothing, k, 0.0, false};
    for (std::size_t row = first; row < first + count; ++row) {
        corpus.row_terms(row, ids);
        features.clear();
        for (auto t : ids) features.push_back(corpus.term_label(t));
        const auto result = classify_instance(g, 1, features, options);
        const auto& truth = corpus.class_label(corpus.class_of(row));
        if (std::any_of(result.scores.begin(), result.scores.end(), [&](const ClassScore& s) { return s.label == truth; })) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(count);
}

BenchResult run_bench(const CorpusParams& params, const BenchOptions& options) {
    if (options.shards == 0) throw ArgumentError("shard count must be >= 1");
    const SyntheticCorpus corpus(params);

    BenchResult r;
    r.params = params;
    r.shards = options.shards;

    auto start = std::chrono::steady_clock::now();
    const LeveledGraph g = corpus.train(options.shards);
    r.train_seconds = seconds_since(start);

    r.observations = g.observations();
    r.root_nodes = g.node_count(0);
    r.distinct_terms = g.node_count(1);
    r.stored_arcs = g.arc_count();
    r.dense_cpt_entries = dense_cpt_entries(params.classes, r.distinct_terms);
    r.arc_ratio = r.dense_cpt_entries == 0 ? 0.0 : static_cast<double>(r.stored_arcs) / static_cast<double>(r.dense_cpt_entries);
    r.memory_bytes = g.memory_footprint();
    r.dense_cpt_bytes = r.dense_cpt_entries * sizeof(double);

    start = std::chrono::steady_clock::now();
    r.top1_accuracy = top_k_recall(g, corpus, params.rows, options.eval_rows, 1, SmoothingParams{});
    const double classify_seconds = seconds_since(start);
    r.classify_per_second = classify_seconds > 0.0 ? static_cast<double>(options.eval_rows) / classify_seconds : 0.0;

    if (options.baseline) {
        const std::uint64_t cells = dense_cpt_entries(params.classes, corpus.term_id_count());
        if (cells > options.baseline_cell_limit) {
            throw ArgumentError("dense baseline would need " + std::to_string(cells) + " cells, above the limit of " +
                                std::to_string(options.baseline_cell_limit));
        }
        BaselineResult b;
        start = std::chrono::steady_clock::now();
        DenseNaiveBayes nb(params.classes, corpus.term_id_count());
        std::vector<std::uint32_t> ids;
        for (std::size_t row = 0; row < params.rows; ++row) {
            corpus.row_terms(row, ids);
            const std::size_t c = corpus.class_of(row);
            for (auto t : ids) nb.learn(c, t);
        }
        b.train_seconds = seconds_since(start);
        b.entries = nb.entries();
        b.memory_bytes = nb.memory_bytes();
        std::size_t hits = 0;
        for (std::size_t row = params.rows; row < params.rows + options.eval_rows; ++row) {
            corpus.row_terms(row, ids);
            if (nb.classify(ids) == corpus.class_of(row)) ++hits;
        }
        b.top1_accuracy = options.eval_rows == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(options.eval_rows);
        r.baseline = b;
    }
    return r;
}

}  // namespace pgmhd::bench
