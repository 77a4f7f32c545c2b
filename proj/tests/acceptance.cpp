// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "pgmhd/ambiguity.hpp"
#include "pgmhd/bench.hpp"
#include "pgmhd/infer.hpp"
#include "pgmhd/learn.hpp"
#include "pgmhd/persist.hpp"
#include "pgmhd/similar.hpp"

using namespace pgmhd;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

bool close_rel(double got, double want, double rel) {
    if (want == 0.0) return got == 0.0;
    return std::abs(got - want) <= rel * std::abs(want);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// Random corpus whose labels include reserved and non-ASCII characters.
std::vector<Observation> awkward_paths(std::mt19937_64& rng, std::size_t levels, std::size_t count) {
    static const std::vector<std::string> alphabet{"a", "b b", "tab\tin", "50%", "new\nline", "cr\r", "ü", "✓ok", "%25"};
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<std::size_t> len(2, levels);
    std::vector<Observation> out;
    for (std::size_t i = 0; i < count; ++i) {
        Observation o;
        for (std::size_t l = 0, n = len(rng); l < n; ++l) o.labels.push_back(alphabet[pick(rng)]);
        out.push_back(std::move(o));
    }
    return out;
}

Outcome normalization() {
    Outcome r;
    const auto start = Clock::now();
    std::mt19937_64 rng(1);
    std::size_t children = 0, parents = 0;
    for (int round = 0; round < 1000; ++round) {
        const std::size_t levels = 2 + rng() % 4;
        const auto g = fixtures::train(levels, fixtures::random_paths(rng, levels, 1 + rng() % 300, 1 + rng() % 12));
        for (std::size_t l = 1; l < levels; ++l) {
            for (NodeIndex v = 0; v < g.node_count(l); ++v) {
                double sum = 0;
                for (NodeIndex w : g.parents_of(l, v)) {
                    sum += classification_score(g, {l - 1, g.label(l - 1, w)}, {l, g.label(l, v)});
                }
                ++children;
                r.require(std::abs(sum - 1.0) <= 1e-12, "sum of Cl = " + fmt("%.17g", sum));
            }
        }
        for (std::size_t l = 0; l + 1 < levels; ++l) {
            for (NodeIndex w = 0; w < g.node_count(l); ++w) {
                if (g.out_weight_at(l, w) == 0) continue;
                double sum = 0;
                for (NodeIndex v : g.children_of(l, w)) sum += edge_prob(g, {l, g.label(l, w)}, {l + 1, g.label(l + 1, v)});
                ++parents;
                r.require(std::abs(sum - 1.0) <= 1e-12, "sum of p = " + fmt("%.17g", sum));
            }
        }
    }
    const double elapsed = seconds_since(start);
    r.require(elapsed < 30.0, "runtime " + fmt("%.1f s", elapsed));
    if (r.pass) {
        r.detail = "1000 graphs, " + std::to_string(children) + " child sums, " + std::to_string(parents) +
                   " parent sums, " + fmt("%.2f s", elapsed);
    }
    return r;
}

Outcome oracle_equivalence() {
    Outcome r;
    std::mt19937_64 rng(2);
    const oracle::Q m(1), p(oracle::Q(1, 10));
    std::size_t cases = 0, cl_checks = 0, classify_checks = 0, co_checks = 0;
    while (cases < 600) {
        const std::size_t levels = 2 + rng() % 3;
        const auto paths = fixtures::random_paths(rng, levels, 1 + rng() % 100, 2 + rng() % 5);
        const auto g = fixtures::train(levels, paths);
        const std::size_t level = 1 + rng() % (levels - 1);
        const auto known = oracle::outcomes(paths, level);
        if (known.empty()) continue;
        ++cases;

        for (const auto& v : known) {
            for (const auto& w : oracle::outcomes(paths, level - 1)) {
                const auto [num, den] = oracle::classification(paths, level, w, v);
                const double got = classification_score(g, {level - 1, w}, {level, v});
                r.require(got == static_cast<double>(num) / static_cast<double>(den), "Cl(" + w + "|" + v + ") differs");
                r.require(oracle::Q(num, den) * oracle::Q(den) == oracle::Q(num), "oracle count mismatch");
                ++cl_checks;
            }
        }

        std::vector<std::string> pool(known.begin(), known.end());
        std::set<std::string> features;
        for (std::size_t i = 0, n = 1 + rng() % 3; i < n; ++i) features.insert(pool[rng() % pool.size()]);
        ClassifyOptions opts;
        opts.top_k = 1u << 20;
        const auto got = classify_instance(g, level, std::vector<std::string>(features.begin(), features.end()), opts);
        const auto want = oracle::classify(paths, level, features, m, p);
        r.require(got.scores.size() == want.size(), "candidate set size differs");
        for (const auto& s : got.scores) {
            const auto it = want.find(s.label);
            r.require(it != want.end(), "unexpected candidate " + s.label);
            if (it != want.end()) r.require(close_rel(s.score, oracle::to_double(it->second), 1e-12), "classify score differs");
            ++classify_checks;
        }

        const auto& x = pool[rng() % pool.size()];
        const auto& y = pool[rng() % pool.size()];
        r.require(close_rel(co_score(g, {level, x}, {level, y}), oracle::to_double(oracle::co(paths, level, x, y)), 1e-12),
                  "CO(" + x + "," + y + ") differs");
        ++co_checks;
    }
    if (r.pass) {
        r.detail = std::to_string(cases) + " corpora: " + std::to_string(cl_checks) + " Cl exact, " +
                   std::to_string(classify_checks) + " classify and " + std::to_string(co_checks) + " CO within 1e-12 rel";
    }
    return r;
}

Outcome worked_example() {
    Outcome r;
    const auto g = fixtures::job_search_graph();
    const double cl = classification_score(g, fixtures::root("Java Developer"), fixtures::term("Software Engineer"));
    const double co = co_score(g, fixtures::term("Java"), fixtures::term("C#"));
    const double s = *npmi(g, fixtures::root("Java Developer"), fixtures::term("Java"));
    r.require(g.observations() == 19, "t = " + std::to_string(g.observations()));
    r.require(g.out_weight(fixtures::root("Java Developer")) == 9, "Out(Java Developer)");
    r.require(g.in_weight(fixtures::term("Software Engineer")) == 3, "In(Software Engineer)");
    r.require(cl == 2.0 / 3.0, "Cl = " + fmt("%.17g", cl));
    r.require(std::abs(co - 2.0 / 81.0) <= 1e-12, "CO = " + fmt("%.17g", co));
    r.require(std::abs(s - std::log(19.0 / 9.0) / std::log(19.0 / 2.0)) <= 1e-9, "npmi = " + fmt("%.17g", s));
    if (r.pass) r.detail = "t=19 Out=9 In=3 Cl=2/3 CO=2/81 npmi=" + fmt("%.6f", s);
    return r;
}

Outcome shard_equivalence() {
    Outcome r;
    const auto start = Clock::now();
    bench::CorpusParams params;
    params.classes = 200;
    params.terms_per_class = 40;
    params.vocabulary = 3000;
    params.rows = 100'000;
    params.terms_per_row = 1;
    params.seed = 4;
    const bench::SyntheticCorpus corpus(params);

    // Reference: plain sequential learning, one row after another.
    LeveledGraph sequential(2);
    std::vector<std::uint32_t> ids;
    for (std::size_t row = 0; row < params.rows; ++row) {
        corpus.row_terms(row, ids);
        for (auto t : ids) {
            const std::string_view path[] = {corpus.class_label(corpus.class_of(row)), corpus.term_label(t)};
            sequential.learn_path(path);
        }
    }
    const auto expected = to_model_string(sequential);
    for (std::size_t shards : {1, 2, 4, 8, 17}) {
        r.require(to_model_string(corpus.train(shards)) == expected, std::to_string(shards) + " shards differ");
    }
    const double elapsed = seconds_since(start);
    r.require(elapsed < 60.0, "runtime " + fmt("%.1f s", elapsed));
    if (r.pass) {
        r.detail = "100000 rows, shards {1,2,4,8,17}, " + std::to_string(expected.size()) + " identical bytes, " +
                   fmt("%.2f s", elapsed);
    }
    return r;
}

Outcome progressive_learning() {
    Outcome r;
    std::mt19937_64 rng(5);
    for (int round = 0; round < 100; ++round) {
        const std::size_t levels = 2 + rng() % 4;
        const auto paths = fixtures::random_paths(rng, levels, 1 + rng() % 400, 2 + rng() % 10);
        const std::size_t cut = rng() % (paths.size() + 1);
        const std::span<const Observation> all(paths), d1 = all.first(cut), d2 = all.subspan(cut);

        LeveledGraph g(levels);
        train_stream(g, d1);
        if (round % 2 == 1) g = from_model_string(to_model_string(g));  // resume from a saved model
        train_stream(g, d2);

        LeveledGraph whole(levels);
        train_stream(whole, all);
        r.require(to_model_string(g) == to_model_string(whole), "split " + std::to_string(round) + " differs");
    }
    if (r.pass) r.detail = "100 random splits byte-identical (half resumed from a saved model)";
    return r;
}

Outcome scalability() {
    Outcome r;
    bench::CorpusParams params;
    params.classes = 1000;
    params.terms_per_class = 30;
    params.vocabulary = 3000;
    params.seed = 6;

    params.rows = 1'000'000;
    const auto small = bench::SyntheticCorpus(params).train(1);
    const std::size_t small_bytes = small.memory_footprint();

    params.rows = 10'000'000;
    const bench::SyntheticCorpus corpus(params);
    const auto start = Clock::now();
    const auto g = corpus.train(1);
    const double elapsed = seconds_since(start);

    const std::size_t arcs = g.arc_count();
    const std::size_t distinct = g.node_count(1);
    const auto dense = bench::dense_cpt_entries(params.classes, distinct);
    const double ratio = static_cast<double>(g.memory_footprint()) / static_cast<double>(small_bytes);
    const auto reference_count = bench::dense_cpt_entries(1300, 2'979'334);

    r.require(g.observations() == 10'000'000, "t = " + std::to_string(g.observations()));
    r.require(elapsed < 600.0, "training took " + fmt("%.1f s", elapsed));
    r.require(distinct == 3000, "distinct terms = " + std::to_string(distinct));
    r.require(arcs <= params.classes * params.terms_per_class, "stored arcs = " + std::to_string(arcs));
    r.require(dense == 3'000'000, "dense entries = " + std::to_string(dense));
    r.require(ratio < 1.2, "footprint ratio 10M/1M = " + fmt("%.3f", ratio));
    r.require(reference_count == 3'873'134'200ull, "dense count for (1300, 2979334) = " + std::to_string(reference_count));
    if (r.pass) {
        r.detail = "10M rows in " + fmt("%.1f s", elapsed) + ", arcs " + std::to_string(arcs) + " <= 30000, dense 3000000, " +
                   "footprint " + std::to_string(small_bytes) + " -> " + std::to_string(g.memory_footprint()) + " B (ratio " +
                   fmt("%.3f", ratio) + "), 1300 x 2979334 = " + std::to_string(reference_count);
    }
    return r;
}

Outcome classification_quality() {
    Outcome r;
    const std::size_t eval = 5000;

    bench::CorpusParams disjoint;
    disjoint.classes = 100;
    disjoint.terms_per_class = 20;
    disjoint.rows = 200'000;
    disjoint.terms_per_row = 2;
    disjoint.seed = 7;
    const bench::SyntheticCorpus a(disjoint);
    const double top1 = bench::top_k_recall(a.train(1), a, disjoint.rows, eval, 1, SmoothingParams{});

    bench::CorpusParams shared = disjoint;
    shared.shared_fraction = 0.2;
    shared.terms_per_row = 3;
    const bench::SyntheticCorpus b(shared);
    const double top3 = bench::top_k_recall(b.train(1), b, shared.rows, eval, 3, SmoothingParams{});

    r.require(top1 == 1.0, "disjoint top-1 accuracy = " + fmt("%.4f", top1));
    r.require(top3 >= 0.9, "20% shared top-3 recall = " + fmt("%.4f", top3));
    if (r.pass) {
        r.detail = "disjoint top-1 " + fmt("%.4f", top1) + ", 20% shared top-3 " + fmt("%.4f", top3) + " on " +
                   std::to_string(eval) + " held-out rows";
    }
    return r;
}

LeveledGraph ambiguity_corpus(bool two_emitters) {
    // Ten classes with 20 private terms each; "java" takes one slot of the
    // java-developer class and, optionally, of the coffee class.
    std::vector<std::vector<std::string>> vocab(10);
    const std::vector<std::string> classes{"java developer", "coffee shop", "nurse", "accountant", "chef",
                                           "pilot",          "teacher",     "welder", "lawyer",     "farmer"};
    for (std::size_t c = 0; c < classes.size(); ++c) {
        for (int j = 0; j < 20; ++j) vocab[c].push_back(classes[c] + " term " + std::to_string(j));
    }
    vocab[0][0] = "java";
    if (two_emitters) vocab[1][0] = "java";

    std::mt19937_64 rng(8);
    LeveledGraph g(2);
    for (int row = 0; row < 50'000; ++row) {
        const std::size_t c = rng() % classes.size();
        const std::string_view path[] = {classes[c], vocab[c][rng() % 20]};
        g.learn_path(path);
    }
    return g;
}

Outcome ambiguity_sanity() {
    Outcome r;
    const auto two = ambiguity_report(ambiguity_corpus(true), {1, "java"});
    const auto one = ambiguity_report(ambiguity_corpus(false), {1, "java"});
    r.require(two.senses.size() == 2, "two emitters gave " + std::to_string(two.senses.size()) + " senses");
    r.require(two.ambiguous, "two emitters not flagged ambiguous");
    r.require(one.senses.size() == 1, "one emitter gave " + std::to_string(one.senses.size()) + " senses");
    r.require(!one.ambiguous, "one emitter flagged ambiguous");
    if (r.pass) {
        r.detail = "2 senses (" + two.senses[0].parents[0] + " / " + two.senses[1].parents[0] + ") vs 1 sense";
    }
    return r;
}

Outcome persistence() {
    Outcome r;
    std::mt19937_64 rng(9);
    std::size_t truncations = 0, flips = 0;
    for (int round = 0; round < 1000; ++round) {
        const std::size_t levels = 2 + rng() % 4;
        const auto paths = round % 2 == 0 ? fixtures::random_paths(rng, levels, rng() % 200, 1 + rng() % 8)
                                          : awkward_paths(rng, levels, rng() % 200);
        const auto g = fixtures::train(levels, paths);
        const auto bytes = to_model_string(g);
        std::stringstream stream;
        save(g, stream);
        r.require(stream.str() == bytes, "save and to_model_string disagree");
        const auto back = load(stream);
        r.require(back == g, "round trip changed the graph");
        r.require(to_model_string(back) == bytes, "re-save is not byte-identical");

        const auto cut = rng() % bytes.size();
        try {
            (void)from_model_string(std::string_view(bytes).substr(0, cut));
            r.require(false, "truncation to " + std::to_string(cut) + " bytes accepted");
        } catch (const Error&) {
            ++truncations;
        }
        auto flipped = bytes;
        flipped[rng() % flipped.size()] ^= static_cast<char>(1u << (rng() % 8));
        try {
            (void)from_model_string(flipped);
            r.require(false, "bit flip accepted");
        } catch (const Error&) {
            ++flips;
        }
    }
    if (r.pass) {
        r.detail = "1000 round trips byte-identical, " + std::to_string(truncations) + " truncations and " +
                   std::to_string(flips) + " bit flips detected";
    }
    return r;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"normalization", normalization},
        {"oracle equivalence", oracle_equivalence},
        {"worked example", worked_example},
        {"shard/merge equivalence", shard_equivalence},
        {"progressive learning", progressive_learning},
        {"scalability", scalability},
        {"classification quality", classification_quality},
        {"ambiguity sanity", ambiguity_sanity},
        {"persistence", persistence},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %zu %s [%.2f s]: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    seconds_since(start), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
