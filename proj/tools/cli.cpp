#include "cli.hpp"

#include <sys/resource.h>

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>

#include "pgmhd/ambiguity.hpp"
#include "pgmhd/bench.hpp"
#include "pgmhd/infer.hpp"
#include "pgmhd/learn.hpp"
#include "pgmhd/persist.hpp"
#include "pgmhd/similar.hpp"

namespace pgmhd::cli {

namespace {

using json = nlohmann::ordered_json;

/// Raised for argument combinations CLI11 cannot check on its own.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::size_t peak_rss_bytes() {
    rusage usage{};
    if (getrusage(RUSAGE_SELF, &usage) != 0) return 0;
    return static_cast<std::size_t>(usage.ru_maxrss) * 1024;
}

std::vector<std::string> split_pipe(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find('|', start);
        auto piece = normalize_label(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start), false);
        if (!piece.empty()) out.push_back(std::move(piece));
        if (pos == std::string::npos) return out;
        start = pos + 1;
    }
}

/// Exact label if present, else its case-folded form if present (models
/// trained from search logs store folded terms), else the label unchanged.
std::string resolve(const LeveledGraph& g, std::size_t level, const std::string& label) {
    if (level >= g.levels() || g.contains({level, label})) return label;
    auto folded = normalize_label(label, true);
    if (g.contains({level, folded})) return folded;
    return label;
}

std::size_t require_level(const LeveledGraph& g, std::optional<std::size_t> level) {
    const std::size_t lv = level.value_or(1);
    if (lv == 0 || lv >= g.levels()) {
        throw UsageError("--level must lie in [1, " + std::to_string(g.levels() - 1) + "] for this model");
    }
    return lv;
}

json similarity_json(const std::vector<SimilarityResult>& results) {
    json arr = json::array();
    for (const auto& r : results) arr.push_back({{"term", r.outcome}, {"co", r.co}, {"common_parents", r.common_parents}});
    return arr;
}

// -- commands ------------------------------------------------------------------

struct TrainArgs {
    std::vector<std::string> inputs;
    std::string format = "searchlog";
    std::size_t shards = 1;
    std::string out;
    std::optional<bool> case_fold;
};

json cmd_train(const TrainArgs& a, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    const InputFormat format = a.format == "paths" ? InputFormat::paths : InputFormat::searchlog;
    const bool fold = a.case_fold.value_or(format == InputFormat::searchlog);

    std::vector<Observation> observations;
    std::optional<std::size_t> levels;
    TrainReport total;
    for (const auto& path : a.inputs) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open input '" + path + "'");
        auto batch = read_observations(in, format, fold);
        if (in.bad()) throw IoError("failed to read input '" + path + "'");
        if (levels && *levels != batch.levels) {
            throw StructuralError("input '" + path + "' declares " + std::to_string(batch.levels) + " levels, expected " +
                                  std::to_string(*levels));
        }
        levels = batch.levels;
        total.rows += batch.report.rows;
        total.skipped += batch.report.skipped;
        total.errors += batch.report.errors;
        for (auto& m : batch.report.messages) err << path << ": " << m << '\n';
        std::move(batch.observations.begin(), batch.observations.end(), std::back_inserter(observations));
    }
    if (total.errors > 0) {
        throw FormatError(std::to_string(total.errors) + " malformed row(s); model not written");
    }

    const LeveledGraph g = train_sharded(levels.value_or(2), observations, a.shards);
    const std::size_t bytes = save_file(g, a.out);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    return json{{"command", "train"},
                {"rows", total.rows},
                {"skipped_rows", total.skipped},
                {"observations", observations.size()},
                {"levels", g.levels()},
                {"nodes", g.node_count()},
                {"arcs", g.arc_count()},
                {"t", g.observations()},
                {"shards", a.shards},
                {"elapsed_seconds", elapsed},
                {"model_memory_bytes", g.memory_footprint()},
                {"peak_rss_bytes", peak_rss_bytes()},
                {"model", a.out},
                {"model_bytes", bytes}};
}

json cmd_merge(const std::vector<std::string>& models, const std::string& out) {
    std::optional<LeveledGraph> merged;
    for (const auto& path : models) {
        LeveledGraph g = load_file(path);
        if (!merged) {
            merged.emplace(std::move(g));
        } else {
            merged->merge_from(g);
        }
    }
    const std::size_t bytes = save_file(*merged, out);
    return json{{"command", "merge"},
                {"inputs", models.size()},
                {"levels", merged->levels()},
                {"nodes", merged->node_count()},
                {"arcs", merged->arc_count()},
                {"t", merged->observations()},
                {"model", out},
                {"model_bytes", bytes}};
}

struct ClassifyArgs {
    std::string model;
    std::string features;
    std::string path;
    std::optional<std::size_t> level;
    double m_est = 1.0;
    double p_prior = 0.1;
    std::size_t top_k = 10;
    double threshold = 0.0;
    bool normalize = false;
};

json cmd_classify(const ClassifyArgs& a) {
    const bool by_path = !a.path.empty();
    if (by_path && !a.features.empty()) throw UsageError("give either --features or --path, not both");
    auto items = split_pipe(by_path ? a.path : a.features);
    if (items.empty()) throw UsageError(by_path ? "--path is empty" : "--features is empty");
    try {
        SmoothingParams{a.m_est, a.p_prior}.check();
    } catch (const ArgumentError& e) {
        throw UsageError(e.what());
    }

    const LeveledGraph g = load_file(a.model);
    const std::size_t level = require_level(g, a.level);
    for (std::size_t i = 0; i < items.size(); ++i) items[i] = resolve(g, level + (by_path ? i : 0), items[i]);

    const ClassifyOptions options{{a.m_est, a.p_prior}, a.top_k, a.threshold, a.normalize};
    const auto result = by_path ? classify_path(g, level, items, options) : classify_instance(g, level, items, options);

    json results = json::array();
    for (const auto& s : result.scores) results.push_back({{"label", s.label}, {"score", s.score}, {"rank", s.rank}});
    return json{{"results", std::move(results)}, {"diagnostics", result.diagnostics}};
}

json cmd_related(const std::string& model, const std::string& term, std::optional<std::size_t> level, std::size_t top_k,
                 double min_co) {
    const LeveledGraph g = load_file(model);
    const std::size_t lv = require_level(g, level);
    const auto label = resolve(g, lv, normalize_label(term, false));
    return similarity_json(related_terms(g, {lv, label}, top_k, min_co));
}

json cmd_ambiguous(const std::string& model, const std::string& term, std::optional<std::size_t> level,
                   const AmbiguityOptions& options) {
    const LeveledGraph g = load_file(model);
    const std::size_t lv = require_level(g, level);
    const auto label = resolve(g, lv, normalize_label(term, false));
    const auto report = ambiguity_report(g, {lv, label}, options);

    json parents = json::array();
    for (const auto& p : report.parent_scores) parents.push_back({{"parent", p.parent}, {"npmi", p.npmi}});
    json senses = json::array();
    for (const auto& s : report.senses) senses.push_back({{"parents", s.parents}, {"related", similarity_json(s.related)}});
    return json{{"term", report.term},
                {"ambiguous", report.ambiguous},
                {"tau", options.tau},
                {"sim_threshold", options.sim_threshold},
                {"parents", std::move(parents)},
                {"senses", std::move(senses)}};
}

json cmd_stats(const std::string& model) {
    const LeveledGraph g = load_file(model);
    json nodes = json::array(), arcs = json::array(), totals = json::array(), violations = json::array();
    for (std::size_t l = 0; l < g.levels(); ++l) nodes.push_back(g.node_count(l));
    for (std::size_t l = 0; l + 1 < g.levels(); ++l) {
        arcs.push_back(g.arc_count(l));
        totals.push_back(g.transition_total(l));
    }
    for (const auto& v : validate(g)) violations.push_back({{"rule", v.rule}, {"subject", v.subject}, {"message", v.message}});
    return json{{"levels", g.levels()},
                {"t", g.observations()},
                {"nodes", g.node_count()},
                {"arcs", g.arc_count()},
                {"nodes_per_level", std::move(nodes)},
                {"arcs_per_transition", std::move(arcs)},
                {"transition_totals", std::move(totals)},
                {"memory_bytes", g.memory_footprint()},
                {"violations", std::move(violations)}};
}

struct BenchArgs {
    bench::CorpusParams params;
    std::size_t shards = 1;
    std::size_t eval_rows = 1000;
    std::string baseline;
    bool deterministic = false;
    std::optional<std::uint64_t> dense_count;
};

json cmd_bench(const BenchArgs& a) {
    if (a.dense_count) {
        return json{{"classes", a.params.classes},
                    {"distinct_terms", *a.dense_count},
                    {"dense_cpt_entries", bench::dense_cpt_entries(a.params.classes, *a.dense_count)}};
    }
    bench::BenchResult r;
    try {
        if (a.params.rows == 0) throw ArgumentError("--rows must be positive");
        r = bench::run_bench(a.params, {a.shards, a.eval_rows, a.baseline == "dense-nb"});
    } catch (const ArgumentError& e) {
        throw UsageError(e.what());
    }

    const auto& p = r.params;
    json out{{"classes", p.classes},
             {"terms_per_class", p.terms_per_class},
             {"vocabulary", p.vocabulary},
             {"rows", p.rows},
             {"terms_per_row", p.terms_per_row},
             {"zipf", p.zipf},
             {"shared_fraction", p.shared_fraction},
             {"seed", p.seed},
             {"observations", r.observations},
             {"root_nodes", r.root_nodes},
             {"distinct_terms", r.distinct_terms},
             {"stored_arcs", r.stored_arcs},
             {"dense_cpt_entries", r.dense_cpt_entries},
             {"arc_ratio", r.arc_ratio},
             {"memory_bytes", r.memory_bytes},
             {"dense_cpt_bytes", r.dense_cpt_bytes},
             {"top1_accuracy", r.top1_accuracy}};
    if (!a.deterministic) {
        out["shards"] = r.shards;
        out["train_seconds"] = r.train_seconds;
        out["classify_per_second"] = r.classify_per_second;
    }
    if (r.baseline) {
        json b{{"kind", "dense-nb"},
               {"entries", r.baseline->entries},
               {"memory_bytes", r.baseline->memory_bytes},
               {"top1_accuracy", r.baseline->top1_accuracy}};
        if (!a.deterministic) b["train_seconds"] = r.baseline->train_seconds;
        out["baseline"] = std::move(b);
    }
    return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Leveled frequency graph: train, merge and query hierarchical co-occurrence models", "pgmhd"};
    app.require_subcommand(1);

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Train a model from input files");
    train_cmd->add_option("--input", train.inputs, "Input files")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--format", train.format, "Input format")->check(CLI::IsMember({"paths", "searchlog"}));
    train_cmd->add_option("--shards", train.shards, "Parallel training shards")->check(CLI::PositiveNumber);
    train_cmd->add_option("--out", train.out, "Model file to write")->required();
    train_cmd->add_option("--case-fold", train.case_fold, "Lowercase labels (default: on for searchlog, off for paths)");

    std::vector<std::string> merge_inputs;
    std::string merge_out;
    auto* merge_cmd = app.add_subcommand("merge", "Merge models trained on separate shards");
    merge_cmd->add_option("models", merge_inputs, "Model files")->required()->check(CLI::ExistingFile);
    merge_cmd->add_option("--out", merge_out, "Merged model file")->required();

    ClassifyArgs classify;
    auto* classify_cmd = app.add_subcommand("classify", "Rank the parent classes of an instance");
    classify_cmd->add_option("--model", classify.model)->required();
    classify_cmd->add_option("--features", classify.features, "Pipe-separated features at --level");
    classify_cmd->add_option("--path", classify.path, "Pipe-separated path starting at --level");
    classify_cmd->add_option("--level", classify.level, "Level of the features (default 1)");
    classify_cmd->add_option("--m-est", classify.m_est, "m-estimate equivalent sample size");
    classify_cmd->add_option("--p-prior", classify.p_prior, "m-estimate prior");
    classify_cmd->add_option("--top-k", classify.top_k);
    classify_cmd->add_option("--threshold", classify.threshold);
    classify_cmd->add_flag("--normalize", classify.normalize, "Rescale returned scores to sum to 1");

    std::string rel_model, rel_term;
    std::optional<std::size_t> rel_level;
    std::size_t rel_top_k = 10;
    double rel_min_co = 0.0;
    auto* related_cmd = app.add_subcommand("related", "Related outcomes by co-occurrence score");
    related_cmd->add_option("--model", rel_model)->required();
    related_cmd->add_option("--term", rel_term)->required();
    related_cmd->add_option("--level", rel_level);
    related_cmd->add_option("--top-k", rel_top_k);
    related_cmd->add_option("--min-co", rel_min_co);

    std::string amb_model, amb_term;
    std::optional<std::size_t> amb_level;
    AmbiguityOptions amb_options;
    auto* ambiguous_cmd = app.add_subcommand("ambiguous", "Detect the senses of a term");
    ambiguous_cmd->add_option("--model", amb_model)->required();
    ambiguous_cmd->add_option("--term", amb_term)->required();
    ambiguous_cmd->add_option("--level", amb_level);
    ambiguous_cmd->add_option("--tau", amb_options.tau, "Minimum npmi of a sense-carrying parent");
    ambiguous_cmd->add_option("--sim-threshold", amb_options.sim_threshold, "Cosine linking two parents into one sense");
    ambiguous_cmd->add_option("--related-k", amb_options.related_k);

    std::string stats_model;
    auto* stats_cmd = app.add_subcommand("stats", "Summarize a model");
    stats_cmd->add_option("--model", stats_model)->required();

    BenchArgs bench_args;
    auto* bench_cmd = app.add_subcommand("bench", "Synthetic scalability benchmark");
    bench_cmd->add_option("--classes", bench_args.params.classes)->check(CLI::PositiveNumber);
    bench_cmd->add_option("--terms-per-class", bench_args.params.terms_per_class)->check(CLI::PositiveNumber);
    bench_cmd->add_option("--rows", bench_args.params.rows)->check(CLI::PositiveNumber);
    bench_cmd->add_option("--zipf", bench_args.params.zipf)->check(CLI::NonNegativeNumber);
    bench_cmd->add_option("--seed", bench_args.params.seed);
    bench_cmd->add_option("--vocab", bench_args.params.vocabulary, "Private vocabulary size (0: disjoint classes)");
    bench_cmd->add_option("--terms-per-row", bench_args.params.terms_per_row)->check(CLI::PositiveNumber);
    bench_cmd->add_option("--shared-fraction", bench_args.params.shared_fraction)->check(CLI::Range(0.0, 1.0));
    bench_cmd->add_option("--shards", bench_args.shards)->check(CLI::PositiveNumber);
    bench_cmd->add_option("--eval-rows", bench_args.eval_rows);
    bench_cmd->add_option("--baseline", bench_args.baseline)->check(CLI::IsMember({"dense-nb"}));
    bench_cmd->add_flag("--deterministic", bench_args.deterministic, "Omit timings so reports are reproducible");
    bench_cmd->add_option("--dense-count", bench_args.dense_count,
                          "Only compute the dense table size for --classes and this many distinct terms");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());

    auto fail = [&](int code, const std::string& message) {
        err << "error: " << message << '\n';
        out << json{{"error", message}, {"exit_code", code}}.dump() << '\n';
        return code;
    };

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        return fail(kUsage, e.what());
    }

    try {
        json result;
        if (*train_cmd) {
            result = cmd_train(train, err);
        } else if (*merge_cmd) {
            result = cmd_merge(merge_inputs, merge_out);
        } else if (*classify_cmd) {
            result = cmd_classify(classify);
        } else if (*related_cmd) {
            result = cmd_related(rel_model, rel_term, rel_level, rel_top_k, rel_min_co);
        } else if (*ambiguous_cmd) {
            result = cmd_ambiguous(amb_model, amb_term, amb_level, amb_options);
        } else if (*stats_cmd) {
            result = cmd_stats(stats_model);
        } else if (*bench_cmd) {
            result = cmd_bench(bench_args);
        }
        out << result.dump() << '\n';
        return kOk;
    } catch (const UsageError& e) {
        return fail(kUsage, e.what());
    } catch (const IoError& e) {
        return fail(kIoError, e.what());
    } catch (const Error& e) {
        return fail(kDomainError, e.what());
    } catch (const std::exception& e) {
        return fail(kDomainError, e.what());
    }
}

}  // namespace pgmhd::cli
