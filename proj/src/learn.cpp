#include "pgmhd/learn.hpp"

#include <exception>
#include <future>
#include <istream>
#include <optional>

namespace pgmhd {

namespace {

constexpr std::size_t kMaxMessages = 20;

void note_error(TrainReport& report, const std::string& what) {
    ++report.errors;
    if (report.messages.size() < kMaxMessages) report.messages.push_back(what);
}

// Feeds every observation of `in` to `sink`, counting malformed rows.
template <class Sink>
std::size_t for_each_observation(std::istream& in, InputFormat format, bool case_fold, TrainReport& report, Sink&& sink) {
    if (format == InputFormat::paths) {
        PathsReader reader(in, case_fold);
        while (true) {
            std::optional<Observation> obs;
            try {
                obs = reader.next();
            } catch (const FormatError& e) {
                note_error(report, e.what());
                continue;
            }
            if (!obs) break;
            ++report.rows;
            sink(*obs);
        }
        return reader.levels();
    }

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (is_skippable_line(raw)) continue;
        std::optional<SearchLogRow> row;
        try {
            row = parse_search_log_line(raw, line_no, case_fold);
        } catch (const FormatError& e) {
            note_error(report, e.what());
            continue;
        }
        if (!row) {
            ++report.skipped;
            continue;
        }
        ++report.rows;
        for (auto& obs : rows_to_observations(*row)) sink(obs);
    }
    return 2;
}

}  // namespace

ObservationBatch read_observations(std::istream& in, InputFormat format, bool case_fold) {
    ObservationBatch batch;
    const auto start = std::chrono::steady_clock::now();
    batch.levels = for_each_observation(in, format, case_fold, batch.report, [&](Observation& obs) {
        batch.observations.push_back(std::move(obs));
    });
    batch.report.observations = batch.observations.size();
    batch.report.elapsed = std::chrono::steady_clock::now() - start;
    return batch;
}

void learn_observation(LeveledGraph& graph, const Observation& obs) {
    std::vector<std::string_view> labels(obs.labels.begin(), obs.labels.end());
    graph.learn_path(labels);
}

TrainReport train_stream(LeveledGraph& graph, std::span<const Observation> observations) {
    TrainReport report;
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::string_view> labels;
    for (const auto& obs : observations) {
        labels.assign(obs.labels.begin(), obs.labels.end());
        graph.learn_path(labels);
        ++report.rows;
        ++report.observations;
    }
    report.elapsed = std::chrono::steady_clock::now() - start;
    return report;
}

TrainReport train_stream(LeveledGraph& graph, std::istream& in, InputFormat format, bool case_fold) {
    TrainReport report;
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::string_view> labels;
    for_each_observation(in, format, case_fold, report, [&](const Observation& obs) {
        labels.assign(obs.labels.begin(), obs.labels.end());
        graph.learn_path(labels);
        ++report.observations;
    });
    report.elapsed = std::chrono::steady_clock::now() - start;
    return report;
}

LeveledGraph train_sharded(std::size_t levels, std::size_t rows, const PathSource& source, std::size_t shards) {
    if (shards == 0) throw ArgumentError("shard count must be >= 1");
    auto train_shard = [&](std::size_t shard) {
        LeveledGraph g(levels);
        std::vector<std::string_view> labels;
        for (std::size_t row = shard; row < rows; row += shards) {
            labels.clear();
            source(row, labels);
            if (!labels.empty()) g.learn_path(labels);
        }
        return g;
    };

    if (shards == 1) return train_shard(0);

    std::vector<std::future<LeveledGraph>> futures;
    futures.reserve(shards);
    for (std::size_t s = 0; s < shards; ++s) futures.push_back(std::async(std::launch::async, train_shard, s));

    // Wait for every shard before rethrowing so no thread outlives `source`.
    std::vector<LeveledGraph> graphs;
    std::exception_ptr failure;
    for (auto& f : futures) {
        try {
            graphs.push_back(f.get());
        } catch (...) {
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    LeveledGraph result(levels);
    for (const auto& g : graphs) result.merge_from(g);
    return result;
}

LeveledGraph train_sharded(std::size_t levels, std::span<const Observation> observations, std::size_t shards) {
    return train_sharded(
        levels, observations.size(),
        [observations](std::size_t i, std::vector<std::string_view>& out) {
            const auto& labels = observations[i].labels;
            out.assign(labels.begin(), labels.end());
        },
        shards);
}

}  // namespace pgmhd
