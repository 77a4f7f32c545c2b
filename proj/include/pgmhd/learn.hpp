#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pgmhd/graph.hpp"
#include "pgmhd/ingest.hpp"

namespace pgmhd {

enum class InputFormat { paths, searchlog };

/// Outcome of a training pass. Malformed rows are counted and skipped.
struct TrainReport {
    std::size_t rows = 0;          // input rows accepted
    std::size_t observations = 0;  // paths learned
    std::size_t errors = 0;        // malformed rows skipped
    std::size_t skipped = 0;       // rows with nothing to learn (e.g. empty term list)
    std::vector<std::string> messages;  // first few error messages
    std::chrono::duration<double> elapsed{0};
};

/// Observations parsed from one input, with malformed rows reported rather
/// than thrown. A missing paths header still throws FormatError.
struct ObservationBatch {
    std::size_t levels = 2;
    std::vector<Observation> observations;
    TrainReport report;
};

ObservationBatch read_observations(std::istream& in, InputFormat format, bool case_fold);

/// Learns one path. Throws StructuralError if it spans more levels than the
/// graph, MutationError if the graph is frozen.
void learn_observation(LeveledGraph& graph, const Observation& obs);

TrainReport train_stream(LeveledGraph& graph, std::span<const Observation> observations);
/// Parses and learns in one pass.
TrainReport train_stream(LeveledGraph& graph, std::istream& in, InputFormat format, bool case_fold);

/// Writes the labels of row `index` into `out` (cleared by the caller).
/// Leaving `out` empty skips the row.
using PathSource = std::function<void(std::size_t index, std::vector<std::string_view>& out)>;

/// Trains `rows` paths drawn from `source` into `shards` private graphs
/// (round-robin by row) on concurrent threads and merges them. The result
/// equals sequential training over the same rows.
LeveledGraph train_sharded(std::size_t levels, std::size_t rows, const PathSource& source, std::size_t shards);
LeveledGraph train_sharded(std::size_t levels, std::span<const Observation> observations, std::size_t shards);

}  // namespace pgmhd
