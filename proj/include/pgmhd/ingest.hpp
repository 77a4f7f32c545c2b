#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pgmhd {

/// One path through the levels: `labels[i]` is the outcome at level i.
/// Paths always start at level 0 and may stop early (partial paths).
struct Observation {
    std::vector<std::string> labels;
    std::size_t line = 0;

    std::size_t size() const noexcept { return labels.size(); }
    bool operator==(const Observation& o) const { return labels == o.labels; }
};

/// One row of a classified search log: a user, the user's class and the
/// distinct terms the user searched for.
struct SearchLogRow {
    std::string user_id;
    std::string classification;
    std::vector<std::string> terms;
    std::size_t line = 0;
};

/// Trims, collapses internal runs of spaces and optionally ASCII-lowercases.
std::string normalize_label(std::string_view raw, bool case_fold);

// -- paths files --------------------------------------------------------
//
//   # comment
//   levels 3
//   G1<TAB>F1<TAB>F2
//   G2<TAB>F3
//
// Every data line holds at most `levels` TAB-separated labels. Trailing
// fields may be empty (partial path); an empty field followed by a
// non-empty one is an error.

struct PathsFile {
    std::size_t levels = 0;
    std::vector<Observation> observations;
};

/// Streaming reader. The constructor consumes the header; `next()` returns
/// the following observation or nullopt at end of input. Both throw
/// FormatError with the offending line number.
class PathsReader {
public:
    PathsReader(std::istream& in, bool case_fold = false);

    std::size_t levels() const noexcept { return levels_; }
    std::optional<Observation> next();
    /// Line number of the last line read.
    std::size_t line() const noexcept { return line_; }

private:
    std::istream& in_;
    bool case_fold_;
    std::size_t levels_ = 0;
    std::size_t line_ = 0;
};

/// Parses one data line of a paths file.
Observation parse_path_line(std::string_view line, std::size_t levels, std::size_t line_no, bool case_fold = false);

PathsFile parse_paths(std::istream& in, bool case_fold = false);
void write_paths(std::ostream& out, const PathsFile& file);

// -- search logs --------------------------------------------------------
//
//   user_id<TAB>classification<TAB>term|term|term

/// Parses one log line. Returns nullopt when no term survives cleaning.
std::optional<SearchLogRow> parse_search_log_line(std::string_view line, std::size_t line_no, bool case_fold = true);

struct SearchLog {
    std::vector<SearchLogRow> rows;
    /// Rows dropped because their term list was empty after cleaning.
    std::size_t skipped = 0;
};

SearchLog parse_search_log(std::istream& in, bool case_fold = true);

/// One (classification -> term) observation per distinct term of the row.
std::vector<Observation> rows_to_observations(const SearchLogRow& row);

/// True for blank lines and lines whose first non-space character is '#'.
bool is_skippable_line(std::string_view line);

}  // namespace pgmhd
