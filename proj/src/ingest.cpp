#include "pgmhd/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "pgmhd/errors.hpp"

namespace pgmhd {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view strip_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

}  // namespace

std::string normalize_label(std::string_view raw, bool case_fold) {
    const auto s = trim(raw);
    std::string out;
    out.reserve(s.size());
    bool in_space = false;
    for (char c : s) {
        if (c == ' ' || c == '\t') {
            in_space = true;
            continue;
        }
        if (in_space) out.push_back(' ');
        in_space = false;
        if (case_fold && c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        out.push_back(c);
    }
    return out;
}

bool is_skippable_line(std::string_view line) {
    const auto t = trim(line);
    return t.empty() || t.front() == '#';
}

// -- paths ---------------------------------------------------------------

PathsReader::PathsReader(std::istream& in, bool case_fold) : in_(in), case_fold_(case_fold) {
    std::string raw;
    while (std::getline(in_, raw)) {
        ++line_;
        if (is_skippable_line(raw)) continue;
        const auto t = trim(raw);
        constexpr std::string_view keyword = "levels";
        if (!t.starts_with(keyword) || t.size() == keyword.size() || !is_space(t[keyword.size()])) {
            throw FormatError("missing 'levels <m>' header", line_);
        }
        const auto number = trim(t.substr(keyword.size()));
        std::size_t m = 0;
        const auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), m);
        if (ec != std::errc{} || ptr != number.data() + number.size()) {
            throw FormatError("malformed level count '" + std::string(number) + "'", line_);
        }
        if (m < 2) throw FormatError("level count must be >= 2", line_);
        levels_ = m;
        return;
    }
    throw FormatError("missing 'levels <m>' header", line_);
}

std::optional<Observation> PathsReader::next() {
    std::string raw;
    while (std::getline(in_, raw)) {
        ++line_;
        if (is_skippable_line(raw)) continue;
        return parse_path_line(raw, levels_, line_, case_fold_);
    }
    return std::nullopt;
}

Observation parse_path_line(std::string_view line, std::size_t levels, std::size_t line_no, bool case_fold) {
    const auto fields = split(strip_cr(line), '\t');
    if (fields.size() > levels) {
        throw FormatError("expected at most " + std::to_string(levels) + " fields, found " + std::to_string(fields.size()),
                          line_no);
    }
    Observation obs;
    obs.line = line_no;
    bool ended = false;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        auto label = normalize_label(fields[i], case_fold);
        if (label.empty()) {
            if (i == 0) throw FormatError("empty first field", line_no);
            ended = true;
            continue;
        }
        if (ended) throw FormatError("non-empty label after an empty field at level " + std::to_string(i), line_no);
        obs.labels.push_back(std::move(label));
    }
    if (obs.labels.size() < 2) throw FormatError("a path needs at least 2 labels", line_no);
    return obs;
}

PathsFile parse_paths(std::istream& in, bool case_fold) {
    PathsReader reader(in, case_fold);
    PathsFile file;
    file.levels = reader.levels();
    while (auto obs = reader.next()) file.observations.push_back(std::move(*obs));
    return file;
}

void write_paths(std::ostream& out, const PathsFile& file) {
    out << "levels " << file.levels << '\n';
    for (const auto& obs : file.observations) {
        for (std::size_t i = 0; i < obs.labels.size(); ++i) {
            if (i) out << '\t';
            out << obs.labels[i];
        }
        out << '\n';
    }
}

// -- search logs -----------------------------------------------------------

std::optional<SearchLogRow> parse_search_log_line(std::string_view line, std::size_t line_no, bool case_fold) {
    const auto fields = split(strip_cr(line), '\t');
    if (fields.size() != 3) throw FormatError("expected 3 TAB-separated fields, found " + std::to_string(fields.size()), line_no);

    SearchLogRow row;
    row.line = line_no;
    row.user_id = std::string(trim(fields[0]));
    row.classification = normalize_label(fields[1], false);
    if (row.classification.empty()) throw FormatError("empty classification", line_no);

    std::unordered_set<std::string> seen;
    for (auto raw : split(fields[2], '|')) {
        auto term = normalize_label(raw, case_fold);
        if (term.empty() || !seen.insert(term).second) continue;
        row.terms.push_back(std::move(term));
    }
    if (row.terms.empty()) return std::nullopt;
    return row;
}

SearchLog parse_search_log(std::istream& in, bool case_fold) {
    SearchLog log;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (is_skippable_line(raw)) continue;
        if (auto row = parse_search_log_line(raw, line_no, case_fold)) {
            log.rows.push_back(std::move(*row));
        } else {
            ++log.skipped;
        }
    }
    return log;
}

std::vector<Observation> rows_to_observations(const SearchLogRow& row) {
    std::vector<Observation> out;
    out.reserve(row.terms.size());
    for (const auto& term : row.terms) out.push_back(Observation{{row.classification, term}, row.line});
    return out;
}

}  // namespace pgmhd
