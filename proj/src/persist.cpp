#include "pgmhd/persist.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <tuple>
#include <vector>

namespace pgmhd {

namespace {

constexpr std::string_view kMagic = "PGMHD 1";
constexpr std::string_view kMagicPrefix = "PGMHD ";

std::uint32_t crc_of(std::string_view bytes) {
    uLong crc = crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed large inputs in chunks.
    constexpr std::size_t kChunk = 1u << 30;
    for (std::size_t off = 0; off < bytes.size(); off += kChunk) {
        const std::size_t len = std::min(kChunk, bytes.size() - off);
        crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + off), static_cast<uInt>(len));
    }
    return static_cast<std::uint32_t>(crc);
}

std::string hex32(std::uint32_t v) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", v);
    return buf;
}

std::vector<std::string_view> split_tabs(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find('\t', start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

template <class Int>
Int parse_int(std::string_view text, std::size_t line, const char* what) {
    Int v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw FormatError(std::string("malformed ") + what + " '" + std::string(text) + "'", line);
    }
    return v;
}

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::string escape_label(std::string_view label) {
    std::string out;
    out.reserve(label.size());
    for (char c : label) {
        switch (c) {
            case '%': out += "%25"; break;
            case '\t': out += "%09"; break;
            case '\n': out += "%0A"; break;
            case '\r': out += "%0D"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string unescape_label(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '%') {
            out.push_back(text[i]);
            continue;
        }
        if (i + 2 >= text.size()) throw FormatError("truncated escape in '" + std::string(text) + "'");
        const int hi = hex_digit(text[i + 1]);
        const int lo = hex_digit(text[i + 2]);
        if (hi < 0 || lo < 0) throw FormatError("malformed escape in '" + std::string(text) + "'");
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
    }
    return out;
}

std::string to_model_string(const LeveledGraph& g) {
    const GraphRecord r = g.record();
    std::string body;
    body.reserve(64 + r.nodes.size() * 24 + r.arcs.size() * 40);
    body += kMagic;
    body += '\n';
    body += "levels " + std::to_string(r.levels) + " t " + std::to_string(r.observations) + " nodes " +
            std::to_string(r.nodes.size()) + " arcs " + std::to_string(r.arcs.size()) + "\n";
    for (const auto& n : r.nodes) {
        body += "N\t";
        body += std::to_string(n.level);
        body += '\t';
        body += escape_label(n.label);
        body += '\n';
    }
    for (const auto& a : r.arcs) {
        body += "E\t";
        body += std::to_string(a.parent_level);
        body += '\t';
        body += escape_label(a.parent);
        body += '\t';
        body += escape_label(a.child);
        body += '\t';
        body += std::to_string(a.freq);
        body += '\n';
    }
    body += "CRC " + hex32(crc_of(body)) + "\n";
    return body;
}

std::size_t save(const LeveledGraph& g, std::ostream& out) {
    const std::string bytes = to_model_string(g);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed to write model");
    return bytes.size();
}

std::size_t save_file(const LeveledGraph& g, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    const std::size_t n = save(g, out);
    out.close();
    if (!out) throw IoError("failed to write '" + path.string() + "'");
    return n;
}

LeveledGraph from_model_string(std::string_view bytes) {
    // Magic and version first, so foreign files are reported as such.
    const auto first_nl = bytes.find('\n');
    const auto first = bytes.substr(0, first_nl);
    if (first_nl == std::string_view::npos) {
        if (std::string_view(kMagic).starts_with(bytes) || bytes.starts_with(kMagic)) {
            throw CorruptionError("model is truncated");
        }
        throw FormatError("not a model file (bad magic)", 1);
    }
    if (first != kMagic) {
        if (first.starts_with(kMagicPrefix)) throw FormatError("unsupported model version '" + std::string(first) + "'", 1);
        throw FormatError("not a model file (bad magic)", 1);
    }

    if (bytes.back() != '\n') throw CorruptionError("model is truncated (no final newline)");
    const auto last_start = bytes.rfind('\n', bytes.size() - 2) + 1;
    const auto last = bytes.substr(last_start, bytes.size() - 1 - last_start);
    if (!last.starts_with("CRC ") || last.size() != 12) throw CorruptionError("model is truncated (missing checksum)");
    const auto body = bytes.substr(0, last_start);
    // Compared as text so that a case flip in a hex digit is caught too.
    if (last.substr(4) != hex32(crc_of(body))) throw CorruptionError("checksum mismatch");

    std::vector<std::string_view> lines;
    for (std::size_t pos = first_nl + 1; pos < body.size();) {
        const auto nl = body.find('\n', pos);
        lines.push_back(body.substr(pos, nl - pos));
        pos = nl + 1;
    }
    if (lines.empty()) throw FormatError("missing header line", 2);

    GraphRecord r;
    std::size_t declared_nodes = 0, declared_arcs = 0;
    {
        std::istringstream header{std::string(lines[0])};
        std::string k1, k2, k3, k4, extra;
        std::string v1, v2, v3, v4;
        header >> k1 >> v1 >> k2 >> v2 >> k3 >> v3 >> k4 >> v4;
        if (!header || k1 != "levels" || k2 != "t" || k3 != "nodes" || k4 != "arcs" || (header >> extra)) {
            throw FormatError("malformed header '" + std::string(lines[0]) + "'", 2);
        }
        r.levels = parse_int<std::size_t>(v1, 2, "level count");
        r.observations = parse_int<Frequency>(v2, 2, "observation count");
        declared_nodes = parse_int<std::size_t>(v3, 2, "node count");
        declared_arcs = parse_int<std::size_t>(v4, 2, "arc count");
    }
    if (r.levels < 2) throw FormatError("level count must be >= 2", 2);

    std::set<std::pair<std::size_t, std::string>> nodes;
    std::set<std::tuple<std::size_t, std::string, std::string>> arcs;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 2;
        const auto fields = split_tabs(lines[i]);
        if (fields[0] == "N") {
            if (fields.size() != 3) throw FormatError("node record needs 3 fields", line_no);
            Node n{parse_int<std::size_t>(fields[1], line_no, "level"), unescape_label(fields[2])};
            if (n.level >= r.levels) throw FormatError("node level out of range", line_no);
            if (n.label.empty()) throw FormatError("empty node label", line_no);
            if (!nodes.emplace(n.level, n.label).second) throw FormatError("duplicate node '" + n.label + "'", line_no);
            r.nodes.push_back(std::move(n));
        } else if (fields[0] == "E") {
            if (fields.size() != 5) throw FormatError("arc record needs 5 fields", line_no);
            ArcRecord a;
            a.parent_level = parse_int<std::size_t>(fields[1], line_no, "level");
            a.child_level = a.parent_level + 1;
            a.parent = unescape_label(fields[2]);
            a.child = unescape_label(fields[3]);
            a.freq = parse_int<Frequency>(fields[4], line_no, "frequency");
            if (a.child_level >= r.levels) throw FormatError("arc level out of range", line_no);
            if (a.freq == 0) throw FormatError("arc with zero frequency", line_no);
            if (!nodes.contains({a.parent_level, a.parent}) || !nodes.contains({a.child_level, a.child})) {
                throw FormatError("arc '" + a.parent + "' -> '" + a.child + "' references an undeclared node", line_no);
            }
            if (!arcs.emplace(a.parent_level, a.parent, a.child).second) throw FormatError("duplicate arc", line_no);
            r.arcs.push_back(std::move(a));
        } else {
            throw FormatError("unknown record type '" + std::string(fields[0]) + "'", line_no);
        }
    }
    if (r.nodes.size() != declared_nodes || r.arcs.size() != declared_arcs) {
        throw FormatError("header declares " + std::to_string(declared_nodes) + " nodes and " +
                          std::to_string(declared_arcs) + " arcs, file holds " + std::to_string(r.nodes.size()) + " and " +
                          std::to_string(r.arcs.size()),
                          2);
    }
    // Orphan, flow and consistency findings describe graphs that can exist in
    // memory (e.g. built with add_arc_increment), so only structural ones block a load.
    for (const auto& v : validate(r)) {
        if (v.rule == "orphan" || v.rule == "flow" || v.rule == "consistency") continue;
        throw FormatError("model violates '" + v.rule + "' at " + v.subject + ": " + v.message);
    }
    return LeveledGraph::from_record(r);
}

LeveledGraph load(std::istream& in) {
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (in.bad()) throw IoError("failed to read model");
    return from_model_string(bytes);
}

LeveledGraph load_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return load(in);
}

}  // namespace pgmhd
