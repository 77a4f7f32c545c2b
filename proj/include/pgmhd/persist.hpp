#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "pgmhd/graph.hpp"

namespace pgmhd {

// Model file, version 1 (UTF-8, one record per line, fields TAB-separated):
//
//   PGMHD 1
//   levels <m> t <t> nodes <n> arcs <a>
//   N <level> <label>
//   E <parent level> <parent> <child> <freq>
//   CRC <crc32 of every preceding byte, 8 lowercase hex digits>
//
// Nodes are sorted by (level, label), arcs by (level, parent, child), so
// equal graphs serialize to identical bytes. Labels escape '%', TAB, LF and
// CR as %25, %09, %0A and %0D.

std::string escape_label(std::string_view label);
/// Throws FormatError on a malformed escape.
std::string unescape_label(std::string_view text);

std::string to_model_string(const LeveledGraph& g);
/// Writes the model and returns the number of bytes written.
std::size_t save(const LeveledGraph& g, std::ostream& out);
std::size_t save_file(const LeveledGraph& g, const std::filesystem::path& path);

/// Throws FormatError on a bad magic line, version, record or structure and
/// CorruptionError on truncation or checksum mismatch. A graph that passed
/// `validate` when saved passes it again after loading.
LeveledGraph from_model_string(std::string_view bytes);
LeveledGraph load(std::istream& in);
LeveledGraph load_file(const std::filesystem::path& path);

}  // namespace pgmhd
