#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Deterministic CSV emission. Output bytes depend only on the cells and
// metadata fed in: UTF-8, LF line endings, ',' separator, floats rendered as
// the shortest decimal that parses back to the identical double. Metadata
// travels in '#'-prefixed lines above the header row.

namespace sleepcell::csv {

// shortest decimal form that round-trips to exactly the same double
std::string format_double(double v);

// stable 64-bit FNV-1a over the given bytes; used to fingerprint the
// scenario text in output metadata
std::uint64_t fnv1a64(std::string_view bytes);

// 16 lowercase hex digits, zero padded
std::string hex64(std::uint64_t v);

// One table cell, converted to its final text on construction. Numeric
// overloads pick the canonical rendering so every writer agrees on bytes.
struct Cell {
    std::string text;

    Cell(std::string s) : text(std::move(s)) {}
    Cell(const char* s) : text(s) {}
    Cell(double v) : text(format_double(v)) {}
    Cell(int v) : text(std::to_string(v)) {}
    Cell(long v) : text(std::to_string(v)) {}
    Cell(long long v) : text(std::to_string(v)) {}
    Cell(unsigned v) : text(std::to_string(v)) {}
    Cell(unsigned long v) : text(std::to_string(v)) {}
    Cell(unsigned long long v) : text(std::to_string(v)) {}
};

// Rectangular table. Rows must match the header width, and cell text must be
// free of separators and line breaks; the writer throws instead of quoting.
class Table {
public:
    explicit Table(std::vector<std::string> columns);

    // metadata lines appear as '# key: value' in insertion order
    void meta(const std::string& key, const std::string& value);

    void add_row(std::vector<Cell> cells);

    std::size_t rows() const { return rows_.size(); }

    std::string to_string() const;
    void write_file(const std::string& path) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace sleepcell::csv
