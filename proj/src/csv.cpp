#include "sleepcell/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace sleepcell::csv {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

namespace {

void reject_unsafe(const std::string& text, const char* what) {
    for (char c : text)
        if (c == ',' || c == '\n' || c == '\r' || c == '"')
            throw std::invalid_argument(std::string(what) + " contains a separator, quote or "
                                        "line break: '" + text + "'");
}

}  // namespace

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty())
        throw std::invalid_argument("a table needs at least one column");
    for (const auto& c : columns_)
        reject_unsafe(c, "column name");
}

void Table::meta(const std::string& key, const std::string& value) {
    // metadata lives on comment lines, so only line breaks can corrupt it
    for (char c : key + value)
        if (c == '\n' || c == '\r')
            throw std::invalid_argument("metadata must not contain line breaks");
    meta_.emplace_back(key, value);
}

void Table::add_row(std::vector<Cell> cells) {
    if (cells.size() != columns_.size())
        throw std::invalid_argument("row has " + std::to_string(cells.size()) +
                                    " cells, expected " + std::to_string(columns_.size()));
    std::vector<std::string> row;
    row.reserve(cells.size());
    for (auto& c : cells) {
        reject_unsafe(c.text, "cell");
        row.push_back(std::move(c.text));
    }
    rows_.push_back(std::move(row));
}

std::string Table::to_string() const {
    std::string out;
    for (const auto& [key, value] : meta_)
        out += "# " + key + ": " + value + "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i)
            out += ',';
        out += columns_[i];
    }
    out += '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

void Table::write_file(const std::string& path) const {
    // binary mode keeps the line endings LF everywhere
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error(path + ": cannot open for writing");
    const std::string bytes = to_string();
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw std::runtime_error(path + ": write failed");
}

}  // namespace sleepcell::csv
