// io.hpp — CSV emission with fixed float formatting and JSON helpers

#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fpt/types.hpp"

namespace fpt {

using CsvCell = std::variant<long long, double, std::string>;

// UTF-8 CSV writer: one header row, floats rendered as %.12e so identical
// data always produces identical bytes.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    void row(const std::vector<CsvCell>& cells);
    void close();

private:
    std::string buffer_;
    std::filesystem::path path_;
    std::size_t columns_;
    bool closed_{false};
};

// Render a double exactly as the CSV writer does (%.12e).
std::string format_float(double v);

// Serialize with sorted keys, two-space indent, trailing newline; write_text
// creates parent directories and reports unwritable paths as ConfigError.
std::string dump_json(const nlohmann::json& j);
void write_text(const std::filesystem::path& path, const std::string& content);

// Parse a JSON document from disk; parse failures carry line/column context.
nlohmann::json load_json(const std::filesystem::path& path);

} // namespace fpt
