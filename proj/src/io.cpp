#include "fpt/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fpt {

std::string format_float(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

namespace {

// Quote a CSV field only when it contains a delimiter, quote, or newline.
std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string cell_text(const CsvCell& cell) {
    if (auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
    if (auto* d = std::get_if<double>(&cell)) return format_float(*d);
    return csv_escape(std::get<std::string>(cell));
}

} // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
    if (header.empty()) throw std::invalid_argument("CsvWriter: header must not be empty");
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += csv_escape(header[i]);
    }
    buffer_ += '\n';
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
    if (closed_) throw std::logic_error("CsvWriter: row() after close()");
    if (cells.size() != columns_)
        throw std::invalid_argument("CsvWriter: row width does not match the header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += cell_text(cells[i]);
    }
    buffer_ += '\n';
}

void CsvWriter::close() {
    if (closed_) return;
    closed_ = true;
    write_text(path_, buffer_);
    buffer_.clear();
}

std::string dump_json(const nlohmann::json& j) {
    return j.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec)
            throw ConfigError("cannot create directory " + path.parent_path().string() + ": " +
                              ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw ConfigError("write failed for " + path.string());
}

nlohmann::json load_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

} // namespace fpt
