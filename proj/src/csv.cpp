#include "qmpe/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace qmpe {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    if (res.ec != std::errc{})
        throw std::runtime_error("number formatting failed");
    return std::string(buf, res.ptr);
}

std::string format_int(std::int64_t v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc{})
        throw std::runtime_error("number formatting failed");
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : arity_(header.size()) {
    if (header.empty()) throw std::invalid_argument("empty CSV header");
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i > 0) buffer_ += ',';
        buffer_ += header[i];
    }
    buffer_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (fields.size() != arity_)
        throw std::invalid_argument("CSV row arity does not match header");
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) buffer_ += ',';
        buffer_ += fields[i];
    }
    buffer_ += '\n';
    ++rows_;
}

void CsvWriter::write_file(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << buffer_;
    if (!out) throw std::runtime_error("write failed for " + file.string());
}

}  // namespace qmpe
