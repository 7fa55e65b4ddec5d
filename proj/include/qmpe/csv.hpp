#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace qmpe {

/// Shortest round-trip decimal form of x (std::to_chars): deterministic
/// bytes for the same double on every run and platform.
std::string format_double(double x);

std::string format_int(std::int64_t v);

/// Minimal deterministic CSV assembler: header fixed at construction,
/// every row must match its arity, '\n' line endings, no quoting
/// (fields never contain commas).
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header);

    void row(const std::vector<std::string>& fields);

    const std::string& str() const { return buffer_; }
    std::size_t rows() const { return rows_; }

    void write_file(const std::filesystem::path& file) const;

  private:
    std::size_t arity_;
    std::size_t rows_ = 0;
    std::string buffer_;
};

}  // namespace qmpe
