#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <cstddef>

namespace stochlog {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Comma-separated, LF-terminated text with a header row, built in memory
/// so that files are written in one go once all results exist.
class CsvBuilder {
 public:
  explicit CsvBuilder(std::initializer_list<std::string_view> header);

  CsvBuilder& add(double v);
  CsvBuilder& add(std::int64_t v);
  CsvBuilder& add(std::uint64_t v);
  CsvBuilder& add(int v) { return add(static_cast<std::int64_t>(v)); }
  CsvBuilder& add(bool v) { return add(static_cast<std::int64_t>(v ? 1 : 0)); }
  CsvBuilder& add(std::string_view v);
  CsvBuilder& add(const char* v) { return add(std::string_view(v)); }
  void end_row();

  const std::string& str() const { return text_; }
  std::size_t rows() const { return rows_; }

 private:
  void sep();

  std::string text_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
  std::size_t rows_ = 0;
};

/// Writes via a temporary file in the same directory and renames it.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace stochlog
