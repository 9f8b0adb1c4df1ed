#include "stochlog/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace stochlog {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

CsvBuilder::CsvBuilder(std::initializer_list<std::string_view> header) : columns_(header.size()) {
  for (std::string_view h : header) add(h);
  end_row();
  rows_ = 0;
}

void CsvBuilder::sep() {
  if (in_row_ == columns_) throw std::logic_error("csv: too many fields in row");
  if (in_row_++ > 0) text_ += ',';
}

CsvBuilder& CsvBuilder::add(double v) {
  sep();
  text_ += format_double(v);
  return *this;
}

CsvBuilder& CsvBuilder::add(std::int64_t v) {
  sep();
  text_ += std::to_string(v);
  return *this;
}

CsvBuilder& CsvBuilder::add(std::uint64_t v) {
  sep();
  text_ += std::to_string(v);
  return *this;
}

CsvBuilder& CsvBuilder::add(std::string_view v) {
  if (v.find_first_of(",\"\n") != std::string_view::npos) throw std::logic_error("csv: field needs quoting");
  sep();
  text_ += v;
  return *this;
}

void CsvBuilder::end_row() {
  if (in_row_ != columns_) throw std::logic_error("csv: row has the wrong number of fields");
  text_ += '\n';
  in_row_ = 0;
  ++rows_;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace stochlog
