#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace chemo {

/// Shortest round-trip rendering (%.17g); "nan"/"inf" spelled out.
std::string fmt_num(double x);

/// Small CSV builder; rows are committed in insertion order.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);
  const std::string& text() const { return text_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t width_;
  std::string text_;
};

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace chemo
