#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace lrphase {

/// CSV output with a "# config_hash: ..." provenance line before the header.
/// Numbers use 17 significant digits so files round-trip exactly.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::string_view config_hash,
            std::vector<std::string> columns);

  /// A cell is either a number or a preformatted token.
  class Cell {
   public:
    Cell(double v);  // NOLINT: implicit by design of the row syntax
    Cell(int v);
    Cell(std::size_t v);
    Cell(std::string s);
    Cell(const char* s);
    const std::string& text() const { return text_; }

   private:
    std::string text_;
  };

  void row(std::initializer_list<Cell> cells);
  void row(const std::vector<Cell>& cells);

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  std::size_t ncols_;
};

std::string format_number(double v);

/// Pretty-printed JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace lrphase
