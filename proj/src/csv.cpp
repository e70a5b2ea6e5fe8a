#include "lrphase/csv.hpp"

#include <fmt/format.h>

#include "lrphase/errors.hpp"

namespace lrphase {

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

CsvWriter::Cell::Cell(double v) : text_(format_number(v)) {}
CsvWriter::Cell::Cell(int v) : text_(std::to_string(v)) {}
CsvWriter::Cell::Cell(std::size_t v) : text_(std::to_string(v)) {}
CsvWriter::Cell::Cell(std::string s) : text_(std::move(s)) {}
CsvWriter::Cell::Cell(const char* s) : text_(s) {}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::string_view config_hash,
                     std::vector<std::string> columns)
    : out_(path), path_(path), ncols_(columns.size()) {
  if (!out_) throw InvalidArgument(fmt::format("cannot write {}", path.string()));
  out_ << "# config_hash: " << config_hash << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(std::initializer_list<Cell> cells) { row(std::vector<Cell>(cells)); }

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != ncols_) {
    throw InvalidArgument(fmt::format("{}: row has {} cells, header has {}", path_.string(), cells.size(), ncols_));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i].text();
  out_ << '\n';
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument(fmt::format("cannot write {}", path.string()));
  out << j.dump(2) << '\n';
}

}  // namespace lrphase
