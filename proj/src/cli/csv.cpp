#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rsl/cli.hpp"

namespace rsl::cli {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  (void)ec;
  return std::string(buf.data(), end);
}

void write_series_csv(const std::filesystem::path& path, const SeriesTable& table) {
  for (const auto& column : table.values) {
    if (column.size() != table.iterations.size()) {
      throw Error(ErrorCode::DimensionMismatch, "column length differs from the iteration count in " + path.string());
    }
  }
  if (table.values.size() != table.columns.size()) {
    throw Error(ErrorCode::DimensionMismatch, "column names and values disagree in " + path.string());
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::FileNotFound, "cannot write " + path.string());
  out << "iteration";
  for (const std::string& c : table.columns) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < table.iterations.size(); ++r) {
    out << table.iterations[r];
    for (const auto& column : table.values) out << ',' << format_double(column[r]);
    out << '\n';
  }
}

SeriesTable read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  SeriesTable table;
  std::string line;
  std::size_t line_no = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto cells = split(line);
    if (line_no == 1) {
      if (cells.empty() || cells[0] != "iteration") {
        throw Error(ErrorCode::ParseError, path.string() + ": first column must be \"iteration\"");
      }
      table.columns.assign(cells.begin() + 1, cells.end());
      table.values.resize(table.columns.size());
      continue;
    }
    if (cells.size() != table.columns.size() + 1) {
      throw Error(ErrorCode::ParseError, path.string() + " row " + std::to_string(line_no) + ": wrong field count");
    }
    std::size_t it = 0;
    const auto [p, ec] = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), it);
    if (ec != std::errc() || p != cells[0].data() + cells[0].size()) {
      throw Error(ErrorCode::ParseError, path.string() + " row " + std::to_string(line_no) + ": bad iteration");
    }
    table.iterations.push_back(it);
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const std::string& cell = cells[c + 1];
      double v = 0.0;
      const auto [q, ec2] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec2 != std::errc() || q != cell.data() + cell.size()) {
        throw Error(ErrorCode::ParseError,
                    path.string() + " row " + std::to_string(line_no) + ": '" + cell + "' is not a number");
      }
      table.values[c].push_back(v);
    }
  }
  if (line_no == 0) throw Error(ErrorCode::ParseError, path.string() + " is empty");
  return table;
}

}  // namespace rsl::cli
