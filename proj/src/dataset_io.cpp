#include "cointsearch/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <vector>

#include "cointsearch/errors.hpp"

namespace cointsearch {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string where(const std::string& source, int line, const std::string& column) {
  return source + ":" + std::to_string(line) + ", column '" + column + "'";
}

}  // namespace

AlignedDataset parse_dataset(std::istream& in, const std::string& source) {
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv(line);
      break;
    }
  }
  if (header.empty()) throw ParseError(source + ": file is empty");
  if (header[0] != "year") {
    throw ParseError(source + ":" + std::to_string(line_no) + ": first column must be 'year', found '" +
                     header[0] + "'");
  }
  if (header.size() < 2) throw ParseError(source + ": no data columns after 'year'");
  std::set<std::string> seen;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j].empty()) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": column " + std::to_string(j + 1) +
                       " has an empty name");
    }
    if (!seen.insert(header[j]).second) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": duplicate column '" + header[j] +
                       "' (column " + std::to_string(j + 1) + ")");
    }
  }

  std::vector<std::vector<double>> values(header.size() - 1);
  int first_year = 0, prev_year = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, found " + std::to_string(cells.size()));
    }
    int year = 0;
    const auto& yc = cells[0];
    auto [yp, yerr] = std::from_chars(yc.data(), yc.data() + yc.size(), year);
    if (yerr != std::errc() || yp != yc.data() + yc.size()) {
      throw ParseError(where(source, line_no, "year") + ": '" + yc + "' is not an integer year");
    }
    if (any && year != prev_year + 1) {
      if (year > prev_year + 1) {
        std::string missing = std::to_string(prev_year + 1);
        if (year > prev_year + 2) missing += " to " + std::to_string(year - 1);
        throw ParseError(where(source, line_no, "year") + ": gap in years, " + missing + " missing");
      }
      throw ParseError(where(source, line_no, "year") + ": year " + std::to_string(year) +
                       " does not follow " + std::to_string(prev_year));
    }
    if (!any) first_year = year;
    any = true;
    prev_year = year;
    for (std::size_t j = 1; j < cells.size(); ++j) {
      double v = 0.0;
      const auto& c = cells[j];
      auto [p, err] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (c.empty() || err != std::errc() || p != c.data() + c.size() || !std::isfinite(v)) {
        throw ParseError(where(source, line_no, header[j]) + ": non-numeric value '" + c + "'");
      }
      values[j - 1].push_back(v);
    }
  }
  if (!any) throw InsufficientDataError(source + ": no data rows");

  std::vector<TimeSeries> cols;
  for (std::size_t j = 1; j < header.size(); ++j) {
    cols.emplace_back(header[j], first_year, std::move(values[j - 1]));
  }
  return AlignedDataset(first_year, std::move(cols));
}

AlignedDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  return parse_dataset(in, path);
}

}  // namespace cointsearch
