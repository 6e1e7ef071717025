#include "cointsearch/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cointsearch/errors.hpp"

namespace cointsearch {

TimeSeries::TimeSeries(std::string name, int start_year, std::vector<double> values)
    : name_(std::move(name)), start_year_(start_year), values_(std::move(values)) {
  if (values_.empty()) {
    throw InsufficientDataError("series '" + name_ + "' is empty");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DataError("series '" + name_ + "' has a non-finite value in year " +
                      std::to_string(start_year_ + static_cast<int>(i)));
    }
  }
}

double TimeSeries::at_year(int year) const {
  if (year < start_year_ || year > end_year()) {
    throw std::out_of_range("year " + std::to_string(year) + " outside series '" + name_ + "'");
  }
  return values_[static_cast<std::size_t>(year - start_year_)];
}

TimeSeries TimeSeries::window(int first, int last) const {
  first = std::max(first, start_year_);
  last = std::min(last, end_year());
  if (first > last) {
    throw InsufficientDataError("empty window of series '" + name_ + "'");
  }
  auto begin = values_.begin() + (first - start_year_);
  return TimeSeries(name_, first, std::vector<double>(begin, begin + (last - first + 1)));
}

TimeSeries diff(const TimeSeries& s, int d) {
  if (d < 1) throw std::invalid_argument("difference order must be positive");
  if (s.size() <= static_cast<std::size_t>(d)) {
    throw InsufficientDataError("series '" + s.name() + "' too short to difference " +
                                std::to_string(d) + " times");
  }
  std::vector<double> v(s.values().begin(), s.values().end());
  for (int k = 0; k < d; ++k) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i) v[i] = v[i + 1] - v[i];
    v.pop_back();
  }
  return TimeSeries(s.name(), s.start_year() + d, std::move(v));
}

TimeSeries lag(const TimeSeries& s, int k) {
  if (k < 1) throw std::invalid_argument("lag must be positive");
  if (s.size() <= static_cast<std::size_t>(k)) {
    throw InsufficientDataError("series '" + s.name() + "' too short to lag by " +
                                std::to_string(k));
  }
  std::vector<double> v(s.values().begin(), s.values().end() - k);
  return TimeSeries(s.name(), s.start_year() + k, std::move(v));
}

AlignedDataset::AlignedDataset(int first_year, std::vector<TimeSeries> columns, std::string target)
    : first_year_(first_year), columns_(std::move(columns)), target_(std::move(target)) {
  if (columns_.empty()) throw AlignmentError("dataset has no columns");
  length_ = columns_.front().size();
  for (const auto& c : columns_) {
    if (c.start_year() != first_year_ || c.size() != length_) {
      throw AlignmentError("column '" + c.name() + "' does not cover the dataset years");
    }
  }
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    for (std::size_t j = i + 1; j < columns_.size(); ++j) {
      if (columns_[i].name() == columns_[j].name()) {
        throw AlignmentError("duplicate column '" + columns_[i].name() + "'");
      }
    }
  }
  if (target_.empty()) target_ = columns_.front().name();
  if (!has(target_)) throw DataError("target column '" + target_ + "' not in dataset");
}

void AlignedDataset::set_target(const std::string& name) {
  if (!has(name)) throw DataError("target column '" + name + "' not in dataset");
  target_ = name;
}

bool AlignedDataset::has(const std::string& name) const {
  return std::any_of(columns_.begin(), columns_.end(),
                     [&](const TimeSeries& c) { return c.name() == name; });
}

const TimeSeries& AlignedDataset::column(const std::string& name) const {
  for (const auto& c : columns_) {
    if (c.name() == name) return c;
  }
  throw DataError("no column named '" + name + "'");
}

std::vector<std::string> AlignedDataset::names() const {
  std::vector<std::string> out;
  for (const auto& c : columns_) out.push_back(c.name());
  return out;
}

AlignedDataset AlignedDataset::window(int first, int last) const {
  first = std::max(first, first_year_);
  last = std::min(last, last_year());
  if (first > last) throw InsufficientDataError("empty dataset window");
  std::vector<TimeSeries> cols;
  for (const auto& c : columns_) cols.push_back(c.window(first, last));
  return AlignedDataset(first, std::move(cols), target_);
}

void AlignedDataset::add_column(TimeSeries s) {
  if (columns_.empty()) {
    first_year_ = s.start_year();
    length_ = s.size();
  } else if (s.start_year() != first_year_ || s.size() != length_) {
    throw AlignmentError("column '" + s.name() + "' does not cover the dataset years");
  }
  if (has(s.name())) throw AlignmentError("duplicate column '" + s.name() + "'");
  if (target_.empty()) target_ = s.name();
  columns_.push_back(std::move(s));
}

AlignedDataset align(std::span<const TimeSeries> series) {
  if (series.empty()) throw AlignmentError("nothing to align");
  int first = series.front().start_year();
  int last = series.front().end_year();
  for (const auto& s : series) {
    first = std::max(first, s.start_year());
    last = std::min(last, s.end_year());
  }
  if (first > last) {
    // Name the series whose range falls outside the others.
    for (const auto& s : series) {
      if (s.end_year() < first || s.start_year() > last) {
        throw AlignmentError("series '" + s.name() + "' (" + std::to_string(s.start_year()) +
                             "-" + std::to_string(s.end_year()) +
                             ") does not overlap the other series");
      }
    }
    throw AlignmentError("series have no common years");
  }
  std::vector<TimeSeries> cols;
  cols.reserve(series.size());
  for (const auto& s : series) cols.push_back(s.window(first, last));
  return AlignedDataset(first, std::move(cols));
}

}  // namespace cointsearch
