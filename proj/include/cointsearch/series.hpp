#pragma once

#include <span>
#include <string>
#include <vector>

namespace cointsearch {

/// An annual series: one finite value per consecutive year starting at start_year.
class TimeSeries {
 public:
  TimeSeries(std::string name, int start_year, std::vector<double> values);

  const std::string& name() const { return name_; }
  int start_year() const { return start_year_; }
  int end_year() const { return start_year_ + static_cast<int>(values_.size()) - 1; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Value at a calendar year; throws std::out_of_range outside the covered years.
  double at_year(int year) const;

  /// Sub-series over [first, last] (inclusive, clipped to the covered years).
  TimeSeries window(int first, int last) const;

  bool operator==(const TimeSeries&) const = default;

 private:
  std::string name_;
  int start_year_;
  std::vector<double> values_;
};

/// d-fold first difference. Result starts d years later.
TimeSeries diff(const TimeSeries& s, int d = 1);

/// Backshift by k years: the result's value at year t is s at year t-k.
TimeSeries lag(const TimeSeries& s, int k = 1);

/// Equal-length columns over a shared year range. One column is the target (y);
/// by default the first.
class AlignedDataset {
 public:
  AlignedDataset() = default;
  AlignedDataset(int first_year, std::vector<TimeSeries> columns, std::string target = {});

  int first_year() const { return first_year_; }
  int last_year() const { return first_year_ + static_cast<int>(length_) - 1; }
  std::size_t length() const { return length_; }
  const std::vector<TimeSeries>& columns() const { return columns_; }

  bool has(const std::string& name) const;
  const TimeSeries& column(const std::string& name) const;
  std::vector<std::string> names() const;

  const std::string& target_name() const { return target_; }
  const TimeSeries& target() const { return column(target_); }
  void set_target(const std::string& name);

  /// Restriction to the years [first, last].
  AlignedDataset window(int first, int last) const;

  /// Appends a column covering exactly the dataset's year range.
  void add_column(TimeSeries s);

 private:
  int first_year_ = 0;
  std::size_t length_ = 0;
  std::vector<TimeSeries> columns_;
  std::string target_;
};

/// Truncates every series to the common year range; column order is preserved.
AlignedDataset align(std::span<const TimeSeries> series);

}  // namespace cointsearch
