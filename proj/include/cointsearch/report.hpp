#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cointsearch/forecast.hpp"
#include "cointsearch/generator.hpp"
#include "cointsearch/johansen.hpp"
#include "cointsearch/unit_root.hpp"

namespace cointsearch {

/// JSON report schema version. Bumped on any incompatible change of field names or meaning.
inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

/// One variable of the unit-root overview: ADF with no deterministics, a constant and a
/// constant plus trend, KPSS with a constant and a constant plus trend.
struct UnitRootRow {
  std::string variable;
  std::array<std::optional<UnitRootResult>, 3> adf;
  std::array<std::string, 3> adf_error;
  std::array<std::optional<KpssResult>, 2> kpss;
  std::array<std::string, 2> kpss_error;
};

/// Runs the tests on each variable, differenced `difference_order` times. Per-test failures
/// are recorded in the row instead of thrown.
std::vector<UnitRootRow> unit_root_table(const AlignedDataset& data,
                                         const std::vector<std::string>& variables,
                                         std::optional<int> max_lag = std::nullopt,
                                         int difference_order = 0);

struct ConsistencyReport {
  std::string model_id;
  ConsistencyResult result;
};

// Serialisers. JSON output is deterministic for identical input; non-finite numbers are null.
std::string unit_root_json(const std::vector<UnitRootRow>& rows, int difference_order);
std::string unit_root_text(const std::vector<UnitRootRow>& rows, int difference_order);

std::string search_json(const SearchReport& report);
std::string search_text(const SearchReport& report);

std::string johansen_json(const VecResult& vec, const std::optional<ConsistencyReport>& check);
std::string johansen_text(const VecResult& vec, const std::optional<ConsistencyReport>& check);

std::string forecast_json(const std::string& model_id, const ForecastBands& bands,
                          const std::vector<double>& realization);
std::string forecast_csv(const ForecastBands& bands, const std::vector<double>& realization);

std::string comparison_json(const ComparisonReport& report);
/// One block per split: year, realization, then mean/lower/upper per model.
std::string comparison_csv(const ComparisonReport& report);
std::string comparison_text(const ComparisonReport& report);

}  // namespace cointsearch
