#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cointsearch/cointegration.hpp"
#include "cointsearch/model.hpp"
#include "cointsearch/series.hpp"

namespace cointsearch {

/// Name of the predictor that replaces a merge group: members joined by '+', e.g. "x2+x3".
std::string merged_name(const std::vector<std::string>& group);

/// All candidate specifications of a search, in a fixed order (subset, deterministic case, phi).
///
/// Levels: every non-empty subset x {none, constant, constant_and_trend} x {phi = 0, phi free},
/// 6(2^k - 1) specs. Differences: every subset x {none, constant} without the empty
/// no-constant model, 2^(k+1) - 1 specs. A merge group replaces its members by their sum
/// and only specs containing every merged predictor are returned.
/// `deterministic_options` restricts the deterministic cases (empty = all allowed).
std::vector<CandidateSpec> enumerate_candidates(
    const std::vector<std::string>& predictors, ModelForm mode,
    const std::vector<std::vector<std::string>>& merge_groups = {},
    const std::vector<DeterministicCase>& deterministic_options = {});

struct InformationScores {
  double aic = 0.0;
  double bic = 0.0;
  double er_aic = 1.0;
  double er_bic = 1.0;
  int aic_rank = 0;  ///< 1-based position when ordered by AIC
  int bic_rank = 0;
};

/// AIC = ln SSR + 2N/n and BIC = ln SSR + N ln(n)/n.
std::pair<double, double> score(double ssr, int n_params, int n_obs);

/// exp(-(s_i - min s)/2) for each score.
std::vector<double> evidence_ratios(const std::vector<double>& scores);

struct SearchConfig {
  std::string target = "y";
  std::vector<std::string> predictors;
  ModelForm mode = ModelForm::levels;
  std::vector<std::vector<std::string>> merge_groups;
  std::vector<DeterministicCase> deterministic_options;  ///< empty = all cases of the mode
  ScreenOptions screen;
  std::uint64_t seed = 0;
  int threads = 0;  ///< 0 = COINTSEARCH_THREADS or hardware concurrency

  void validate() const;
};

struct RankedModel {
  CandidateSpec spec;
  std::variant<ECEstimate, ShortRunEstimate> estimate;
  InformationScores scores;
  double bg_p_value = 1.0;
  std::optional<double> eg_statistic;
  std::optional<double> eg_critical_value;

  double ssr() const;
  int n_obs() const;
  int n_params() const;
};

struct DiscardEntry {
  std::string spec_id;
  DiscardReason reason = DiscardReason::error;
  std::string detail;
};

struct SearchReport {
  SearchConfig config;
  int n_candidates = 0;
  int first_year = 0;
  int last_year = 0;
  std::vector<RankedModel> ranked;  ///< ordered by BIC, ties by fewer parameters then id
  std::vector<DiscardEntry> discards;  ///< enumeration order
};

/// Builds the dataset a search runs on: the target, the predictors and merged columns.
AlignedDataset prepare_search_data(const AlignedDataset& data, const SearchConfig& config);

/// Runs check_candidate over every spec (the EG screen is computed once per phi twin pair).
/// Output order matches the input order regardless of the thread count.
std::vector<CandidateOutcome> evaluate_candidates(const std::vector<CandidateSpec>& specs,
                                                  const AlignedDataset& data,
                                                  const ScreenOptions& options, int threads = 1);

/// Scores the survivors and orders them; independent of the order of `outcomes`.
std::vector<RankedModel> rank_survivors(const std::vector<CandidateOutcome>& outcomes);

SearchReport run_search(const AlignedDataset& data, const SearchConfig& config);

}  // namespace cointsearch
