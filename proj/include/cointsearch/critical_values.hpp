#pragma once

#include <optional>

#include "cointsearch/model.hpp"

namespace cointsearch {

/// Largest number of I(1) regressors supported by the residual-test tables.
inline constexpr int kMaxEgRegressors = 6;

/// Dickey-Fuller critical value for a unit-root test (n_regressors = 0) or an Engle-Granger
/// residual test after regressing on n_regressors I(1) series.
///
/// `level` is one of 0.01, 0.05, 0.10. With `sample_size` the finite-sample response surface
/// is used, otherwise the asymptotic value.
double df_critical_value(int n_regressors, DeterministicCase c, double level,
                         std::optional<int> sample_size = std::nullopt);

/// Residual-based cointegration critical value; n_regressors in [1, 6].
double eg_critical_value(int n_regressors, DeterministicCase c, double level,
                         std::optional<int> sample_size = std::nullopt);

/// Probability of a Dickey-Fuller statistic at least as negative as `stat` under the
/// unit-root null. Asymptotic without `sample_size`; otherwise shifted by the
/// finite-sample correction of the critical-value surface (sample_size >= 20).
double df_pvalue(double stat, DeterministicCase c, std::optional<int> sample_size,
                 int n_regressors);

}  // namespace cointsearch
