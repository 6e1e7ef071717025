#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "cointsearch/model.hpp"
#include "cointsearch/series.hpp"

namespace cointsearch {

struct UnitRootResult {
  double statistic = 0.0;  ///< t-statistic of the lagged level
  double p_value = 1.0;
  int lags_used = 0;
  int max_lag = 0;
  DeterministicCase deterministic = DeterministicCase::constant;
  int n_obs = 0;
};

/// Default maximum ADF lag, floor(12 (n/100)^(1/4)).
int schwert_max_lag(std::size_t n);

/// Augmented Dickey-Fuller test with the lag order chosen by BIC.
///
/// All orders 0..max_lag are compared on the common sample that the largest order allows;
/// the chosen order is then refitted on its own maximal sample. The p-value uses the
/// finite-sample response surface at the refitted sample size.
UnitRootResult adf_test(const TimeSeries& s, DeterministicCase c,
                        std::optional<int> max_lag = std::nullopt);

/// Dickey-Fuller t-statistic of residuals: de_t = rho e_{t-1} [+ sum gamma_j de_{t-j}] + u_t,
/// with no deterministic terms.
struct ResidualDf {
  double statistic = 0.0;
  int n_obs = 0;
};
ResidualDf residual_df_statistic(const Eigen::VectorXd& residuals, int augmentation_lags = 0);

/// Significance bracket of a KPSS statistic, [p_lower, p_upper].
struct PBracket {
  double lower = 0.0;
  double upper = 1.0;
  std::string label() const;
};

struct KpssResult {
  double statistic = 0.0;
  PBracket p_bracket;
  int bandwidth = 0;
  DeterministicCase deterministic = DeterministicCase::constant;

  /// Stationarity rejected at `level` (one of 0.10, 0.05, 0.025, 0.01).
  bool rejects(double level) const;
};

/// Asymptotic KPSS critical value; case constant or constant_and_trend.
double kpss_critical_value(DeterministicCase c, double level);

/// Newey-West (1994) automatic bandwidth for the Bartlett kernel.
int nw_bandwidth(const Eigen::VectorXd& residuals);

/// KPSS stationarity test with the Bartlett kernel and the automatic bandwidth.
KpssResult kpss_test(const TimeSeries& s, DeterministicCase c);

}  // namespace cointsearch
