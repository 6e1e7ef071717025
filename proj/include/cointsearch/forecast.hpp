#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cointsearch/model.hpp"
#include "cointsearch/regress.hpp"
#include "cointsearch/series.hpp"

namespace cointsearch {

enum class BandMethod {
  two_sd,    ///< mean +- 2 pointwise standard deviations
  quantile,  ///< pointwise 2.275% and 97.725% quantiles (the +-2 sd coverage of a normal)
};

struct ForecastConfig {
  int reps = 10000;
  std::uint64_t seed = 0;
  int horizon_start = 0;
  int horizon_end = 0;
  bool include_coefficient_uncertainty = true;
  BandMethod band = BandMethod::two_sd;
  int threads = 0;  ///< 0 = COINTSEARCH_THREADS or hardware concurrency

  void validate() const;
};

struct ForecastBands {
  std::vector<int> years;
  std::vector<double> mean;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> sd;
  int reps = 0;
  std::uint64_t seed = 0;
  /// The parameter covariance was not positive definite; draws used its diagonal.
  bool covariance_fallback = false;
};

/// Monte Carlo forecast of an error-correction model over [horizon_start, horizon_end],
/// conditioning on the observed predictors.
///
/// The recursion starts from the last training observation of y:
///   u_t = phi u_{t-1} + eps_t,  y_t = c + delta t + sum beta_i x_it + u_t.
/// Each repetition draws the parameters from N(estimate, covariance) when enabled
/// (redrawing any draw with |phi| >= 1) and Gaussian innovations with variance SSR/(n - N).
ForecastBands mc_forecast(const ECEstimate& model, const AlignedDataset& data,
                          const ForecastConfig& config);

/// Same for a short-run model, cumulating dy_t = [c +] sum beta_i dx_it + eps_t from the last
/// training observation of y.
ForecastBands mc_forecast(const ShortRunEstimate& model, const AlignedDataset& data,
                          const ForecastConfig& config);

/// Training runs from the first data year to train_end; the forecast covers
/// train_end + 1 .. horizon_end.
struct ForecastSplit {
  int train_end = 0;
  int horizon_end = 0;
};

struct ComparisonRow {
  std::string model_id;
  ForecastSplit split;
  bool available = false;
  std::string error;  ///< why the model is unavailable for this split
  ForecastBands bands;
  std::vector<double> realization;
  double rmse = 0.0;
  double mean_band_width = 0.0;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;  ///< split-major, models in input order
};

/// Re-estimates every model on each training window and forecasts its horizon. All models of
/// a split share the configured seed. Estimation failures (errors, non-convergence,
/// |phi| >= 1) mark the row unavailable.
ComparisonReport forecast_compare(const std::vector<CandidateSpec>& models,
                                  const AlignedDataset& data,
                                  const std::vector<ForecastSplit>& splits,
                                  const ForecastConfig& config, const NlsOptions& nls = {});

}  // namespace cointsearch
