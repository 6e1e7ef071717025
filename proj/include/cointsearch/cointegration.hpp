#pragma once

#include <optional>
#include <string>

#include "cointsearch/model.hpp"
#include "cointsearch/regress.hpp"
#include "cointsearch/series.hpp"

namespace cointsearch {

/// Outcome of the first Engle-Granger step for one (subset, deterministic) pair.
struct EgScreenResult {
  std::optional<OlsEstimate> levels_fit;  ///< absent when the levels regression failed
  double df_statistic = 0.0;
  double critical_value = 0.0;  ///< asymptotic residual-test value at `level`
  double level = 0.05;
  int n_regressors = 0;
  bool cointegrated = false;
  std::string diagnostic;  ///< non-empty when estimation or the DF test failed
};

struct BgLmResult {
  double lm_statistic = 0.0;
  double p_value = 1.0;
  int lags = 2;
};

/// Which regressors enter the Breusch-Godfrey auxiliary regression of a free-phi model.
enum class BgDesign {
  jacobian,    ///< the EC model linearised at the optimum
  regressors,  ///< the raw levels regressors only
};

struct ScreenOptions {
  double eg_level = 0.05;
  double bglm_level = 0.20;
  int bglm_lags = 2;
  int eg_augmentation_lags = 0;
  BgDesign bg_design = BgDesign::jacobian;
  NlsOptions nls;

  void validate() const;
};

/// OLS of the levels regression over the full sample and a plain DF test on its residuals.
///
/// Estimation problems (collinear predictors, all-zero residuals) do not throw: the result is
/// marked not cointegrated and the reason is kept in `diagnostic`.
EgScreenResult eg_step1(const CandidateSpec& spec, const AlignedDataset& data,
                        double level = 0.05, int augmentation_lags = 0);

/// Breusch-Godfrey LM test: residuals on the design plus `lags` lagged residuals (pre-sample
/// residuals set to zero); LM = n R^2, chi-square with `lags` degrees of freedom.
BgLmResult bg_lm_test(const Eigen::VectorXd& residuals, const Eigen::MatrixXd& design, int lags);

enum class DiscardReason { eg, bglm, error };
std::string_view reason_code(DiscardReason r);

struct CandidateOutcome {
  CandidateSpec spec;
  bool survived = false;
  std::optional<DiscardReason> reason;
  std::string detail;
  std::optional<EgScreenResult> eg;
  std::optional<ECEstimate> estimate;       ///< levels form
  std::optional<ShortRunEstimate> short_run;  ///< differences form
  std::optional<BgLmResult> bg;
};

/// Full per-candidate check.
///
/// Levels: EG screen (or the shared result of the candidate's phi twin), EC estimation,
/// BG LM filter. Differences: OLS and the BG LM filter. Failures are recorded as
/// discarded(error); nothing is thrown for numerical problems.
CandidateOutcome check_candidate(const CandidateSpec& spec, const AlignedDataset& data,
                                 const ScreenOptions& options,
                                 const EgScreenResult* shared_eg = nullptr);

}  // namespace cointsearch
