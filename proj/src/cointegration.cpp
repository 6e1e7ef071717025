#include "cointsearch/cointegration.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <limits>

#include "cointsearch/critical_values.hpp"
#include "cointsearch/errors.hpp"
#include "cointsearch/unit_root.hpp"

namespace cointsearch {

void ScreenOptions::validate() const {
  if (!(eg_level > 0.0 && eg_level < 1.0)) throw ConfigError("EG level must lie in (0, 1)");
  if (!(bglm_level > 0.0 && bglm_level < 1.0)) throw ConfigError("BG LM level must lie in (0, 1)");
  if (bglm_lags < 1) throw ConfigError("BG LM lag count must be positive");
  if (eg_augmentation_lags < 0) throw ConfigError("EG augmentation lags must be non-negative");
  nls.validate();
}

std::string_view reason_code(DiscardReason r) {
  switch (r) {
    case DiscardReason::eg: return "eg";
    case DiscardReason::bglm: return "bglm";
    case DiscardReason::error: return "error";
  }
  return "error";
}

EgScreenResult eg_step1(const CandidateSpec& spec, const AlignedDataset& data, double level,
                        int augmentation_lags) {
  if (spec.form != ModelForm::levels || spec.subset.empty()) {
    throw ConfigError("Engle-Granger screening needs a levels-form candidate with predictors");
  }
  const std::size_t len = data.length();
  const int k = static_cast<int>(spec.subset.size());
  if (static_cast<int>(len) < k + deterministic_count(spec.deterministic) + 10) {
    throw InsufficientDataError("sample of " + std::to_string(len) +
                                " years too short for the Engle-Granger screen");
  }
  EgScreenResult out;
  out.level = level;
  out.n_regressors = k;
  out.critical_value = eg_critical_value(k, spec.deterministic, level);
  try {
    const Eigen::VectorXd y = column_segment(data.target(), 0, len);
    OlsEstimate fit = ols_fit(levels_design(spec, data, 0, len), y);
    // Residuals at rounding level mean the target is an exact combination of the regressors.
    const double scale = std::max(y.norm(), std::numeric_limits<double>::min());
    if (fit.residuals.norm() <= 1e-10 * scale) {
      out.levels_fit = std::move(fit);
      throw DegenerateError("levels regression fits exactly; residuals are zero");
    }
    out.df_statistic = residual_df_statistic(fit.residuals, augmentation_lags).statistic;
    out.levels_fit = std::move(fit);
    out.cointegrated = out.df_statistic < out.critical_value;
  } catch (const NumericalError& e) {
    out.cointegrated = false;
    out.diagnostic = e.what();
  }
  return out;
}

BgLmResult bg_lm_test(const Eigen::VectorXd& residuals, const Eigen::MatrixXd& design, int lags) {
  const Eigen::Index n = residuals.size();
  if (design.rows() != n) throw std::invalid_argument("residuals and design lengths differ");
  if (lags < 1) throw ConfigError("BG LM lag count must be positive");
  if (2 * lags >= n) throw InsufficientDataError("too few residuals for the BG LM lag count");
  const double total = residuals.squaredNorm();
  if (!(total > 0.0)) throw DegenerateError("residuals are all zero");

  Eigen::MatrixXd aux(n, design.cols() + lags);
  aux.leftCols(design.cols()) = design;
  for (int j = 1; j <= lags; ++j) {
    for (Eigen::Index t = 0; t < n; ++t) aux(t, design.cols() + j - 1) = t >= j ? residuals(t - j) : 0.0;
  }
  OlsEstimate fit = ols_fit(aux, residuals);
  // Uncentred R^2: the residuals need not have zero mean when the model has no constant.
  const double r2 = std::clamp(1.0 - fit.ssr / total, 0.0, 1.0);
  BgLmResult out;
  out.lags = lags;
  out.lm_statistic = static_cast<double>(n) * r2;
  out.p_value = boost::math::gamma_q(0.5 * lags, 0.5 * out.lm_statistic);
  return out;
}

namespace {

Eigen::MatrixXd bg_design_for(const CandidateSpec& spec, const AlignedDataset& data,
                              const ECEstimate& est, BgDesign mode) {
  if (spec.phi_free && mode == BgDesign::jacobian) {
    EcObjective obj(spec, data);
    return obj.jacobian(est.params());
  }
  return levels_design(spec, data, 1, data.length());
}

CandidateOutcome discard(CandidateOutcome out, DiscardReason reason, std::string detail) {
  out.survived = false;
  out.reason = reason;
  out.detail = std::move(detail);
  return out;
}

CandidateOutcome check_levels(const CandidateSpec& spec, const AlignedDataset& data,
                              const ScreenOptions& options, const EgScreenResult* shared_eg) {
  CandidateOutcome out;
  out.spec = spec;
  out.eg = shared_eg ? *shared_eg
                     : eg_step1(spec, data, options.eg_level, options.eg_augmentation_lags);
  if (!out.eg->diagnostic.empty()) {
    std::string why = out.eg->diagnostic;
    return discard(std::move(out), DiscardReason::error, std::move(why));
  }
  if (!out.eg->cointegrated) return discard(std::move(out), DiscardReason::eg, "residual unit root not rejected");

  ECEstimate est = nls_ec_fit(spec, data, options.nls);
  if (!est.converged) {
    out.estimate = std::move(est);
    return discard(std::move(out), DiscardReason::error, "NLS did not converge");
  }
  if (est.phi_nonstationary()) {
    out.estimate = std::move(est);
    return discard(std::move(out), DiscardReason::error, "estimated |phi| >= 1");
  }
  out.bg = bg_lm_test(est.residuals, bg_design_for(spec, data, est, options.bg_design),
                      options.bglm_lags);
  out.estimate = std::move(est);
  if (out.bg->p_value <= options.bglm_level) {
    return discard(std::move(out), DiscardReason::bglm, "serial correlation in residuals");
  }
  out.survived = true;
  return out;
}

CandidateOutcome check_differences(const CandidateSpec& spec, const AlignedDataset& data,
                                   const ScreenOptions& options) {
  CandidateOutcome out;
  out.spec = spec;
  ShortRunEstimate est = short_run_fit(spec, data);
  out.bg = bg_lm_test(est.ols.residuals, differences_design(spec, data, 1, data.length()),
                      options.bglm_lags);
  out.short_run = std::move(est);
  if (out.bg->p_value <= options.bglm_level) {
    return discard(std::move(out), DiscardReason::bglm, "serial correlation in residuals");
  }
  out.survived = true;
  return out;
}

}  // namespace

CandidateOutcome check_candidate(const CandidateSpec& spec, const AlignedDataset& data,
                                 const ScreenOptions& options, const EgScreenResult* shared_eg) {
  try {
    spec.validate();
    return spec.form == ModelForm::levels ? check_levels(spec, data, options, shared_eg)
                                          : check_differences(spec, data, options);
  } catch (const Error& e) {
    CandidateOutcome out;
    out.spec = spec;
    return discard(std::move(out), DiscardReason::error, e.what());
  }
}

}  // namespace cointsearch
