#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "cointsearch/model.hpp"
#include "cointsearch/series.hpp"

namespace cointsearch {

struct OlsEstimate {
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd covariance;  ///< s^2 (X'X)^-1, s^2 = SSR / (n - N)
  Eigen::VectorXd t_ratios;
  Eigen::VectorXd residuals;
  double ssr = 0.0;
  int n_obs = 0;
  int n_params = 0;

  double sigma2() const { return n_obs > n_params ? ssr / (n_obs - n_params) : 0.0; }
};

/// Condition number (after scaling columns to unit norm) above which a design is singular.
inline constexpr double kMaxConditionNumber = 1e12;

/// Least squares of target on the design columns.
///
/// Columns are equilibrated before the SVD so regressors of very different magnitude
/// do not trip the singularity check. Throws SingularDesignError on (near) collinearity
/// and InsufficientDataError when rows <= columns.
OlsEstimate ols_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& target);

/// coefficient / standard error, without NaN: a zero standard error gives +-inf (or 0 for a
/// zero coefficient).
double guarded_t_ratio(double coefficient, double variance);

struct NlsOptions {
  double tol = 1e-4;        ///< maximum relative coefficient change at convergence
  int max_iter = 500;
  double initial_lambda = 1e-3;

  void validate() const;
};

/// Fitted error-correction model of a levels-form candidate.
///
/// Parameters are ordered betas (subset order), constant, trend, phi; absent terms are skipped.
/// The trend regressor is t = year - trend_origin + 1.
struct ECEstimate {
  std::string spec_id;
  std::vector<std::string> predictors;
  Eigen::VectorXd betas;
  std::optional<double> constant;
  std::optional<double> trend;
  std::optional<double> phi;
  std::vector<std::string> param_names;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd t_ratios;
  Eigen::VectorXd residuals;  ///< epsilon_t over first_year .. first_year + n_obs - 1
  int first_year = 0;
  int trend_origin = 0;
  double ssr = 0.0;
  int n_obs = 0;
  int n_params = 0;
  bool converged = true;
  int iterations = 0;

  /// Full parameter vector in param_names order.
  Eigen::VectorXd params() const;
  double sigma2() const { return n_obs > n_params ? ssr / (n_obs - n_params) : 0.0; }
  /// |phi| >= 1: the fitted noise is not stationary.
  bool phi_nonstationary() const { return phi && std::abs(*phi) >= 1.0; }
  /// Standard error of a named parameter; nullopt when the parameter is not estimated.
  std::optional<double> std_error(const std::string& name) const;
};

/// Levels regressors [x_i for i in subset, 1, t] over dataset rows [begin, end).
Eigen::MatrixXd levels_design(const CandidateSpec& spec, const AlignedDataset& data,
                              std::size_t begin, std::size_t end);

/// Difference regressors [dx_i for i in subset, 1] over rows [begin, end), begin >= 1.
Eigen::MatrixXd differences_design(const CandidateSpec& spec, const AlignedDataset& data,
                                   std::size_t begin, std::size_t end);

Eigen::VectorXd column_segment(const TimeSeries& s, std::size_t begin, std::size_t end);

std::vector<std::string> parameter_names(const CandidateSpec& spec);

/// Sum-of-squares objective of the error-correction regression of a levels candidate.
///
/// With u_t = y_t - c - delta*t - sum beta_i x_it the residual is eps_t = u_t - phi*u_{t-1},
/// which is the error-correction form
///   dy_t = sum beta_i dx_it + delta*phi + (phi - 1)[y_{t-1} - c - delta*t - sum beta_i x_i,t-1] + eps_t.
/// The sample runs over rows 1 .. T-1 (one observation is lost to the lag, also for phi = 0).
class EcObjective {
 public:
  EcObjective(const CandidateSpec& spec, const AlignedDataset& data);

  int n_obs() const { return static_cast<int>(y_.size()) - 1; }
  int n_params() const { return n_params_; }
  bool has_phi() const { return phi_free_; }

  Eigen::VectorXd residuals(const Eigen::VectorXd& theta) const;
  /// d eps_t / d theta, n_obs x n_params.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& theta) const;
  double ssr(const Eigen::VectorXd& theta) const;
  /// Analytic gradient of the SSR.
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const;

 private:
  Eigen::VectorXd levels_residuals(const Eigen::VectorXd& theta) const;

  Eigen::VectorXd y_;
  Eigen::MatrixXd x_;  // levels regressors [x_S, 1, t], all rows
  int n_linear_ = 0;
  int n_params_ = 0;
  bool phi_free_ = false;
};

/// OLS fit of a differences-form candidate: dy_t = [c +] sum beta_i dx_it + eps_t over rows 1 .. T-1.
struct ShortRunEstimate {
  std::string spec_id;
  std::vector<std::string> predictors;
  std::vector<std::string> param_names;  ///< predictors, then "c" when present
  OlsEstimate ols;
  int first_year = 0;  ///< year of the first residual

  Eigen::VectorXd betas() const { return ols.coefficients.head(static_cast<Eigen::Index>(predictors.size())); }
  std::optional<double> constant() const;
};

ShortRunEstimate short_run_fit(const CandidateSpec& spec, const AlignedDataset& data);

/// Estimates a levels-form candidate in error-correction form.
///
/// phi = 0 candidates reduce to OLS of the levels regression over rows 1 .. T-1. Free-phi
/// candidates are fitted by Marquardt's method warm-started from the full-sample levels OLS
/// with phi from the lag-1 autocorrelation of its residuals. Non-convergence is reported via
/// `converged`, not thrown.
ECEstimate nls_ec_fit(const CandidateSpec& spec, const AlignedDataset& data,
                      const NlsOptions& options = {});

}  // namespace cointsearch
