#include "cointsearch/regress.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cointsearch/errors.hpp"

namespace cointsearch {

namespace {

struct ScaledSvd {
  Eigen::VectorXd scale;  // column norms
  Eigen::JacobiSVD<Eigen::MatrixXd> svd;
};

ScaledSvd scaled_svd(const Eigen::MatrixXd& design) {
  Eigen::VectorXd scale = design.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < scale.size(); ++j) {
    if (!(scale(j) > 0.0) || !std::isfinite(scale(j))) {
      throw SingularDesignError("design column " + std::to_string(j) + " is zero or not finite");
    }
  }
  Eigen::MatrixXd equilibrated = design * scale.cwiseInverse().asDiagonal();
  ScaledSvd out{scale, Eigen::JacobiSVD<Eigen::MatrixXd>(
                           equilibrated, Eigen::ComputeThinU | Eigen::ComputeThinV)};
  const auto& sv = out.svd.singularValues();
  if (sv.size() > 0 && !(sv(sv.size() - 1) * kMaxConditionNumber > sv(0))) {
    throw SingularDesignError("design is rank deficient (condition number above 1e12)");
  }
  return out;
}

// (X'X)^-1 from the equilibrated SVD.
Eigen::MatrixXd inverse_gram(const ScaledSvd& s) {
  const Eigen::MatrixXd& v = s.svd.matrixV();
  Eigen::VectorXd inv_sv2 = s.svd.singularValues().array().square().inverse();
  Eigen::MatrixXd inner = v * inv_sv2.asDiagonal() * v.transpose();
  Eigen::MatrixXd out = s.scale.cwiseInverse().asDiagonal() * inner * s.scale.cwiseInverse().asDiagonal();
  return 0.5 * (out + out.transpose());
}

double lag1_autocorrelation(const Eigen::VectorXd& e) {
  double num = 0.0;
  double den = e.squaredNorm();
  for (Eigen::Index t = 1; t < e.size(); ++t) num += e(t) * e(t - 1);
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace

double guarded_t_ratio(double coefficient, double variance) {
  double se = std::sqrt(std::max(variance, 0.0));
  double t = coefficient / se;
  if (std::isfinite(t)) return t;
  if (coefficient == 0.0) return 0.0;
  return std::copysign(std::numeric_limits<double>::infinity(), coefficient);
}

OlsEstimate ols_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& target) {
  const auto n = design.rows();
  const auto p = design.cols();
  if (target.size() != n) throw std::invalid_argument("design and target lengths differ");
  if (n <= p) {
    throw InsufficientDataError("regression has " + std::to_string(n) + " observations for " +
                                std::to_string(p) + " parameters");
  }
  OlsEstimate est;
  est.n_obs = static_cast<int>(n);
  est.n_params = static_cast<int>(p);
  if (p == 0) {
    est.residuals = target;
    est.ssr = target.squaredNorm();
    return est;
  }
  ScaledSvd s = scaled_svd(design);
  Eigen::VectorXd scaled_coef = s.svd.solve(target);
  est.coefficients = scaled_coef.cwiseQuotient(s.scale);
  est.residuals = target - design * est.coefficients;
  est.ssr = est.residuals.squaredNorm();
  est.covariance = est.sigma2() * inverse_gram(s);
  est.t_ratios.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    est.t_ratios(j) = guarded_t_ratio(est.coefficients(j), est.covariance(j, j));
  }
  return est;
}

void NlsOptions::validate() const {
  if (!(tol > 0.0)) throw ConfigError("NLS tolerance must be positive");
  if (max_iter < 1) throw ConfigError("NLS iteration cap must be at least 1");
  if (!(initial_lambda > 0.0)) throw ConfigError("initial Marquardt lambda must be positive");
}

Eigen::VectorXd ECEstimate::params() const {
  Eigen::VectorXd out(n_params);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < betas.size(); ++i) out(k++) = betas(i);
  if (constant) out(k++) = *constant;
  if (trend) out(k++) = *trend;
  if (phi) out(k++) = *phi;
  return out;
}

std::optional<double> ECEstimate::std_error(const std::string& name) const {
  for (std::size_t j = 0; j < param_names.size(); ++j) {
    if (param_names[j] == name) {
      return std::sqrt(std::max(covariance(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)), 0.0));
    }
  }
  return std::nullopt;
}

Eigen::VectorXd column_segment(const TimeSeries& s, std::size_t begin, std::size_t end) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(end - begin));
  for (std::size_t i = begin; i < end; ++i) out(static_cast<Eigen::Index>(i - begin)) = s[i];
  return out;
}

Eigen::MatrixXd levels_design(const CandidateSpec& spec, const AlignedDataset& data,
                              std::size_t begin, std::size_t end) {
  const auto rows = static_cast<Eigen::Index>(end - begin);
  const int det = deterministic_count(spec.deterministic);
  Eigen::MatrixXd x(rows, static_cast<Eigen::Index>(spec.subset.size()) + det);
  Eigen::Index j = 0;
  for (const auto& name : spec.subset) x.col(j++) = column_segment(data.column(name), begin, end);
  if (det >= 1) x.col(j++).setOnes();
  if (det == 2) {
    for (Eigen::Index r = 0; r < rows; ++r) x(r, j) = static_cast<double>(begin + r + 1);
  }
  return x;
}

Eigen::MatrixXd differences_design(const CandidateSpec& spec, const AlignedDataset& data,
                                   std::size_t begin, std::size_t end) {
  if (begin < 1) throw std::invalid_argument("differences need a previous observation");
  const auto rows = static_cast<Eigen::Index>(end - begin);
  const bool has_constant = spec.deterministic != DeterministicCase::none;
  Eigen::MatrixXd x(rows, static_cast<Eigen::Index>(spec.subset.size()) + (has_constant ? 1 : 0));
  Eigen::Index j = 0;
  for (const auto& name : spec.subset) {
    const auto& s = data.column(name);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto t = begin + static_cast<std::size_t>(r);
      x(r, j) = s[t] - s[t - 1];
    }
    ++j;
  }
  if (has_constant) x.col(j).setOnes();
  return x;
}

std::vector<std::string> parameter_names(const CandidateSpec& spec) {
  std::vector<std::string> names = spec.subset;
  if (spec.deterministic != DeterministicCase::none) names.emplace_back("c");
  if (spec.deterministic == DeterministicCase::constant_and_trend) names.emplace_back("trend");
  if (spec.phi_free) names.emplace_back("phi");
  return names;
}

EcObjective::EcObjective(const CandidateSpec& spec, const AlignedDataset& data) {
  if (spec.form != ModelForm::levels) {
    throw ConfigError("error-correction objective needs a levels-form candidate");
  }
  const std::size_t len = data.length();
  if (len < 3) throw InsufficientDataError("error-correction model needs at least 3 observations");
  y_ = column_segment(data.target(), 0, len);
  x_ = levels_design(spec, data, 0, len);
  n_linear_ = static_cast<int>(x_.cols());
  phi_free_ = spec.phi_free;
  n_params_ = n_linear_ + (phi_free_ ? 1 : 0);
}

Eigen::VectorXd EcObjective::levels_residuals(const Eigen::VectorXd& theta) const {
  return y_ - x_ * theta.head(n_linear_);
}

Eigen::VectorXd EcObjective::residuals(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd u = levels_residuals(theta);
  const Eigen::Index n = u.size() - 1;
  if (!phi_free_) return u.tail(n);
  const double phi = theta(n_linear_);
  return u.tail(n) - phi * u.head(n);
}

Eigen::MatrixXd EcObjective::jacobian(const Eigen::VectorXd& theta) const {
  const Eigen::Index n = y_.size() - 1;
  Eigen::MatrixXd j(n, n_params_);
  if (!phi_free_) {
    j = -x_.bottomRows(n);
    return j;
  }
  const double phi = theta(n_linear_);
  j.leftCols(n_linear_) = -(x_.bottomRows(n) - phi * x_.topRows(n));
  j.col(n_linear_) = -levels_residuals(theta).head(n);
  return j;
}

double EcObjective::ssr(const Eigen::VectorXd& theta) const {
  return residuals(theta).squaredNorm();
}

Eigen::VectorXd EcObjective::gradient(const Eigen::VectorXd& theta) const {
  return 2.0 * jacobian(theta).transpose() * residuals(theta);
}

namespace {

struct LmResult {
  Eigen::VectorXd theta;
  double ssr = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Marquardt iteration with column-equilibrated steps:
// minimise |J S^-1 z + r|^2 + lambda |z|^2 and set delta = S^-1 z.
LmResult marquardt(const EcObjective& obj, Eigen::VectorXd theta, const NlsOptions& opt) {
  LmResult out;
  Eigen::VectorXd r = obj.residuals(theta);
  double ssr = r.squaredNorm();
  double lambda = opt.initial_lambda;
  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    out.iterations = iter;
    Eigen::MatrixXd j = obj.jacobian(theta);
    Eigen::VectorXd scale = j.colwise().norm().transpose();
    for (Eigen::Index k = 0; k < scale.size(); ++k) {
      if (!(scale(k) > 0.0)) scale(k) = 1.0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(j * scale.cwiseInverse().asDiagonal(),
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    Eigen::VectorXd utr = svd.matrixU().transpose() * r;

    bool accepted = false;
    Eigen::VectorXd delta;
    while (lambda <= 1e16) {
      Eigen::VectorXd filt = (sv.array() / (sv.array().square() + lambda)).matrix();
      Eigen::VectorXd z = -(svd.matrixV() * filt.cwiseProduct(utr));
      delta = z.cwiseQuotient(scale);
      Eigen::VectorXd candidate = theta + delta;
      Eigen::VectorXd r_new = obj.residuals(candidate);
      double ssr_new = r_new.squaredNorm();
      if (std::isfinite(ssr_new) && ssr_new <= ssr) {
        theta = std::move(candidate);
        r = std::move(r_new);
        ssr = ssr_new;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // No descent direction left at working precision: theta is a stationary point.
      out.converged = true;
      break;
    }
    double max_rel = 0.0;
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
      max_rel = std::max(max_rel, std::abs(delta(k)) / (std::abs(theta(k)) + 1e-8));
    }
    if (max_rel < opt.tol) {
      out.converged = true;
      break;
    }
  }
  out.theta = std::move(theta);
  out.ssr = ssr;
  return out;
}

ECEstimate make_estimate(const CandidateSpec& spec, const AlignedDataset& data,
                         const Eigen::VectorXd& theta, const Eigen::MatrixXd& covariance,
                         const Eigen::VectorXd& residuals) {
  ECEstimate est;
  est.spec_id = spec.id();
  est.predictors = spec.subset;
  est.param_names = parameter_names(spec);
  est.n_params = static_cast<int>(theta.size());
  est.n_obs = static_cast<int>(residuals.size());
  est.first_year = data.first_year() + 1;
  est.trend_origin = data.first_year();
  const auto k = static_cast<Eigen::Index>(spec.subset.size());
  est.betas = theta.head(k);
  Eigen::Index pos = k;
  if (spec.deterministic != DeterministicCase::none) est.constant = theta(pos++);
  if (spec.deterministic == DeterministicCase::constant_and_trend) est.trend = theta(pos++);
  if (spec.phi_free) est.phi = theta(pos++);
  est.covariance = covariance;
  est.residuals = residuals;
  est.ssr = residuals.squaredNorm();
  est.t_ratios.resize(theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    est.t_ratios(j) = guarded_t_ratio(theta(j), covariance(j, j));
  }
  return est;
}

}  // namespace

ECEstimate nls_ec_fit(const CandidateSpec& spec, const AlignedDataset& data,
                      const NlsOptions& options) {
  spec.validate();
  options.validate();
  if (spec.form != ModelForm::levels) throw ConfigError("nls_ec_fit needs a levels-form candidate");
  const std::size_t len = data.length();
  const int n_params = spec.n_params();
  if (len < 1 || static_cast<int>(len) - 1 < n_params + 2) {
    throw InsufficientDataError("sample of " + std::to_string(len) + " years too short for " +
                                std::to_string(n_params) + " parameters");
  }
  const Eigen::VectorXd y = column_segment(data.target(), 0, len);

  // Restricted (phi = 0) fit on the common sample 1 .. T-1.
  OlsEstimate restricted = ols_fit(levels_design(spec, data, 1, len), y.tail(len - 1));
  if (!spec.phi_free) {
    ECEstimate est = make_estimate(spec, data, restricted.coefficients, restricted.covariance,
                                   restricted.residuals);
    est.iterations = 0;
    est.converged = true;
    return est;
  }

  EcObjective obj(spec, data);
  const Eigen::Index n_lin = n_params - 1;

  // Warm start from the full-sample levels regression.
  OlsEstimate step1 = ols_fit(levels_design(spec, data, 0, len), y);
  Eigen::VectorXd start(n_params);
  start.head(n_lin) = step1.coefficients;
  start(n_lin) = std::clamp(lag1_autocorrelation(step1.residuals), -0.99, 0.99);

  // The restricted optimum is also a feasible start; descending from the lower of the two
  // keeps the free-phi SSR at or below the restricted one.
  Eigen::VectorXd restricted_start(n_params);
  restricted_start.head(n_lin) = restricted.coefficients;
  restricted_start(n_lin) = 0.0;
  if (obj.ssr(restricted_start) < obj.ssr(start)) start = restricted_start;

  LmResult fit = marquardt(obj, start, options);

  Eigen::MatrixXd jac = obj.jacobian(fit.theta);
  Eigen::MatrixXd cov;
  try {
    const double s2 = fit.ssr / (obj.n_obs() - n_params);
    cov = s2 * inverse_gram(scaled_svd(jac));
  } catch (const SingularDesignError& e) {
    throw NumericalError(std::string("singular Jacobian at the NLS optimum: ") + e.what());
  }
  ECEstimate est = make_estimate(spec, data, fit.theta, cov, obj.residuals(fit.theta));
  est.converged = fit.converged;
  est.iterations = fit.iterations;
  return est;
}

std::optional<double> ShortRunEstimate::constant() const {
  const auto k = static_cast<Eigen::Index>(predictors.size());
  if (ols.coefficients.size() > k) return ols.coefficients(k);
  return std::nullopt;
}

ShortRunEstimate short_run_fit(const CandidateSpec& spec, const AlignedDataset& data) {
  spec.validate();
  if (spec.form != ModelForm::differences) {
    throw ConfigError("short_run_fit needs a differences-form candidate");
  }
  const std::size_t len = data.length();
  if (len < 2) throw InsufficientDataError("differences need at least two observations");
  const TimeSeries dy = diff(data.target(), 1);
  ShortRunEstimate est;
  est.spec_id = spec.id();
  est.predictors = spec.subset;
  est.param_names = parameter_names(spec);
  est.first_year = data.first_year() + 1;
  est.ols = ols_fit(differences_design(spec, data, 1, len), column_segment(dy, 0, dy.size()));
  return est;
}

}  // namespace cointsearch
