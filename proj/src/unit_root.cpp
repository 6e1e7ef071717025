#include "cointsearch/unit_root.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "cointsearch/critical_values.hpp"
#include "cointsearch/errors.hpp"
#include "cointsearch/regress.hpp"

namespace cointsearch {

namespace {

// KPSS (1992) asymptotic upper-tail critical values.
constexpr std::array<double, 4> kKpssLevels = {0.10, 0.05, 0.025, 0.01};
constexpr std::array<double, 4> kKpssConstant = {0.347, 0.463, 0.574, 0.739};
constexpr std::array<double, 4> kKpssTrend = {0.119, 0.146, 0.176, 0.216};

bool is_constant(std::span<const double> v) {
  for (double x : v) {
    if (x != v[0]) return false;
  }
  return true;
}

// ADF design over dy rows [first, last): [s_{t-1}, dy_{t-1..t-p}, 1, t].
struct AdfRegression {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

AdfRegression adf_regression(std::span<const double> s, int p, std::size_t first,
                             DeterministicCase c) {
  // dy index i corresponds to time i+1 (dy_i = s_{i+1} - s_i).
  const std::size_t n_dy = s.size() - 1;
  const auto rows = static_cast<Eigen::Index>(n_dy - first);
  const int det = deterministic_count(c);
  AdfRegression r{Eigen::MatrixXd(rows, 1 + p + det), Eigen::VectorXd(rows)};
  for (Eigen::Index k = 0; k < rows; ++k) {
    const std::size_t i = first + static_cast<std::size_t>(k);
    r.y(k) = s[i + 1] - s[i];
    r.x(k, 0) = s[i];
    for (int j = 1; j <= p; ++j) r.x(k, j) = s[i + 1 - j] - s[i - j];
    if (det >= 1) r.x(k, 1 + p) = 1.0;
    if (det == 2) r.x(k, 2 + p) = static_cast<double>(i + 1);
  }
  return r;
}

}  // namespace

int schwert_max_lag(std::size_t n) {
  return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

UnitRootResult adf_test(const TimeSeries& s, DeterministicCase c, std::optional<int> max_lag) {
  const auto v = s.values();
  const int len = static_cast<int>(v.size());
  int lag_cap;
  if (max_lag) {
    if (*max_lag < 0) throw ConfigError("maximum ADF lag must be non-negative");
    lag_cap = *max_lag;
    if (len < lag_cap + 10) {
      throw InsufficientDataError("series '" + s.name() + "' too short for ADF with " +
                                  std::to_string(lag_cap) + " lags");
    }
  } else {
    if (len < 10) throw InsufficientDataError("series '" + s.name() + "' too short for ADF");
    lag_cap = std::min(schwert_max_lag(v.size()), len - 10);
  }
  if (is_constant(v)) throw DegenerateError("series '" + s.name() + "' is constant");

  // Lag selection on the common sample.
  int best_p = 0;
  double best_bic = std::numeric_limits<double>::infinity();
  for (int p = 0; p <= lag_cap; ++p) {
    AdfRegression r = adf_regression(v, p, static_cast<std::size_t>(lag_cap), c);
    OlsEstimate fit = ols_fit(r.x, r.y);
    const double n = fit.n_obs;
    const double bic = n * std::log(fit.ssr / n) + fit.n_params * std::log(n);
    if (bic < best_bic) {
      best_bic = bic;
      best_p = p;
    }
  }
  AdfRegression r = adf_regression(v, best_p, static_cast<std::size_t>(best_p), c);
  OlsEstimate fit = ols_fit(r.x, r.y);
  UnitRootResult out;
  out.statistic = fit.t_ratios(0);
  out.lags_used = best_p;
  out.max_lag = lag_cap;
  out.deterministic = c;
  out.n_obs = fit.n_obs;
  // Below 20 observations the finite-sample surface is out of range; fall back to asymptotics.
  out.p_value = df_pvalue(out.statistic, c,
                          out.n_obs >= 20 ? std::optional<int>(out.n_obs) : std::nullopt, 0);
  return out;
}

ResidualDf residual_df_statistic(const Eigen::VectorXd& residuals, int augmentation_lags) {
  if (augmentation_lags < 0) throw ConfigError("augmentation lags must be non-negative");
  const Eigen::Index len = residuals.size();
  const Eigen::Index rows = len - 1 - augmentation_lags;
  if (rows < augmentation_lags + 3) throw InsufficientDataError("too few residuals for a DF test");
  if (residuals.cwiseAbs().maxCoeff() == 0.0) throw DegenerateError("residuals are all zero");
  Eigen::MatrixXd x(rows, 1 + augmentation_lags);
  Eigen::VectorXd y(rows);
  for (Eigen::Index k = 0; k < rows; ++k) {
    const Eigen::Index i = k + augmentation_lags;  // dy_i = e_{i+1} - e_i
    y(k) = residuals(i + 1) - residuals(i);
    x(k, 0) = residuals(i);
    for (int j = 1; j <= augmentation_lags; ++j) x(k, j) = residuals(i + 1 - j) - residuals(i - j);
  }
  OlsEstimate fit = ols_fit(x, y);
  return ResidualDf{fit.t_ratios(0), fit.n_obs};
}

std::string PBracket::label() const {
  std::ostringstream os;
  if (upper >= 1.0) {
    os << ">" << lower;
  } else if (lower <= 0.0) {
    os << "<" << upper;
  } else {
    os << lower << "-" << upper;
  }
  return os.str();
}

double kpss_critical_value(DeterministicCase c, double level) {
  if (c == DeterministicCase::none) throw UnsupportedError("KPSS needs a constant or a trend");
  const auto& cv = c == DeterministicCase::constant ? kKpssConstant : kKpssTrend;
  for (std::size_t i = 0; i < kKpssLevels.size(); ++i) {
    if (std::abs(level - kKpssLevels[i]) < 1e-9) return cv[i];
  }
  throw UnsupportedError("KPSS critical values exist at 0.10, 0.05, 0.025, 0.01 only");
}

bool KpssResult::rejects(double level) const {
  return statistic > kpss_critical_value(deterministic, level);
}

int nw_bandwidth(const Eigen::VectorXd& e) {
  const Eigen::Index n = e.size();
  if (n < 10) throw InsufficientDataError("bandwidth selection needs at least 10 residuals");
  if ((e.array() - e.mean()).matrix().squaredNorm() == 0.0) {
    throw DegenerateError("residuals have zero variance");
  }
  const int pilot = static_cast<int>(std::floor(4.0 * std::pow(n / 100.0, 2.0 / 9.0)));
  auto autocov = [&](int j) {
    double acc = 0.0;
    for (Eigen::Index t = j; t < n; ++t) acc += e(t) * e(t - j);
    return acc / static_cast<double>(n);
  };
  double s0 = autocov(0);
  double s1 = 0.0;
  for (int j = 1; j <= pilot; ++j) {
    const double g = autocov(j);
    s0 += 2.0 * g;
    s1 += 2.0 * j * g;
  }
  if (s0 == 0.0) return 0;
  const double gamma = 1.1447 * std::cbrt((s1 / s0) * (s1 / s0));
  const auto bw = static_cast<long>(std::floor(gamma * std::cbrt(static_cast<double>(n))));
  return static_cast<int>(std::min<long>(bw, n - 1));
}

KpssResult kpss_test(const TimeSeries& s, DeterministicCase c) {
  if (c == DeterministicCase::none) throw UnsupportedError("KPSS needs a constant or a trend");
  const auto v = s.values();
  const auto n = static_cast<Eigen::Index>(v.size());
  if (n < 20) throw InsufficientDataError("series '" + s.name() + "' too short for KPSS");
  if (is_constant(v)) throw DegenerateError("series '" + s.name() + "' is constant");

  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
  Eigen::VectorXd e;
  if (c == DeterministicCase::constant) {
    e = y.array() - y.mean();
  } else {
    Eigen::MatrixXd x(n, 2);
    x.col(0).setOnes();
    for (Eigen::Index t = 0; t < n; ++t) x(t, 1) = static_cast<double>(t + 1);
    e = ols_fit(x, y).residuals;
  }
  KpssResult out;
  out.deterministic = c;
  out.bandwidth = nw_bandwidth(e);

  double partial = 0.0, eta = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    partial += e(t);
    eta += partial * partial;
  }
  const double nn = static_cast<double>(n);
  eta /= nn * nn;
  double lrv = e.squaredNorm();
  for (int j = 1; j <= out.bandwidth; ++j) {
    double g = 0.0;
    for (Eigen::Index t = j; t < n; ++t) g += e(t) * e(t - j);
    lrv += 2.0 * (1.0 - j / (out.bandwidth + 1.0)) * g;
  }
  lrv /= nn;
  if (!(lrv > 0.0)) throw DegenerateError("non-positive long-run variance estimate");
  out.statistic = eta / lrv;

  const auto& cv = c == DeterministicCase::constant ? kKpssConstant : kKpssTrend;
  out.p_bracket = {kKpssLevels[0], 1.0};
  for (std::size_t i = 0; i < cv.size(); ++i) {
    if (out.statistic > cv[i]) {
      out.p_bracket.upper = kKpssLevels[i];
      out.p_bracket.lower = i + 1 < cv.size() ? kKpssLevels[i + 1] : 0.0;
    }
  }
  return out;
}

}  // namespace cointsearch
