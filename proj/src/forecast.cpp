#include "cointsearch/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "cointsearch/errors.hpp"
#include "cointsearch/parallel.hpp"
#include "cointsearch/rng.hpp"

namespace cointsearch {

void ForecastConfig::validate() const {
  if (reps < 1) throw ConfigError("forecast repetitions must be at least 1");
  if (horizon_start > horizon_end) throw ConfigError("forecast horizon start is after its end");
}

namespace {

constexpr int kMaxRedraws = 100;
constexpr double kQuantileTail = 0.02275;

// Fills one simulated path (years last_train + 1 .. horizon_end) for a parameter draw.
using PathFn = std::function<void(const Eigen::VectorXd& theta, std::mt19937_64& gen, double* out)>;

struct Setup {
  Eigen::VectorXd theta;
  Eigen::MatrixXd covariance;
  int phi_index = -1;
  double sigma = 0.0;
  int last_train = 0;
};

double quantile_of(std::vector<double>& v, double p) {
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

void check_horizon(const Setup& s, const AlignedDataset& data, const ForecastConfig& config) {
  config.validate();
  if (config.horizon_start <= s.last_train) {
    throw ConfigError("forecast horizon starting " + std::to_string(config.horizon_start) +
                      " overlaps the estimation sample ending " + std::to_string(s.last_train));
  }
  if (data.first_year() > s.last_train || data.last_year() < config.horizon_end) {
    throw InsufficientDataError("data must cover " + std::to_string(s.last_train) + " .. " +
                                std::to_string(config.horizon_end) + " for the forecast");
  }
}

ForecastBands simulate(const Setup& s, const ForecastConfig& config, const PathFn& path) {
  const int steps = config.horizon_end - s.last_train;
  const int skip = config.horizon_start - s.last_train - 1;
  const Eigen::Index p = s.theta.size();

  ForecastBands out;
  out.reps = config.reps;
  out.seed = config.seed;
  Eigen::MatrixXd chol;
  if (config.include_coefficient_uncertainty) {
    Eigen::LLT<Eigen::MatrixXd> llt(s.covariance);
    if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().allFinite()) {
      chol = llt.matrixL();
    } else {
      out.covariance_fallback = true;
      chol = s.covariance.diagonal().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }
  }

  std::vector<double> paths(static_cast<std::size_t>(config.reps) * steps);
  std::vector<int> failed(config.reps, 0);
  parallel_for(static_cast<std::size_t>(config.reps), resolve_threads(config.threads), [&](std::size_t rep) {
    auto gen = substream(config.seed, rep);
    std::normal_distribution<double> normal;
    Eigen::VectorXd theta = s.theta;
    if (config.include_coefficient_uncertainty) {
      int attempt = 0;
      for (;; ++attempt) {
        if (attempt == kMaxRedraws) {
          failed[rep] = 1;
          return;
        }
        Eigen::VectorXd z(p);
        for (Eigen::Index j = 0; j < p; ++j) z(j) = normal(gen);
        theta = s.theta + chol * z;
        if (s.phi_index < 0 || std::abs(theta(s.phi_index)) < 1.0) break;
      }
    }
    path(theta, gen, paths.data() + rep * steps);
  });
  if (std::any_of(failed.begin(), failed.end(), [](int f) { return f != 0; })) {
    throw NumericalError("parameter draws kept giving |phi| >= 1 after " +
                         std::to_string(kMaxRedraws) + " attempts");
  }

  std::vector<double> column(config.reps);
  for (int h = skip; h < steps; ++h) {
    // Shifted sums: identical paths give exactly zero spread.
    const double origin = paths[h];
    double sum = 0.0, sum_sq = 0.0;
    for (int rep = 0; rep < config.reps; ++rep) {
      const double d = paths[static_cast<std::size_t>(rep) * steps + h] - origin;
      sum += d;
      sum_sq += d * d;
      column[rep] = d + origin;
    }
    const double n = config.reps;
    const double mean = origin + sum / n;
    const double var = config.reps > 1 ? std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0)) : 0.0;
    const double sd = std::sqrt(var);
    out.years.push_back(s.last_train + 1 + h);
    out.mean.push_back(mean);
    out.sd.push_back(sd);
    if (config.band == BandMethod::two_sd) {
      out.lower.push_back(mean - 2.0 * sd);
      out.upper.push_back(mean + 2.0 * sd);
    } else {
      out.lower.push_back(quantile_of(column, kQuantileTail));
      out.upper.push_back(quantile_of(column, 1.0 - kQuantileTail));
    }
  }
  return out;
}

std::vector<std::vector<double>> predictor_block(const std::vector<std::string>& names,
                                                 const AlignedDataset& data, int first_year,
                                                 int last_year) {
  std::vector<std::vector<double>> out;
  for (const auto& name : names) {
    const auto& s = data.column(name);
    std::vector<double> v;
    for (int year = first_year; year <= last_year; ++year) v.push_back(s.at_year(year));
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

ForecastBands mc_forecast(const ECEstimate& model, const AlignedDataset& data,
                          const ForecastConfig& config) {
  Setup s;
  s.theta = model.params();
  s.covariance = model.covariance;
  s.sigma = std::sqrt(model.sigma2());
  s.last_train = model.first_year + model.n_obs - 1;
  const auto k = static_cast<Eigen::Index>(model.predictors.size());
  Eigen::Index pos = k;
  const int c_index = model.constant ? static_cast<int>(pos++) : -1;
  const int trend_index = model.trend ? static_cast<int>(pos++) : -1;
  s.phi_index = model.phi ? static_cast<int>(pos++) : -1;
  check_horizon(s, data, config);

  // Row 0 is the last training year.
  const auto x = predictor_block(model.predictors, data, s.last_train, config.horizon_end);
  const double y_last = data.target().at_year(s.last_train);
  const int steps = config.horizon_end - s.last_train;
  const int origin = model.trend_origin;

  auto level = [&](const Eigen::VectorXd& theta, int row) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) v += theta(i) * x[i][row];
    if (c_index >= 0) v += theta(c_index);
    if (trend_index >= 0) v += theta(trend_index) * (s.last_train + row - origin + 1);
    return v;
  };
  const PathFn path = [&](const Eigen::VectorXd& theta, std::mt19937_64& gen, double* out) {
    std::normal_distribution<double> normal;
    const double phi = s.phi_index >= 0 ? theta(s.phi_index) : 0.0;
    double u = y_last - level(theta, 0);
    for (int h = 1; h <= steps; ++h) {
      u = phi * u + s.sigma * normal(gen);
      out[h - 1] = level(theta, h) + u;
    }
  };
  return simulate(s, config, path);
}

ForecastBands mc_forecast(const ShortRunEstimate& model, const AlignedDataset& data,
                          const ForecastConfig& config) {
  Setup s;
  s.theta = model.ols.coefficients;
  s.covariance = model.ols.covariance;
  s.sigma = std::sqrt(model.ols.sigma2());
  s.last_train = model.first_year + model.ols.n_obs - 1;
  check_horizon(s, data, config);

  const auto k = static_cast<Eigen::Index>(model.predictors.size());
  const bool has_constant = s.theta.size() > k;
  const auto x = predictor_block(model.predictors, data, s.last_train, config.horizon_end);
  const double y_last = data.target().at_year(s.last_train);
  const int steps = config.horizon_end - s.last_train;

  const PathFn path = [&](const Eigen::VectorXd& theta, std::mt19937_64& gen, double* out) {
    std::normal_distribution<double> normal;
    double y = y_last;
    for (int h = 1; h <= steps; ++h) {
      double dy = has_constant ? theta(k) : 0.0;
      for (Eigen::Index i = 0; i < k; ++i) dy += theta(i) * (x[i][h] - x[i][h - 1]);
      y += dy + s.sigma * normal(gen);
      out[h - 1] = y;
    }
  };
  return simulate(s, config, path);
}

ComparisonReport forecast_compare(const std::vector<CandidateSpec>& models,
                                  const AlignedDataset& data,
                                  const std::vector<ForecastSplit>& splits,
                                  const ForecastConfig& config, const NlsOptions& nls) {
  if (models.empty()) throw ConfigError("forecast comparison needs at least one model");
  if (splits.empty()) throw ConfigError("forecast comparison needs at least one split");
  for (const auto& sp : splits) {
    if (sp.train_end >= sp.horizon_end || sp.train_end <= data.first_year() ||
        sp.horizon_end > data.last_year()) {
      throw ConfigError("split (" + std::to_string(sp.train_end) + ", " +
                        std::to_string(sp.horizon_end) + ") does not fit the data years " +
                        std::to_string(data.first_year()) + " .. " + std::to_string(data.last_year()));
    }
  }
  ComparisonReport report;
  for (const auto& sp : splits) {
    const AlignedDataset train = data.window(data.first_year(), sp.train_end);
    ForecastConfig fc = config;
    fc.horizon_start = sp.train_end + 1;
    fc.horizon_end = sp.horizon_end;
    for (const auto& spec : models) {
      ComparisonRow row;
      row.model_id = spec.id();
      row.split = sp;
      try {
        spec.validate();
        if (spec.form == ModelForm::levels) {
          const ECEstimate est = nls_ec_fit(spec, train, nls);
          if (!est.converged) throw NumericalError("NLS did not converge");
          if (est.phi_nonstationary()) throw NumericalError("estimated |phi| >= 1");
          row.bands = mc_forecast(est, data, fc);
        } else {
          row.bands = mc_forecast(short_run_fit(spec, train), data, fc);
        }
        row.available = true;
      } catch (const Error& e) {
        row.error = e.what();
        report.rows.push_back(std::move(row));
        continue;
      }
      double sq = 0.0, width = 0.0;
      for (std::size_t h = 0; h < row.bands.years.size(); ++h) {
        const double actual = data.target().at_year(row.bands.years[h]);
        row.realization.push_back(actual);
        sq += (row.bands.mean[h] - actual) * (row.bands.mean[h] - actual);
        width += row.bands.upper[h] - row.bands.lower[h];
      }
      const double n = static_cast<double>(row.bands.years.size());
      row.rmse = std::sqrt(sq / n);
      row.mean_band_width = width / n;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace cointsearch
