#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cointsearch/rng.hpp"
#include "cointsearch/series.hpp"

namespace testsupport {

inline std::vector<double> random_walk(std::mt19937_64& gen, int n, double sd = 1.0, double drift = 0.0) {
  std::normal_distribution<double> normal(0.0, sd);
  std::vector<double> out(n);
  double level = 0.0;
  for (int i = 0; i < n; ++i) {
    level += drift + normal(gen);
    out[i] = level;
  }
  return out;
}

inline std::vector<double> ar1(std::mt19937_64& gen, int n, double phi, double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  std::vector<double> out(n);
  double u = normal(gen) / std::sqrt(1.0 - phi * phi);
  for (int i = 0; i < n; ++i) {
    if (i) u = phi * u + normal(gen);
    out[i] = u;
  }
  return out;
}

inline std::vector<double> white_noise(std::mt19937_64& gen, int n, double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  std::vector<double> out(n);
  for (auto& v : out) v = normal(gen);
  return out;
}

inline cointsearch::TimeSeries series(const std::string& name, std::vector<double> v, int start = 1900) {
  return cointsearch::TimeSeries(name, start, std::move(v));
}

/// y = c + sum beta_i x_i + eta with AR(1) eta; predictors x1..xk are independent random walks.

inline cointsearch::AlignedDataset cointegrated_dataset(std::uint64_t seed, int n, int k,
                                                        const std::vector<std::pair<int, double>>& betas,
                                                        double constant, double phi, double noise_sd = 1.0,
                                                        int start = 1900) {
  auto gen = cointsearch::substream(seed, 0);
  std::vector<std::vector<double>> x;
  for (int i = 0; i < k; ++i) x.push_back(random_walk(gen, n));
  const auto eta = ar1(gen, n, phi, noise_sd);
  std::vector<double> y(n, constant);
  for (int t = 0; t < n; ++t) {
    y[t] += eta[t];
    for (const auto& [idx, b] : betas) y[t] += b * x[idx - 1][t];
  }
  std::vector<cointsearch::TimeSeries> cols;
  cols.emplace_back("y", start, std::move(y));
  for (int i = 0; i < k; ++i) cols.emplace_back("x" + std::to_string(i + 1), start, std::move(x[i]));
  return cointsearch::AlignedDataset(start, std::move(cols));
}

/// y and x1..xk are independent random walks.
inline cointsearch::AlignedDataset independent_dataset(std::uint64_t seed, int n, int k, int start = 1900) {
  auto gen = cointsearch::substream(seed, 1);
  std::vector<cointsearch::TimeSeries> cols;
  cols.emplace_back("y", start, random_walk(gen, n));
  for (int i = 0; i < k; ++i) cols.emplace_back("x" + std::to_string(i + 1), start, random_walk(gen, n));
  return cointsearch::AlignedDataset(start, std::move(cols));
}

}  // namespace testsupport
