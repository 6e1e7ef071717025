// Simulates the asymptotic null distributions of the Johansen trace and max-eigenvalue
// statistics and writes the quantile table read by the library (data/johansen.txt).
//
//   gen_johansen_tables [--steps N] [--reps N] [--seed N] > data/johansen.txt

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <iostream>
#include <vector>

#include "cointsearch/johansen.hpp"

using namespace cointsearch;

namespace {

std::vector<double> probability_grid() {
  std::vector<double> p;
  for (int i = 1; i <= 199; ++i) p.push_back(i * 0.005);
  for (double extra : {0.9975, 0.999, 0.9995}) p.push_back(extra);
  return p;
}

double empirical_quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Johansen critical-value table generator"};
  int steps = 1000;
  int reps = 100000;
  std::uint64_t seed = 20240601;
  app.add_option("--steps", steps, "discretisation steps of the Brownian motions");
  app.add_option("--reps", reps, "replications per (case, m)");
  app.add_option("--seed", seed, "base seed");
  CLI11_PARSE(app, argc, argv);

  const auto probs = probability_grid();
  std::printf("# Johansen rank-test null distributions: quantiles of the asymptotic trace and\n");
  std::printf("# max-eigenvalue statistics, simulated with %d steps and %d replications (seed %llu).\n",
              steps, reps, static_cast<unsigned long long>(seed));
  std::printf("# case a: restricted constant; case b: restricted trend, unrestricted constant.\n");
  std::printf("# Schema: 'probs p1 .. pK' gives cumulative probabilities; each following row is\n");
  std::printf("# '<case> <trace|maxeig> <m = dimension - rank> q1 .. qK'.\n");
  std::printf("probs");
  for (double p : probs) std::printf(" %.4f", p);
  std::printf("\n");

  std::uint64_t stream = 0;
  for (VecCase c : {VecCase::restricted_constant, VecCase::restricted_trend}) {
    for (int m = 1; m <= 6; ++m) {
      auto draws = simulate_johansen_null(c, m, steps, reps, seed + 1000 * (++stream));
      std::sort(draws.trace.begin(), draws.trace.end());
      std::sort(draws.max_eig.begin(), draws.max_eig.end());
      for (auto* stat : {&draws.trace, &draws.max_eig}) {
        std::printf("%s %s %d", std::string(vec_case_code(c)).c_str(),
                    stat == &draws.trace ? "trace" : "maxeig", m);
        for (double p : probs) std::printf(" %.4f", empirical_quantile(*stat, p));
        std::printf("\n");
      }
      std::fflush(stdout);
      std::cerr << "case " << vec_case_code(c) << " m=" << m << " done\n";
    }
  }
  return 0;
}
