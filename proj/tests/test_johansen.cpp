#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cointsearch/errors.hpp"
#include "cointsearch/johansen.hpp"
#include "support.hpp"

using namespace cointsearch;

namespace {

AlignedDataset vec_system(std::uint64_t seed, int n) {
  // y = 2 x1 - x2 + stationary noise, x1 and x2 random walks: rank 1 in (y, x1, x2).
  return testsupport::cointegrated_dataset(seed, n, 2, {{1, 2.0}, {2, -1.0}}, 3.0, 0.3);
}

ECEstimate hand_estimate(std::vector<std::string> preds, Eigen::VectorXd betas, double c,
                         std::vector<double> se) {
  ECEstimate e;
  e.predictors = preds;
  e.betas = betas;
  e.constant = c;
  e.param_names = preds;
  e.param_names.push_back("c");
  e.n_params = static_cast<int>(e.param_names.size());
  e.covariance = Eigen::MatrixXd::Zero(e.n_params, e.n_params);
  for (int i = 0; i < e.n_params; ++i) e.covariance(i, i) = se[i] * se[i];
  return e;
}

VecResult hand_vec(Eigen::MatrixXd beta, Eigen::VectorXd gamma) {
  VecResult v;
  v.dimension = static_cast<int>(beta.rows());
  v.vec_case = VecCase::restricted_constant;
  v.variables = {"y", "x1", "x2"};
  v.target = "y";
  v.beta = beta;
  v.gamma = gamma;
  v.rank = static_cast<int>(beta.cols());
  v.selected_rank = v.rank;
  return v;
}

}  // namespace

TEST_CASE("rank statistics telescope and have one entry per hypothesis") {
  for (VecCase c : {VecCase::restricted_constant, VecCase::restricted_trend}) {
    const auto vec = johansen_test(vec_system(4, 150), c);
    REQUIRE(vec.trace_stats.size() == 3);
    REQUIRE(vec.max_eig_stats.size() == 3);
    for (int r = 0; r < 3; ++r) {
      CHECK(vec.trace_stats(r) == doctest::Approx(vec.max_eig_stats.tail(3 - r).sum()).epsilon(1e-12));
      CHECK(vec.eigenvalues(r) >= 0.0);
      CHECK(vec.eigenvalues(r) < 1.0);
      if (r) CHECK(vec.eigenvalues(r) <= vec.eigenvalues(r - 1));
      CHECK(vec.trace_pvalues(r) >= 0.0);
      CHECK(vec.trace_pvalues(r) <= 1.0);
    }
    CHECK(vec.selected_rank == 1);
    CHECK(vec.selected_rank <= 2);
  }
}

TEST_CASE("VEC estimates satisfy their structural identities") {
  for (VecCase c : {VecCase::restricted_constant, VecCase::restricted_trend}) {
    JohansenOptions opts;
    opts.rank = 1;
    const auto vec = johansen_test(vec_system(5, 200), c, opts);
    CHECK(vec.alpha.rows() == 3);
    CHECK(vec.alpha.cols() == 1);
    CHECK(vec.beta.cols() == 1);
    CHECK(vec.gamma.size() == 1);
    CHECK((vec.alpha.transpose() * vec.alpha_perp).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((vec.omega - vec.omega.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(vec.omega);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    // The cointegrating vector is proportional to (1, -2, 1).
    const Eigen::VectorXd b = vec.beta.col(0) / vec.beta(0, 0);
    CHECK(b(1) == doctest::Approx(-2.0).epsilon(0.02));
    CHECK(b(2) == doctest::Approx(1.0).epsilon(0.04));
    if (c == VecCase::restricted_trend) {
      REQUIRE(vec.delta.has_value());
      REQUIRE(vec.delta_prime.has_value());
      CHECK(vec.delta_prime->size() == 2);
    } else {
      CHECK_FALSE(vec.delta.has_value());
      // Constant inside the relation: gamma / beta_y is about -3.
      CHECK(vec.gamma(0) / vec.beta(0, 0) == doctest::Approx(-3.0).epsilon(0.1));
    }
  }
}

TEST_CASE("eigenvalues are invariant to reparameterising the non-target columns") {
  const auto data = vec_system(6, 120);
  const auto& x1 = data.column("x1");
  const auto& x2 = data.column("x2");
  std::vector<double> a(120), b(120);
  for (int t = 0; t < 120; ++t) {
    a[t] = 2.0 * x1[t] + 0.5 * x2[t];
    b[t] = -x1[t] + 3.0 * x2[t];
  }
  AlignedDataset other(data.first_year(), {data.target(), TimeSeries("a", data.first_year(), a),
                                           TimeSeries("b", data.first_year(), b)});
  for (VecCase c : {VecCase::restricted_constant, VecCase::restricted_trend}) {
    const auto v1 = johansen_test(data, c);
    const auto v2 = johansen_test(other, c);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(v1.eigenvalues(i) - v2.eigenvalues(i)) <= 1e-8);
  }
}

TEST_CASE("Johansen input checks") {
  const auto data = vec_system(7, 40);
  AlignedDataset one(data.first_year(), {data.target()});
  CHECK_THROWS_AS(johansen_test(one, VecCase::restricted_constant), UnsupportedError);
  CHECK_THROWS_AS(johansen_test(data.window(data.first_year(), data.first_year() + 12),
                                VecCase::restricted_constant),
                  InsufficientDataError);
  AlignedDataset dup(data.first_year(), {data.target(), data.column("x1"),
                                         TimeSeries("x1copy", data.first_year(),
                                                    std::vector<double>(data.column("x1").values().begin(),
                                                                        data.column("x1").values().end()))});
  CHECK_THROWS_AS(johansen_test(dup, VecCase::restricted_constant), NumericalError);
}

TEST_CASE("critical values agree with published 5% trace values") {
  // MacKinnon, Haug and Michelis (1999), asymptotic 5% trace critical values.
  const double a[] = {9.1645, 20.2618, 35.1929, 54.0790, 76.9733};
  const double b[] = {12.5180, 25.8721, 42.9153, 63.8766, 88.8038};
  for (int m = 1; m <= 5; ++m) {
    CHECK(johansen_trace_critical(VecCase::restricted_constant, m, 0.05) ==
          doctest::Approx(a[m - 1]).epsilon(0.015));
    CHECK(johansen_trace_critical(VecCase::restricted_trend, m, 0.05) ==
          doctest::Approx(b[m - 1]).epsilon(0.015));
  }
  CHECK(johansen_trace_critical(VecCase::restricted_constant, 1, 0.05) ==
        johansen_max_eig_critical(VecCase::restricted_constant, 1, 0.05));
}

TEST_CASE("shipped table agrees with a fresh seeded simulation") {
  for (VecCase c : {VecCase::restricted_constant, VecCase::restricted_trend}) {
    for (int m : {1, 3}) {
      auto draws = simulate_johansen_null(c, m, 400, 4000, 99 + m);
      std::sort(draws.trace.begin(), draws.trace.end());
      std::sort(draws.max_eig.begin(), draws.max_eig.end());
      for (double level : {0.10, 0.05}) {
        const auto idx = static_cast<std::size_t>((1.0 - level) * 4000);
        CHECK(draws.trace[idx] == doctest::Approx(johansen_trace_critical(c, m, level)).epsilon(0.05));
        CHECK(draws.max_eig[idx] == doctest::Approx(johansen_max_eig_critical(c, m, level)).epsilon(0.05));
      }
    }
  }
}

TEST_CASE("p-values invert the critical values") {
  for (VecCase c : {VecCase::restricted_constant, VecCase::restricted_trend}) {
    for (int m = 1; m <= 6; ++m) {
      for (double level : {0.01, 0.05, 0.10}) {
        CHECK(johansen_trace_pvalue(johansen_trace_critical(c, m, level), c, m) ==
              doctest::Approx(level).epsilon(1e-6));
        CHECK(johansen_max_eig_pvalue(johansen_max_eig_critical(c, m, level), c, m) ==
              doctest::Approx(level).epsilon(1e-6));
      }
      double prev = 1.0;
      for (double s = 0.0; s < 200.0; s += 0.5) {
        const double p = johansen_trace_pvalue(s, c, m);
        CHECK(p <= prev + 1e-15);
        CHECK(p > 0.0);
        prev = p;
      }
    }
  }
}

TEST_CASE("ec_consistency: exact membership gives a unit vector") {
  // EC term y - 2 x1 + x2 - 3 -> coefficients (1, -2, 1, -3) over (y, x1, x2, 1).
  Eigen::MatrixXd beta(3, 2);
  beta << 0.5, 1.0, 1.0, -2.0, 4.0, 1.0;
  Eigen::VectorXd gamma(2);
  gamma << 7.0, -3.0;
  const auto vec = hand_vec(beta, gamma);
  Eigen::VectorXd betas(2);
  betas << 2.0, -1.0;
  const auto ec = hand_estimate({"x1", "x2"}, betas, 3.0, {0.1, 0.1, 0.5});
  CandidateSpec spec{ModelForm::levels, {"x1", "x2"}, DeterministicCase::constant, true};
  const auto r = ec_consistency(vec, ec, spec);
  CHECK(r.within_bounds);
  CHECK(std::abs(r.xi(0)) <= 1e-8);
  CHECK(std::abs(r.xi(1) - 1.0) <= 1e-8);

  // The result does not depend on the basis of the cointegration space.
  Eigen::Matrix2d m;
  m << 2.0, 1.0, -1.0, 3.0;
  const auto rotated = hand_vec(beta * m, m.transpose() * gamma);
  const auto r2 = ec_consistency(rotated, ec, spec);
  CHECK(r2.within_bounds);
  CHECK((r2.reconstructed_ec - r.reconstructed_ec).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("ec_consistency: a space orthogonal to the EC term is rejected") {
  // (1, -2, 1, -3) is orthogonal to the single column below.
  Eigen::MatrixXd beta(3, 1);
  beta << 2.0, 1.0, 0.0;
  Eigen::VectorXd gamma(1);
  gamma << 0.0;
  const auto vec = hand_vec(beta, gamma);
  Eigen::VectorXd betas(2);
  betas << 2.0, -1.0;
  const auto ec = hand_estimate({"x1", "x2"}, betas, 3.0, {0.1, 0.1, 0.5});
  CandidateSpec spec{ModelForm::levels, {"x1", "x2"}, DeterministicCase::constant, true};
  CHECK_FALSE(ec_consistency(vec, ec, spec).within_bounds);

  CandidateSpec trend_spec = spec;
  trend_spec.deterministic = DeterministicCase::constant_and_trend;
  CHECK_THROWS_AS(ec_consistency(vec, ec, trend_spec), ConfigError);
  auto empty = hand_vec(Eigen::MatrixXd(3, 0), Eigen::VectorXd(0));
  CHECK_THROWS_AS(ec_consistency(empty, ec, spec), DegenerateError);
}

TEST_CASE("ec_consistency on estimated VEC and EC models") {
  int within = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto data = vec_system(seed, 200);
    JohansenOptions opts;
    opts.rank = 1;
    const auto vec = johansen_test(data, VecCase::restricted_constant, opts);
    CandidateSpec spec{ModelForm::levels, {"x1", "x2"}, DeterministicCase::constant, true};
    const auto ec = nls_ec_fit(spec, data);
    within += ec_consistency(vec, ec, spec).within_bounds ? 1 : 0;
  }
  CHECK(within >= 16);
}
