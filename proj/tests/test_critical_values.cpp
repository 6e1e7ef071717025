#include <doctest.h>

#include <cmath>

#include "cointsearch/critical_values.hpp"
#include "cointsearch/errors.hpp"

using namespace cointsearch;

// Expected values: statsmodels mackinnoncrit / mackinnonp (N = n_regressors + 1).
TEST_CASE("critical values match the response surfaces") {
  using DC = DeterministicCase;
  CHECK(df_critical_value(0, DC::constant, 0.05) == doctest::Approx(-2.86154).epsilon(1e-6));
  CHECK(df_critical_value(0, DC::none, 0.01) == doctest::Approx(-2.56574).epsilon(1e-6));
  CHECK(df_critical_value(0, DC::constant_and_trend, 0.10) == doctest::Approx(-3.12705).epsilon(1e-6));
  CHECK(df_critical_value(0, DC::constant, 0.01, 100) == doctest::Approx(-3.497501033).epsilon(1e-8));
  CHECK(df_critical_value(0, DC::none, 0.10, 100) == doctest::Approx(-1.614410036).epsilon(1e-8));
  CHECK(eg_critical_value(1, DC::constant, 0.05) == doctest::Approx(-3.33613).epsilon(1e-6));
  CHECK(eg_critical_value(2, DC::constant, 0.01, 100) == doctest::Approx(-4.441366067).epsilon(1e-8));
  CHECK(eg_critical_value(2, DC::constant_and_trend, 0.05, 100) == doctest::Approx(-4.239647768).epsilon(1e-8));
  CHECK(eg_critical_value(1, DC::constant_and_trend, 0.05) == doctest::Approx(-3.78057).epsilon(1e-6));
  CHECK_THROWS_AS(eg_critical_value(0, DC::constant, 0.05), UnsupportedError);
  CHECK_THROWS_AS(eg_critical_value(7, DC::constant, 0.05), UnsupportedError);
  CHECK_THROWS_AS(df_critical_value(0, DC::constant, 0.025), UnsupportedError);
}

TEST_CASE("asymptotic p-values match the reference surfaces") {
  using DC = DeterministicCase;
  struct Ref {
    double stat;
    DC c;
    int k;
    double p;
  };
  const std::vector<Ref> refs = {
      {-1.0, DC::constant, 0, 0.7532643012005655},   {-2.0, DC::constant, 1, 0.5285780802451076},
      {-3.0, DC::constant, 3, 0.4117938261671736},   {-4.0, DC::constant, 5, 0.23472322759578118},
      {-3.0, DC::constant_and_trend, 2, 0.4299022633617552}, {-2.0, DC::none, 0, 0.043520623056049056},
      {-4.0, DC::constant, 0, 0.0014105112530392603}, {-3.0, DC::none, 0, 0.0026637350127542685},
  };
  for (const auto& r : refs) {
    CAPTURE(r.stat);
    CAPTURE(r.k);
    CHECK(df_pvalue(r.stat, r.c, std::nullopt, r.k) == doctest::Approx(r.p).epsilon(1e-9));
  }
}

TEST_CASE("p-values are monotone and consistent with the critical values") {
  using DC = DeterministicCase;
  for (DC c : {DC::none, DC::constant, DC::constant_and_trend}) {
    const int max_k = c == DC::none ? 5 : 6;
    for (int k = 0; k <= max_k; ++k) {
      CAPTURE(k);
      double prev = 0.0;
      for (double s = -8.0; s <= 2.0; s += 0.05) {
        const double p = df_pvalue(s, c, std::nullopt, k);
        CHECK(p >= prev - 1e-12);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        prev = p;
      }
      for (double level : {0.01, 0.05, 0.10}) {
        const double cv = df_critical_value(k, c, level);
        CHECK(df_pvalue(cv, c, std::nullopt, k) == doctest::Approx(level).epsilon(0.12));
        const double cv_t = df_critical_value(k, c, level, 60);
        CHECK(df_pvalue(cv_t, c, 60, k) == doctest::Approx(level).epsilon(0.12));
      }
    }
  }
  CHECK_THROWS_AS(df_pvalue(-3.0, DC::constant, 10, 0), InsufficientDataError);
  CHECK_THROWS_AS(df_pvalue(-3.0, DC::constant, std::nullopt, 7), UnsupportedError);
  CHECK_THROWS_AS(df_pvalue(-3.0, DC::none, std::nullopt, 6), UnsupportedError);
}
