#include "cointsearch/critical_values.hpp"

#include <array>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>

#include "cointsearch/errors.hpp"

namespace cointsearch {

namespace tables {
extern const std::string_view dickey_fuller_text;
}

namespace {

constexpr std::array<double, 3> kLevels = {0.01, 0.05, 0.10};

struct PValueSurface {
  double tau_min, tau_star, tau_max;
  std::array<double, 3> small;
  std::array<double, 4> large;
};

struct DfTables {
  // (case, N, level index) -> b_inf, b1, b2, b3
  std::map<std::tuple<DeterministicCase, int, int>, std::array<double, 4>> crit;
  std::map<std::pair<DeterministicCase, int>, PValueSurface> pval;
};

int level_index(double level) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(level - kLevels[i]) < 1e-9) return i;
  }
  throw UnsupportedError("critical values are tabulated at 0.01, 0.05 and 0.10 only");
}

double parse_number(const std::string& tok) {
  if (tok == "inf") return std::numeric_limits<double>::infinity();
  return std::stod(tok);
}

DfTables parse_tables(std::string_view text) {
  DfTables t;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kind, case_str;
    int n_series = 0;
    ls >> kind >> case_str >> n_series;
    const DeterministicCase c = parse_case(case_str);
    std::string tok;
    std::vector<double> v;
    while (ls >> tok) v.push_back(parse_number(tok));
    if (kind == "crit" && v.size() == 5) {
      std::array<double, 4> b{v[1], v[2], v[3], v[4]};
      t.crit[{c, n_series, level_index(v[0])}] = b;
    } else if (kind == "pval" && v.size() == 10) {
      t.pval[{c, n_series}] = PValueSurface{v[0], v[1], v[2], {v[3], v[4], v[5]}, {v[6], v[7], v[8], v[9]}};
    } else {
      throw ParseError("malformed Dickey-Fuller table line " + std::to_string(line_no));
    }
  }
  return t;
}

const DfTables& df_tables() {
  static const DfTables t = parse_tables(tables::dickey_fuller_text);
  return t;
}

double norm_cdf(double x) {
  return boost::math::cdf(boost::math::normal(), x);
}

double norm_quantile(double p) {
  return boost::math::quantile(boost::math::normal(), p);
}

void check_regressors(int n_regressors) {
  if (n_regressors < 0 || n_regressors > kMaxEgRegressors) {
    throw UnsupportedError("Dickey-Fuller tables cover 0 to 6 regressors, got " +
                           std::to_string(n_regressors));
  }
}

// Asymptotic p-value from the response surface; nullopt when the dimension is not covered.
std::optional<double> surface_pvalue(double stat, DeterministicCase c, int n_series) {
  const auto& t = df_tables();
  auto it = t.pval.find({c, n_series});
  if (it == t.pval.end()) return std::nullopt;
  const PValueSurface& s = it->second;
  if (stat > s.tau_max) return 1.0;
  if (stat < s.tau_min) return 0.0;
  double z;
  if (stat <= s.tau_star) {
    z = s.small[0] + stat * (s.small[1] + stat * s.small[2]);
  } else {
    z = s.large[0] + stat * (s.large[1] + stat * (s.large[2] + stat * s.large[3]));
  }
  return norm_cdf(z);
}

std::optional<double> surface_critical_value(DeterministicCase c, int n_series, int level_idx,
                                             std::optional<int> sample_size) {
  const auto& t = df_tables();
  auto it = t.crit.find({c, n_series, level_idx});
  if (it == t.crit.end()) return std::nullopt;
  const auto& b = it->second;
  if (!sample_size) return b[0];
  const double inv = 1.0 / *sample_size;
  return b[0] + inv * (b[1] + inv * (b[2] + inv * b[3]));
}

// Root of surface_pvalue(tau) = level by bisection; the surface is monotone in tau.
double invert_pvalue(DeterministicCase c, int n_series, double level) {
  double lo = -30.0, hi = 5.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (*surface_pvalue(mid, c, n_series) < level) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double critical_value_impl(int n_regressors, DeterministicCase c, double level,
                           std::optional<int> sample_size) {
  check_regressors(n_regressors);
  const int idx = level_index(level);
  const int n_series = n_regressors + 1;
  if (auto cv = surface_critical_value(c, n_series, idx, sample_size)) return *cv;
  // No tabulated critical-value surface (no-deterministics residual tests): invert the
  // asymptotic distribution function.
  if (surface_pvalue(0.0, c, n_series)) return invert_pvalue(c, n_series, level);
  throw UnsupportedError("no Dickey-Fuller table for case " + std::string(case_code(c)) +
                         " with " + std::to_string(n_regressors) + " regressors");
}

// Probit of the three tabulated points, quadratic inside and linear outside the bracket.
double three_point_pvalue(double stat, DeterministicCase c, int n_series) {
  std::array<double, 3> x, z;
  for (int i = 0; i < 3; ++i) {
    x[i] = *surface_critical_value(c, n_series, i, std::nullopt);
    z[i] = norm_quantile(kLevels[i]);
  }
  // Newton divided differences.
  const double d01 = (z[1] - z[0]) / (x[1] - x[0]);
  const double d12 = (z[2] - z[1]) / (x[2] - x[1]);
  const double d012 = (d12 - d01) / (x[2] - x[0]);
  auto poly = [&](double t) { return z[0] + d01 * (t - x[0]) + d012 * (t - x[0]) * (t - x[1]); };
  auto slope = [&](double t) { return d01 + d012 * ((t - x[0]) + (t - x[1])); };
  double q;
  if (stat < x[0]) {
    q = z[0] + slope(x[0]) * (stat - x[0]);
  } else if (stat > x[2]) {
    q = z[2] + slope(x[2]) * (stat - x[2]);
  } else {
    q = poly(stat);
  }
  return norm_cdf(q);
}

double asymptotic_pvalue(double stat, DeterministicCase c, int n_series) {
  if (auto p = surface_pvalue(stat, c, n_series)) return *p;
  if (surface_critical_value(c, n_series, 0, std::nullopt)) {
    return three_point_pvalue(stat, c, n_series);
  }
  throw UnsupportedError("no Dickey-Fuller p-value surface for case " +
                         std::string(case_code(c)) + " with " +
                         std::to_string(n_series - 1) + " regressors");
}

}  // namespace

double df_critical_value(int n_regressors, DeterministicCase c, double level,
                         std::optional<int> sample_size) {
  return critical_value_impl(n_regressors, c, level, sample_size);
}

double eg_critical_value(int n_regressors, DeterministicCase c, double level,
                         std::optional<int> sample_size) {
  if (n_regressors < 1) {
    throw UnsupportedError("residual-based critical values need at least one regressor");
  }
  return critical_value_impl(n_regressors, c, level, sample_size);
}

double df_pvalue(double stat, DeterministicCase c, std::optional<int> sample_size,
                 int n_regressors) {
  check_regressors(n_regressors);
  const int n_series = n_regressors + 1;
  if (std::isnan(stat)) throw NumericalError("Dickey-Fuller statistic is NaN");
  if (!sample_size) return asymptotic_pvalue(stat, c, n_series);
  if (*sample_size < 20) {
    throw InsufficientDataError("finite-sample Dickey-Fuller p-values need n >= 20");
  }
  // Map the statistic onto the asymptotic scale. The shift equals the finite-sample minus
  // asymptotic critical value, interpolated linearly between the tabulated levels.
  std::array<double, 3> knot, shift;
  bool have_finite = true;
  for (int i = 0; i < 3; ++i) {
    auto fin = surface_critical_value(c, n_series, i, sample_size);
    auto asy = surface_critical_value(c, n_series, i, std::nullopt);
    if (!fin || !asy) {
      have_finite = false;
      break;
    }
    knot[i] = *fin;
    shift[i] = *fin - *asy;
  }
  if (!have_finite) return asymptotic_pvalue(stat, c, n_series);
  double d;
  if (stat <= knot[0]) {
    d = shift[0];
  } else if (stat >= knot[2]) {
    d = shift[2];
  } else {
    const int i = stat <= knot[1] ? 0 : 1;
    const double w = (stat - knot[i]) / (knot[i + 1] - knot[i]);
    d = shift[i] + w * (shift[i + 1] - shift[i]);
  }
  return asymptotic_pvalue(stat - d, c, n_series);
}

}  // namespace cointsearch
