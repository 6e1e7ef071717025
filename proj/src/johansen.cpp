#include "cointsearch/johansen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string_view>
#include <tuple>

#include "cointsearch/errors.hpp"
#include "cointsearch/parallel.hpp"
#include "cointsearch/rng.hpp"

namespace cointsearch {

namespace tables {
extern const std::string_view johansen_text;
}

std::string_view vec_case_code(VecCase c) {
  return c == VecCase::restricted_constant ? "a" : "b";
}

VecCase parse_vec_case(std::string_view code) {
  if (code == "a" || code == "restricted_constant") return VecCase::restricted_constant;
  if (code == "b" || code == "restricted_trend") return VecCase::restricted_trend;
  throw ConfigError("unknown VEC case '" + std::string(code) + "' (expected a or b)");
}

Eigen::MatrixXd VecResult::augmented_beta() const {
  const Eigen::Index extra = delta ? 2 : 1;
  Eigen::MatrixXd out(beta.rows() + extra, beta.cols());
  out.topRows(beta.rows()) = beta;
  out.row(beta.rows()) = gamma.transpose();
  if (delta) out.row(beta.rows() + 1) = delta->transpose();
  return out;
}

namespace {

// Quantiles of each null distribution on a common grid of cumulative probabilities.
struct QuantileTable {
  std::vector<double> probs;
  std::map<std::tuple<VecCase, bool, int>, std::vector<double>> rows;  // (case, trace?, m)
};

QuantileTable parse_johansen(std::string_view text) {
  QuantileTable t;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    std::vector<double> values;
    if (head == "probs") {
      for (double v; ls >> v;) t.probs.push_back(v);
      continue;
    }
    std::string stat;
    int m = 0;
    ls >> stat >> m;
    for (double v; ls >> v;) values.push_back(v);
    if (!ls.eof() || (stat != "trace" && stat != "maxeig") || m < 1 ||
        values.size() != t.probs.size() || values.empty()) {
      throw ParseError("malformed Johansen table line " + std::to_string(line_no));
    }
    t.rows[{parse_vec_case(head), stat == "trace", m}] = std::move(values);
  }
  return t;
}

const QuantileTable& johansen_tables() {
  static const QuantileTable t = parse_johansen(tables::johansen_text);
  return t;
}

const std::vector<double>& quantiles_for(VecCase c, bool trace, int m) {
  const auto& t = johansen_tables();
  auto it = t.rows.find({c, trace, m});
  if (it == t.rows.end()) {
    throw UnsupportedError("Johansen tables cover 1 to 6 common trends, got " + std::to_string(m));
  }
  return it->second;
}

double upper_tail(double stat, VecCase c, bool trace, int m) {
  const auto& probs = johansen_tables().probs;
  const auto& q = quantiles_for(c, trace, m);
  if (std::isnan(stat)) return stat;
  if (stat <= q.front()) {
    return 1.0 - probs.front() * std::max(stat, 0.0) / q.front();
  }
  if (stat >= q.back()) {
    // Exponential tail fitted to the last two quantiles.
    const std::size_t k = q.size();
    const double scale = (q[k - 1] - q[k - 2]) / std::log((1.0 - probs[k - 2]) / (1.0 - probs[k - 1]));
    return (1.0 - probs.back()) * std::exp(-(stat - q.back()) / scale);
  }
  const auto hi = static_cast<std::size_t>(std::upper_bound(q.begin(), q.end(), stat) - q.begin());
  const double w = (stat - q[hi - 1]) / (q[hi] - q[hi - 1]);
  return 1.0 - (probs[hi - 1] + w * (probs[hi] - probs[hi - 1]));
}

double critical(VecCase c, bool trace, int m, double level) {
  const auto& probs = johansen_tables().probs;
  const auto& q = quantiles_for(c, trace, m);
  const double p = 1.0 - level;
  if (!(p >= probs.front() && p <= probs.back())) {
    throw UnsupportedError("Johansen critical values are tabulated for levels in [" +
                           std::to_string(1.0 - probs.back()) + ", " +
                           std::to_string(1.0 - probs.front()) + "]");
  }
  const auto hi = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lower_bound(probs.begin(), probs.end(), p) - probs.begin()));
  const double w = (p - probs[hi - 1]) / (probs[hi] - probs[hi - 1]);
  return q[hi - 1] + w * (q[hi] - q[hi - 1]);
}

// Residuals of the columns of z after least squares on `on` (unchanged when `on` is empty).
Eigen::MatrixXd partial_out(const Eigen::MatrixXd& z, const Eigen::MatrixXd& on) {
  if (on.cols() == 0) return z;
  return z - on * on.colPivHouseholderQr().solve(z);
}

void require_well_conditioned(const Eigen::MatrixXd& s, const char* what) {
  const Eigen::VectorXd d = s.diagonal().cwiseSqrt();
  if ((d.array() <= 0.0).any()) {
    throw NumericalError(std::string(what) + " has a zero-variance column");
  }
  const Eigen::MatrixXd scaled = d.cwiseInverse().asDiagonal() * s * d.cwiseInverse().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > hi * 1e-12)) {
    std::ostringstream msg;
    msg << what << " is near singular (scaled eigenvalues " << lo << " .. " << hi << ")";
    throw NumericalError(msg.str());
  }
}

int sequential_rank(const Eigen::VectorXd& pvalues, double level) {
  const int d = static_cast<int>(pvalues.size());
  for (int r = 0; r < d; ++r) {
    if (pvalues(r) > level) return r;
  }
  return d - 1;
}

}  // namespace

double johansen_trace_pvalue(double stat, VecCase c, int m) { return upper_tail(stat, c, true, m); }
double johansen_max_eig_pvalue(double stat, VecCase c, int m) { return upper_tail(stat, c, false, m); }
double johansen_trace_critical(VecCase c, int m, double level) { return critical(c, true, m, level); }
double johansen_max_eig_critical(VecCase c, int m, double level) { return critical(c, false, m, level); }

VecResult johansen_test(const AlignedDataset& z, VecCase vec_case, const JohansenOptions& options) {
  const int d = static_cast<int>(z.columns().size());
  if (d < 2 || d > 6) throw UnsupportedError("Johansen test needs 2 to 6 variables, got " + std::to_string(d));
  if (!(options.level > 0.0 && options.level < 1.0)) throw ConfigError("Johansen level must lie in (0, 1)");
  if (options.short_run_lags < 0) throw ConfigError("VEC lag count must be non-negative");
  const int lags = options.short_run_lags;
  const int len = static_cast<int>(z.length());
  if (len < 5 * d || len - 1 - lags <= 2 * d + lags * d + 1) {
    throw InsufficientDataError("sample of " + std::to_string(len) + " years too short for a " +
                                std::to_string(d) + "-variable VEC");
  }
  const bool trend = vec_case == VecCase::restricted_trend;
  const int n = len - 1 - lags;

  Eigen::MatrixXd levels(len, d);
  for (int j = 0; j < d; ++j) {
    const auto v = z.columns()[j].values();
    for (int i = 0; i < len; ++i) levels(i, j) = v[i];
  }
  Eigen::MatrixXd z0(n, d), z1(n, d + 1), z2(n, lags * d + (trend ? 1 : 0));
  for (int row = 0; row < n; ++row) {
    const int i = row + 1 + lags;
    z0.row(row) = levels.row(i) - levels.row(i - 1);
    z1.row(row).head(d) = levels.row(i - 1);
    z1(row, d) = trend ? static_cast<double>(i + 1) : 1.0;
    int col = 0;
    if (trend) z2(row, col++) = 1.0;
    for (int j = 1; j <= lags; ++j, col += d) {
      z2.row(row).segment(col, d) = levels.row(i - j) - levels.row(i - j - 1);
    }
  }
  const Eigen::MatrixXd r0 = partial_out(z0, z2);
  const Eigen::MatrixXd r1 = partial_out(z1, z2);
  const Eigen::MatrixXd s00 = r0.transpose() * r0 / n;
  const Eigen::MatrixXd s11 = r1.transpose() * r1 / n;
  const Eigen::MatrixXd s01 = r0.transpose() * r1 / n;
  require_well_conditioned(s00, "S00");
  require_well_conditioned(s11, "S11");

  const Eigen::MatrixXd a = s01.transpose() * s00.llt().solve(s01);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
      0.5 * (a + a.transpose()), s11, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (ges.info() != Eigen::Success) throw NumericalError("Johansen eigenproblem failed to converge");

  VecResult out;
  out.dimension = d;
  out.vec_case = vec_case;
  out.variables = z.names();
  out.target = z.target_name();
  out.n_obs = n;
  out.level = options.level;
  out.eigenvalues.resize(d);
  Eigen::MatrixXd vectors(d + 1, d);
  for (int k = 0; k < d; ++k) {
    const double lambda = ges.eigenvalues()(d - k);
    if (!(lambda < 1.0)) throw NumericalError("Johansen eigenvalue >= 1: the system fits exactly");
    out.eigenvalues(k) = std::max(lambda, 0.0);
    vectors.col(k) = ges.eigenvectors().col(d - k);
  }

  out.trace_stats.resize(d);
  out.max_eig_stats.resize(d);
  out.trace_pvalues.resize(d);
  out.max_eig_pvalues.resize(d);
  out.trace_critical.resize(d);
  out.max_eig_critical.resize(d);
  double tail = 0.0;
  for (int r = d - 1; r >= 0; --r) {
    out.max_eig_stats(r) = -n * std::log1p(-out.eigenvalues(r));
    tail += out.max_eig_stats(r);
    out.trace_stats(r) = tail;
    const int m = d - r;
    out.trace_pvalues(r) = johansen_trace_pvalue(out.trace_stats(r), vec_case, m);
    out.max_eig_pvalues(r) = johansen_max_eig_pvalue(out.max_eig_stats(r), vec_case, m);
    out.trace_critical(r) = johansen_trace_critical(vec_case, m, options.level);
    out.max_eig_critical(r) = johansen_max_eig_critical(vec_case, m, options.level);
  }
  out.selected_rank = sequential_rank(out.trace_pvalues, options.level);
  out.max_eig_rank = sequential_rank(out.max_eig_pvalues, options.level);

  const int r = options.rank.value_or(out.selected_rank);
  if (r < 0 || r > d - 1) throw ConfigError("VEC rank must lie in [0, " + std::to_string(d - 1) + "]");
  out.rank = r;
  const Eigen::MatrixXd vr = vectors.leftCols(r);
  out.alpha = s01 * vr;
  out.beta = vr.topRows(d);
  out.omega = s00 - out.alpha * out.alpha.transpose();
  out.omega = 0.5 * (out.omega + out.omega.transpose());

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(out.alpha);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  out.alpha_perp = q.rightCols(d - r);

  if (!trend) {
    out.gamma = vr.row(d).transpose();
    return out;
  }
  out.delta = vr.row(d).transpose();
  // Unrestricted constant mu0 given the estimated EC terms, then mu0 = alpha gamma + alpha_perp delta'.
  const Eigen::MatrixXd resid = z0 - z1 * vr * out.alpha.transpose();
  const Eigen::MatrixXd coef = z2.colPivHouseholderQr().solve(resid);
  const Eigen::VectorXd mu0 = coef.row(0).transpose();
  if (r > 0) {
    out.gamma = (out.alpha.transpose() * out.alpha).ldlt().solve(out.alpha.transpose() * mu0);
  } else {
    out.gamma = Eigen::VectorXd(0);
  }
  out.delta_prime = out.alpha_perp.transpose() * mu0;
  return out;
}

JohansenNullDraws simulate_johansen_null(VecCase c, int m, int steps, int reps, std::uint64_t seed) {
  if (m < 1 || steps < 10 || reps < 1) throw ConfigError("invalid Johansen simulation settings");
  const bool trend = c == VecCase::restricted_trend;
  const int k = m + 1;
  JohansenNullDraws out;
  out.trace.resize(reps);
  out.max_eig.resize(reps);
  parallel_for(static_cast<std::size_t>(reps), resolve_threads(), [&](std::size_t rep) {
    auto gen = substream(seed, rep);
    std::normal_distribution<double> normal;
    const double scale = 1.0 / std::sqrt(static_cast<double>(steps));
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m), f(k), e(m), fsum = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd mm = Eigen::MatrixXd::Zero(k, k), nn = Eigen::MatrixXd::Zero(k, m);
    for (int s = 0; s < steps; ++s) {
      f.head(m) = w;
      f(m) = trend ? static_cast<double>(s) / steps : 1.0;
      for (int j = 0; j < m; ++j) e(j) = normal(gen) * scale;
      mm.selfadjointView<Eigen::Lower>().rankUpdate(f);
      nn.noalias() += f * e.transpose();
      fsum += f;
      w += e;
    }
    mm = mm.selfadjointView<Eigen::Lower>();
    mm /= steps;
    if (trend) {
      const Eigen::VectorXd fbar = fsum / steps;
      mm -= fbar * fbar.transpose();
      nn -= fbar * w.transpose();
    }
    const Eigen::MatrixXd qm = nn.transpose() * mm.ldlt().solve(nn);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (qm + qm.transpose()), Eigen::EigenvaluesOnly);
    out.trace[rep] = es.eigenvalues().sum();
    out.max_eig[rep] = es.eigenvalues().maxCoeff();
  });
  return out;
}

ConsistencyResult ec_consistency(const VecResult& vec, const ECEstimate& ec,
                                 const CandidateSpec& ec_spec) {
  if (vec.rank < 1) throw DegenerateError("VEC rank is 0: there is no cointegration space");
  if (ec_spec.form != ModelForm::levels) throw ConfigError("ec_consistency needs a levels-form model");
  const DeterministicCase expected = vec.vec_case == VecCase::restricted_constant
                                         ? DeterministicCase::constant
                                         : DeterministicCase::constant_and_trend;
  if (ec_spec.deterministic != expected) {
    throw ConfigError("VEC case " + std::string(vec_case_code(vec.vec_case)) +
                      " needs an EC model with deterministic terms '" +
                      std::string(case_code(expected)) + "'");
  }
  if (std::find(vec.variables.begin(), vec.variables.end(), vec.target) == vec.variables.end()) {
    throw ConfigError("VEC variables do not include the target '" + vec.target + "'");
  }
  for (const auto& p : ec.predictors) {
    if (std::find(vec.variables.begin(), vec.variables.end(), p) == vec.variables.end()) {
      throw ConfigError("EC predictor '" + p + "' is not a VEC variable");
    }
  }

  const Eigen::MatrixXd basis = vec.augmented_beta();
  const Eigen::Index rows = basis.rows();
  ConsistencyResult out;
  out.target = Eigen::VectorXd::Zero(rows);
  out.std_errors = Eigen::VectorXd::Zero(rows);
  for (int j = 0; j < vec.dimension; ++j) {
    const auto& name = vec.variables[j];
    if (name == vec.target) {
      out.target(j) = 1.0;
      continue;
    }
    auto it = std::find(ec.predictors.begin(), ec.predictors.end(), name);
    if (it == ec.predictors.end()) continue;
    out.target(j) = -ec.betas(it - ec.predictors.begin());
    out.std_errors(j) = ec.std_error(name).value_or(0.0);
  }
  out.target(vec.dimension) = -ec.constant.value_or(0.0);
  out.std_errors(vec.dimension) = ec.std_error("c").value_or(0.0);
  if (vec.delta) {
    out.target(vec.dimension + 1) = -ec.trend.value_or(0.0);
    out.std_errors(vec.dimension + 1) = ec.std_error("trend").value_or(0.0);
  }

  std::vector<Eigen::Index> hard, soft;
  for (Eigen::Index i = 0; i < rows; ++i) {
    (out.std_errors(i) > 0.0 && std::isfinite(out.std_errors(i)) ? soft : hard).push_back(i);
  }
  const Eigen::Index r = basis.cols();
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(r);
  Eigen::MatrixXd null_space = Eigen::MatrixXd::Identity(r, r);
  if (!hard.empty()) {
    Eigen::MatrixXd h(hard.size(), r);
    Eigen::VectorXd hv(hard.size());
    for (std::size_t i = 0; i < hard.size(); ++i) {
      h.row(i) = basis.row(hard[i]);
      hv(i) = out.target(hard[i]);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-12);
    xi = svd.solve(hv);
    null_space = svd.matrixV().rightCols(r - svd.rank());
  }
  if (!soft.empty() && null_space.cols() > 0) {
    Eigen::MatrixXd s(soft.size(), null_space.cols());
    Eigen::VectorXd sv(soft.size());
    for (std::size_t i = 0; i < soft.size(); ++i) {
      const double w = 1.0 / out.std_errors(soft[i]);
      s.row(i) = w * basis.row(soft[i]) * null_space;
      sv(i) = w * (out.target(soft[i]) - basis.row(soft[i]).dot(xi));
    }
    xi += null_space * s.colPivHouseholderQr().solve(sv);
  }
  out.xi = xi;
  out.reconstructed_ec = basis * xi;

  out.within_bounds = true;
  for (Eigen::Index i : hard) {
    const double tol = 1e-8 * std::max(1.0, std::abs(out.target(i)));
    if (!(std::abs(out.reconstructed_ec(i) - out.target(i)) <= tol)) out.within_bounds = false;
  }
  for (Eigen::Index i : soft) {
    if (!(std::abs(out.reconstructed_ec(i) - out.target(i)) <= out.std_errors(i))) out.within_bounds = false;
  }
  return out;
}

}  // namespace cointsearch
