#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cointsearch/model.hpp"
#include "cointsearch/regress.hpp"
#include "cointsearch/series.hpp"

namespace cointsearch {

/// Deterministic specification of the VEC model
///   (a) dz_t = alpha [gamma + beta' z_{t-1}] + mu_t
///   (b) dz_t = alpha [gamma + delta t + beta' z_{t-1}] + alpha_perp delta' + mu_t
enum class VecCase { restricted_constant, restricted_trend };

std::string_view vec_case_code(VecCase c);  // "a" / "b"
VecCase parse_vec_case(std::string_view code);

struct JohansenOptions {
  double level = 0.05;
  int short_run_lags = 0;          ///< lagged dz terms; 0 reproduces the minimal VEC form
  std::optional<int> rank;         ///< estimate alpha/beta at this rank instead of the selected one
};

struct VecResult {
  int dimension = 0;
  VecCase vec_case = VecCase::restricted_constant;
  std::vector<std::string> variables;
  std::string target;  ///< target of the input dataset; its coefficient is normalised in ec_consistency
  int n_obs = 0;
  double level = 0.05;

  Eigen::VectorXd eigenvalues;  ///< descending, length d
  Eigen::VectorXd trace_stats;  ///< index r: H0 rank <= r
  Eigen::VectorXd max_eig_stats;
  Eigen::VectorXd trace_pvalues;
  Eigen::VectorXd max_eig_pvalues;
  Eigen::VectorXd trace_critical;  ///< at `level`
  Eigen::VectorXd max_eig_critical;
  int selected_rank = 0;  ///< sequential trace testing
  int max_eig_rank = 0;   ///< sequential max-eigenvalue testing
  int rank = 0;           ///< rank at which alpha/beta below are estimated

  Eigen::MatrixXd alpha;  ///< d x rank
  Eigen::MatrixXd beta;   ///< d x rank, normalised so beta' S11 beta = I
  Eigen::VectorXd gamma;  ///< rank constants inside the EC term
  std::optional<Eigen::VectorXd> delta;        ///< case b: trend inside the EC term
  std::optional<Eigen::VectorXd> delta_prime;  ///< case b: d - rank drifts along alpha_perp
  Eigen::MatrixXd alpha_perp;                  ///< d x (d - rank), orthonormal columns
  Eigen::MatrixXd omega;

  /// Cointegrating vectors augmented with their deterministic rows: (beta_i; gamma_i[; delta_i]).
  Eigen::MatrixXd augmented_beta() const;
};

/// Reduced-rank regression of the lag-1 VEC on every column of `z` (in column order).
/// The trend regressor is t = year - first year + 1 of the dz_t row.
VecResult johansen_test(const AlignedDataset& z, VecCase vec_case,
                        const JohansenOptions& options = {});

/// Upper-tail p-value and critical value of the rank statistics for m = d - r common trends.
double johansen_trace_pvalue(double stat, VecCase c, int m);
double johansen_max_eig_pvalue(double stat, VecCase c, int m);
double johansen_trace_critical(VecCase c, int m, double level);
double johansen_max_eig_critical(VecCase c, int m, double level);

/// Draws of the asymptotic trace and max-eigenvalue statistics under m common trends,
/// from a `steps`-step discretisation of the Brownian functionals.
struct JohansenNullDraws {
  std::vector<double> trace;
  std::vector<double> max_eig;
};
JohansenNullDraws simulate_johansen_null(VecCase c, int m, int steps, int reps,
                                         std::uint64_t seed);

struct ConsistencyResult {
  Eigen::VectorXd xi;                 ///< weights on the cointegrating vectors
  Eigen::VectorXd target;             ///< EC-term coefficients (1, -beta..., -c[, -delta]) over (z, 1[, t])
  Eigen::VectorXd reconstructed_ec;   ///< augmented_beta * xi
  Eigen::VectorXd std_errors;         ///< 0 where the coefficient is fixed (target, excluded variables)
  bool within_bounds = false;
};

/// Looks for xi with augmented_beta * xi equal to the EC term of `ec` within one standard
/// error per coefficient. The coefficient of the target and the zeros of variables outside
/// the EC model are imposed exactly; the remaining coefficients are fitted by least squares
/// weighted with the EC estimate's standard errors.
ConsistencyResult ec_consistency(const VecResult& vec, const ECEstimate& ec,
                                 const CandidateSpec& ec_spec);

}  // namespace cointsearch
