#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cointsearch {

/// Deterministic terms of a regression: nothing, a constant, or a constant and a linear trend.
enum class DeterministicCase { none, constant, constant_and_trend };

/// Short code used in tables and ids: "n", "c", "ct".
std::string_view case_code(DeterministicCase c);
DeterministicCase parse_case(std::string_view code);

inline int deterministic_count(DeterministicCase c) {
  return c == DeterministicCase::none ? 0 : (c == DeterministicCase::constant ? 1 : 2);
}

enum class ModelForm { levels, differences };

/// One candidate model.
///
/// Levels form: y_t = [c + delta*t +] sum_i beta_i x_it + eta_t with eta an AR(1) in phi
/// (phi_free) or white noise (phi = 0). Differences form: dy_t = [c +] sum_i beta_i dx_it + eps_t.
/// The subset holds predictor column names in the dataset's predictor order.
struct CandidateSpec {
  ModelForm form = ModelForm::levels;
  std::vector<std::string> subset;
  DeterministicCase deterministic = DeterministicCase::constant;
  bool phi_free = false;

  /// Stable identifier, e.g. "L|c|x3,x5|phi" or "D|n|x3".
  std::string id() const;

  /// Number of estimated parameters (betas, deterministics, phi).
  int n_params() const;

  /// Throws ConfigError when the form/subset/deterministic/phi combination is not allowed.
  void validate() const;

  bool operator==(const CandidateSpec&) const = default;
};

/// Inverse of CandidateSpec::id(); throws ConfigError on malformed ids.
CandidateSpec parse_spec_id(std::string_view id);

}  // namespace cointsearch
