#include "cointsearch/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <tuple>
#include <map>
#include <set>

#include "cointsearch/errors.hpp"
#include "cointsearch/parallel.hpp"

namespace cointsearch {

std::string merged_name(const std::vector<std::string>& group) {
  std::string out;
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (i) out += '+';
    out += group[i];
  }
  return out;
}

namespace {

// Predictor list after merging; merged predictors sit at their first member's position.
std::vector<std::string> merge_predictors(const std::vector<std::string>& predictors,
                                          const std::vector<std::vector<std::string>>& groups,
                                          std::vector<std::string>& merged_out) {
  std::set<std::string> seen;
  for (const auto& g : groups) {
    if (g.size() < 2) throw ConfigError("a merge group needs at least two predictors");
    for (const auto& m : g) {
      if (std::find(predictors.begin(), predictors.end(), m) == predictors.end()) {
        throw ConfigError("merge group member '" + m + "' is not a predictor");
      }
      if (!seen.insert(m).second) throw ConfigError("merge groups overlap on '" + m + "'");
    }
  }
  std::vector<std::string> out;
  for (const auto& p : predictors) {
    auto group = std::find_if(groups.begin(), groups.end(), [&](const auto& g) {
      return std::find(g.begin(), g.end(), p) != g.end();
    });
    if (group == groups.end()) {
      out.push_back(p);
    } else if (std::find(out.begin(), out.end(), merged_name(*group)) == out.end()) {
      out.push_back(merged_name(*group));
      merged_out.push_back(merged_name(*group));
    }
  }
  return out;
}

std::vector<DeterministicCase> allowed_cases(ModelForm mode,
                                             const std::vector<DeterministicCase>& options) {
  std::vector<DeterministicCase> all = {DeterministicCase::none, DeterministicCase::constant};
  if (mode == ModelForm::levels) all.push_back(DeterministicCase::constant_and_trend);
  if (options.empty()) return all;
  std::vector<DeterministicCase> out;
  for (auto c : all) {
    if (std::find(options.begin(), options.end(), c) != options.end()) out.push_back(c);
  }
  return out;
}

}  // namespace

std::vector<CandidateSpec> enumerate_candidates(
    const std::vector<std::string>& predictors, ModelForm mode,
    const std::vector<std::vector<std::string>>& merge_groups,
    const std::vector<DeterministicCase>& deterministic_options) {
  if (predictors.empty()) throw ConfigError("no predictors to search over");
  std::vector<std::string> required;
  const std::vector<std::string> preds = merge_predictors(predictors, merge_groups, required);
  const std::size_t k = preds.size();
  if (k > 20) throw UnsupportedError("exhaustive search is limited to 20 predictors");

  std::vector<std::vector<std::size_t>> subsets;
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (1u << i)) idx.push_back(i);
    }
    subsets.push_back(std::move(idx));
  }
  std::sort(subsets.begin(), subsets.end());

  const auto cases = allowed_cases(mode, deterministic_options);
  std::vector<CandidateSpec> out;
  for (const auto& idx : subsets) {
    if (mode == ModelForm::levels && idx.empty()) continue;
    CandidateSpec base;
    base.form = mode;
    for (auto i : idx) base.subset.push_back(preds[i]);
    const bool has_required = std::all_of(required.begin(), required.end(), [&](const auto& r) {
      return std::find(base.subset.begin(), base.subset.end(), r) != base.subset.end();
    });
    if (!has_required) continue;
    for (auto c : cases) {
      if (mode == ModelForm::differences && idx.empty() && c == DeterministicCase::none) continue;
      base.deterministic = c;
      base.phi_free = false;
      out.push_back(base);
      if (mode == ModelForm::levels) {
        base.phi_free = true;
        out.push_back(base);
      }
    }
  }
  return out;
}

std::pair<double, double> score(double ssr, int n_params, int n_obs) {
  if (!(ssr > 0.0)) throw DegenerateError("perfect fit: information criteria undefined for SSR = 0");
  if (n_obs < 1) throw InsufficientDataError("information criteria need at least one observation");
  const double n = n_obs;
  const double log_ssr = std::log(ssr);
  return {log_ssr + 2.0 * n_params / n, log_ssr + n_params * std::log(n) / n};
}

std::vector<double> evidence_ratios(const std::vector<double>& scores) {
  if (scores.empty()) throw ConfigError("evidence ratios of an empty cohort");
  for (double s : scores) {
    if (!std::isfinite(s)) throw NumericalError("evidence ratio of a non-finite score");
  }
  const double best = *std::min_element(scores.begin(), scores.end());
  std::vector<double> out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back(std::exp(-(s - best) / 2.0));
  return out;
}

void SearchConfig::validate() const {
  if (predictors.empty()) throw ConfigError("no predictors configured");
  if (std::find(predictors.begin(), predictors.end(), target) != predictors.end()) {
    throw ConfigError("target '" + target + "' is also listed as a predictor");
  }
  std::set<std::string> uniq(predictors.begin(), predictors.end());
  if (uniq.size() != predictors.size()) throw ConfigError("duplicate predictor names");
  for (auto c : deterministic_options) {
    if (mode == ModelForm::differences && c == DeterministicCase::constant_and_trend) {
      throw ConfigError("differences mode allows only none and constant");
    }
  }
  screen.validate();
}

double RankedModel::ssr() const {
  return std::visit([](const auto& e) {
    if constexpr (std::is_same_v<std::decay_t<decltype(e)>, ECEstimate>) return e.ssr;
    else return e.ols.ssr;
  }, estimate);
}

int RankedModel::n_obs() const {
  return std::visit([](const auto& e) {
    if constexpr (std::is_same_v<std::decay_t<decltype(e)>, ECEstimate>) return e.n_obs;
    else return e.ols.n_obs;
  }, estimate);
}

int RankedModel::n_params() const { return spec.n_params(); }

AlignedDataset prepare_search_data(const AlignedDataset& data, const SearchConfig& config) {
  std::vector<TimeSeries> cols;
  cols.push_back(data.column(config.target));
  for (const auto& p : config.predictors) cols.push_back(data.column(p));
  AlignedDataset out(data.first_year(), std::move(cols), config.target);
  for (const auto& g : config.merge_groups) {
    std::vector<double> sum(data.length(), 0.0);
    for (const auto& m : g) {
      const auto& s = data.column(m);
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += s[i];
    }
    out.add_column(TimeSeries(merged_name(g), data.first_year(), std::move(sum)));
  }
  return out;
}

std::vector<CandidateOutcome> evaluate_candidates(const std::vector<CandidateSpec>& specs,
                                                  const AlignedDataset& data,
                                                  const ScreenOptions& options, int threads) {
  // One EG screen per (subset, deterministic) pair, shared by the phi twins.
  std::map<std::string, std::size_t> key_index;
  std::vector<std::size_t> spec_key(specs.size(), SIZE_MAX);
  std::vector<const CandidateSpec*> key_spec;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].form != ModelForm::levels) continue;
    CandidateSpec twin = specs[i];
    twin.phi_free = false;
    auto [it, inserted] = key_index.emplace(twin.id(), key_spec.size());
    if (inserted) key_spec.push_back(&specs[i]);
    spec_key[i] = it->second;
  }
  std::vector<std::optional<EgScreenResult>> screens(key_spec.size());
  parallel_for(key_spec.size(), threads, [&](std::size_t k) {
    try {
      screens[k] = eg_step1(*key_spec[k], data, options.eg_level, options.eg_augmentation_lags);
    } catch (const Error&) {
      // Left empty; check_candidate re-raises and records the failure.
    }
  });

  std::vector<CandidateOutcome> out(specs.size());
  parallel_for(specs.size(), threads, [&](std::size_t i) {
    const EgScreenResult* shared = nullptr;
    if (spec_key[i] != SIZE_MAX && screens[spec_key[i]]) shared = &*screens[spec_key[i]];
    out[i] = check_candidate(specs[i], data, options, shared);
  });
  return out;
}

namespace {

// Criterion first, then fewer parameters, then spec id.
template <class Key>
auto ranking_order(Key key) {
  return [key](const RankedModel& a, const RankedModel& b) {
    const double ka = key(a), kb = key(b);
    if (ka != kb) return ka < kb;
    if (a.n_params() != b.n_params()) return a.n_params() < b.n_params();
    return a.spec.id() < b.spec.id();
  };
}

}  // namespace

std::vector<RankedModel> rank_survivors(const std::vector<CandidateOutcome>& outcomes) {
  std::vector<RankedModel> ranked;
  for (const auto& o : outcomes) {
    if (!o.survived) continue;
    RankedModel m;
    m.spec = o.spec;
    if (o.estimate) {
      m.estimate = *o.estimate;
    } else {
      m.estimate = *o.short_run;
    }
    if (o.bg) m.bg_p_value = o.bg->p_value;
    if (o.eg) {
      m.eg_statistic = o.eg->df_statistic;
      m.eg_critical_value = o.eg->critical_value;
    }
    std::tie(m.scores.aic, m.scores.bic) = score(m.ssr(), m.n_params(), m.n_obs());
    ranked.push_back(std::move(m));
  }
  if (ranked.empty()) return ranked;

  auto by_aic = ranking_order([](const RankedModel& m) { return m.scores.aic; });
  auto by_bic = ranking_order([](const RankedModel& m) { return m.scores.bic; });

  std::sort(ranked.begin(), ranked.end(), by_aic);
  for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i].scores.aic_rank = static_cast<int>(i + 1);
  std::sort(ranked.begin(), ranked.end(), by_bic);
  for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i].scores.bic_rank = static_cast<int>(i + 1);

  std::vector<double> aic, bic;
  for (const auto& m : ranked) {
    aic.push_back(m.scores.aic);
    bic.push_back(m.scores.bic);
  }
  const auto er_aic = evidence_ratios(aic);
  const auto er_bic = evidence_ratios(bic);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    ranked[i].scores.er_aic = er_aic[i];
    ranked[i].scores.er_bic = er_bic[i];
  }
  return ranked;
}

SearchReport run_search(const AlignedDataset& data, const SearchConfig& config) {
  config.validate();
  const AlignedDataset work = prepare_search_data(data, config);
  const auto specs = enumerate_candidates(config.predictors, config.mode, config.merge_groups,
                                          config.deterministic_options);
  const auto outcomes = evaluate_candidates(specs, work, config.screen,
                                            resolve_threads(config.threads));
  SearchReport report;
  report.config = config;
  report.n_candidates = static_cast<int>(specs.size());
  report.first_year = work.first_year();
  report.last_year = work.last_year();
  report.ranked = rank_survivors(outcomes);
  for (const auto& o : outcomes) {
    if (!o.survived) report.discards.push_back({o.spec.id(), *o.reason, o.detail});
  }
  return report;
}

}  // namespace cointsearch
