#include "cointsearch/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cointsearch/dataset_io.hpp"
#include "cointsearch/errors.hpp"
#include "cointsearch/forecast.hpp"
#include "cointsearch/generator.hpp"
#include "cointsearch/johansen.hpp"
#include "cointsearch/report.hpp"

namespace cointsearch {

namespace {

struct CommonOptions {
  std::string data_path;
  std::string format = "table";
  std::string output;
  std::string target;
  std::vector<std::string> merge;
  int threads = 0;
};

struct SearchOptions {
  std::vector<std::string> predictors;
  std::string mode = "levels";
  std::vector<std::string> deterministic;
  double eg_level = 0.05;
  int eg_lags = 0;
  double bglm_level = 0.20;
  int bglm_lags = 2;
  std::string bg_design = "jacobian";
  double nls_tol = 1e-4;
  int nls_max_iter = 500;
  std::uint64_t seed = 0;
};

struct UnitRootOptions {
  std::vector<std::string> variables;
  std::optional<int> max_lag;
  int difference = 0;
};

struct JohansenCliOptions {
  std::vector<std::string> variables;
  std::string vec_case = "a";
  double level = 0.05;
  int lags = 0;
  std::optional<int> rank;
  std::string model;
};

struct ForecastCliOptions {
  std::vector<std::string> models;
  std::optional<int> train_end;
  std::optional<int> horizon_end;
  std::vector<std::string> splits;
  int reps = 10000;
  std::uint64_t seed = 0;
  bool no_uncertainty = false;
  std::string band = "sd";
};

void add_common(CLI::App* sub, CommonOptions& o, bool with_formats_csv = false) {
  sub->add_option("--data", o.data_path, "CSV file with a 'year' column and one column per series")->required();
  sub->add_option("--format", o.format, "report format")
      ->check(with_formats_csv ? CLI::IsMember({"table", "json", "csv"}) : CLI::IsMember({"table", "json"}));
  sub->add_option("--output", o.output, "write the report to this file instead of stdout");
  sub->add_option("--target", o.target, "target column (default: first data column)");
  sub->add_option("--merge", o.merge, "merge group, members joined by '+', e.g. x2+x3 (repeatable)");
  sub->add_option("--threads", o.threads, "worker threads (default: COINTSEARCH_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
}

std::vector<std::vector<std::string>> parse_merge_groups(const std::vector<std::string>& specs) {
  std::vector<std::vector<std::string>> groups;
  for (const auto& s : specs) {
    std::vector<std::string> g;
    std::size_t start = 0;
    while (true) {
      const auto plus = s.find('+', start);
      g.push_back(s.substr(start, plus - start));
      if (g.back().empty()) throw ConfigError("malformed merge group '" + s + "'");
      if (plus == std::string::npos) break;
      start = plus + 1;
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

AlignedDataset load_with_target(const CommonOptions& o) {
  AlignedDataset data = load_dataset(o.data_path);
  if (!o.target.empty()) {
    if (!data.has(o.target)) throw ConfigError("target column '" + o.target + "' not in the data");
    data.set_target(o.target);
  }
  return data;
}

// Adds a summed column for every merge group.
void add_merged(AlignedDataset& data, const std::vector<std::vector<std::string>>& groups) {
  for (const auto& g : groups) {
    const std::string name = merged_name(g);
    if (data.has(name)) continue;
    std::vector<double> sum(data.length(), 0.0);
    for (const auto& m : g) {
      if (!data.has(m)) throw ConfigError("merge group member '" + m + "' not in the data");
      const auto& s = data.column(m);
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += s[i];
    }
    data.add_column(TimeSeries(name, data.first_year(), std::move(sum)));
  }
}

std::vector<std::string> default_predictors(const AlignedDataset& data) {
  std::vector<std::string> out;
  for (const auto& n : data.names()) {
    if (n != data.target_name()) out.push_back(n);
  }
  return out;
}

void emit(const std::string& text, const CommonOptions& o, std::ostream& out) {
  if (o.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.output, std::ios::binary);
  if (!f) throw DataError("cannot write report to '" + o.output + "'");
  f << text;
  if (!f) throw DataError("failed writing report to '" + o.output + "'");
}

int run_unitroot(const CommonOptions& o, const UnitRootOptions& u, std::ostream& out) {
  const AlignedDataset data = load_with_target(o);
  const auto vars = u.variables.empty() ? data.names() : u.variables;
  for (const auto& v : vars) {
    if (!data.has(v)) throw ConfigError("variable '" + v + "' not in the data");
  }
  const auto rows = unit_root_table(data, vars, u.max_lag, u.difference);
  emit(o.format == "json" ? unit_root_json(rows, u.difference) : unit_root_text(rows, u.difference), o, out);
  return kExitOk;
}

int run_search_cmd(const CommonOptions& o, const SearchOptions& s, std::ostream& out, std::ostream& err) {
  const AlignedDataset data = load_with_target(o);
  SearchConfig cfg;
  cfg.target = data.target_name();
  cfg.predictors = s.predictors.empty() ? default_predictors(data) : s.predictors;
  for (const auto& p : cfg.predictors) {
    if (!data.has(p)) throw ConfigError("predictor '" + p + "' not in the data");
  }
  cfg.mode = s.mode == "levels" ? ModelForm::levels : ModelForm::differences;
  cfg.merge_groups = parse_merge_groups(o.merge);
  for (const auto& d : s.deterministic) cfg.deterministic_options.push_back(parse_case(d));
  cfg.screen.eg_level = s.eg_level;
  cfg.screen.eg_augmentation_lags = s.eg_lags;
  cfg.screen.bglm_level = s.bglm_level;
  cfg.screen.bglm_lags = s.bglm_lags;
  cfg.screen.bg_design = s.bg_design == "jacobian" ? BgDesign::jacobian : BgDesign::regressors;
  cfg.screen.nls.tol = s.nls_tol;
  cfg.screen.nls.max_iter = s.nls_max_iter;
  cfg.seed = s.seed;
  cfg.threads = o.threads;
  const SearchReport report = run_search(data, cfg);
  if (report.ranked.empty()) err << "warning: no candidate survived the screens\n";
  emit(o.format == "json" ? search_json(report) : search_text(report), o, out);
  return kExitOk;
}

int run_johansen_cmd(const CommonOptions& o, const JohansenCliOptions& j, std::ostream& out) {
  AlignedDataset data = load_with_target(o);
  add_merged(data, parse_merge_groups(o.merge));
  std::vector<std::string> vars = j.variables;
  if (vars.empty()) {
    vars.push_back(data.target_name());
    for (const auto& p : default_predictors(data)) vars.push_back(p);
  }
  std::vector<TimeSeries> cols;
  for (const auto& v : vars) {
    if (!data.has(v)) throw ConfigError("variable '" + v + "' not in the data");
    cols.push_back(data.column(v));
  }
  const std::string target = o.target.empty() ? vars.front() : o.target;
  const AlignedDataset z(data.first_year(), std::move(cols), target);

  JohansenOptions opts;
  opts.level = j.level;
  opts.short_run_lags = j.lags;
  opts.rank = j.rank;
  const VecResult vec = johansen_test(z, parse_vec_case(j.vec_case), opts);

  std::optional<ConsistencyReport> check;
  if (!j.model.empty()) {
    const CandidateSpec spec = parse_spec_id(j.model);
    if (spec.form != ModelForm::levels) throw ConfigError("EC consistency needs a levels-form model id");
    const ECEstimate ec = nls_ec_fit(spec, z);
    if (!ec.converged) throw NumericalError("NLS did not converge for " + j.model);
    check = ConsistencyReport{spec.id(), ec_consistency(vec, ec, spec)};
  }
  emit(o.format == "json" ? johansen_json(vec, check) : johansen_text(vec, check), o, out);
  return kExitOk;
}

ForecastConfig forecast_config(const CommonOptions& o, const ForecastCliOptions& f) {
  ForecastConfig fc;
  fc.reps = f.reps;
  fc.seed = f.seed;
  fc.include_coefficient_uncertainty = !f.no_uncertainty;
  fc.band = f.band == "sd" ? BandMethod::two_sd : BandMethod::quantile;
  fc.threads = o.threads;
  return fc;
}

int run_forecast_cmd(const CommonOptions& o, const ForecastCliOptions& f, std::ostream& out,
                     std::ostream& err) {
  AlignedDataset data = load_with_target(o);
  add_merged(data, parse_merge_groups(o.merge));
  if (f.models.size() != 1) throw ConfigError("forecast needs exactly one --model");
  if (!f.train_end) throw ConfigError("forecast needs --train-end");
  const CandidateSpec spec = parse_spec_id(f.models.front());
  const int horizon_end = f.horizon_end.value_or(data.last_year());
  if (*f.train_end <= data.first_year() || *f.train_end >= horizon_end || horizon_end > data.last_year()) {
    throw ConfigError("--train-end and --horizon-end must satisfy first year < train end < horizon end <= last year");
  }
  const AlignedDataset train = data.window(data.first_year(), *f.train_end);
  ForecastConfig fc = forecast_config(o, f);
  fc.horizon_start = *f.train_end + 1;
  fc.horizon_end = horizon_end;

  ForecastBands bands;
  if (spec.form == ModelForm::levels) {
    const ECEstimate est = nls_ec_fit(spec, train);
    if (!est.converged) throw NumericalError("NLS did not converge for " + spec.id());
    if (est.phi_nonstationary()) throw NumericalError("estimated |phi| >= 1 for " + spec.id());
    bands = mc_forecast(est, data, fc);
  } else {
    bands = mc_forecast(short_run_fit(spec, train), data, fc);
  }
  if (bands.covariance_fallback) {
    err << "warning: parameter covariance not positive definite; drew from its diagonal\n";
  }
  std::vector<double> realization;
  for (int y : bands.years) realization.push_back(data.target().at_year(y));
  if (o.format == "json") {
    emit(forecast_json(spec.id(), bands, realization), o, out);
  } else {
    emit(forecast_csv(bands, realization), o, out);
  }
  return kExitOk;
}

int run_compare_cmd(const CommonOptions& o, const ForecastCliOptions& f, std::ostream& out,
                    std::ostream& err) {
  AlignedDataset data = load_with_target(o);
  add_merged(data, parse_merge_groups(o.merge));
  std::vector<CandidateSpec> models;
  for (const auto& m : f.models) models.push_back(parse_spec_id(m));
  if (f.splits.empty()) throw ConfigError("compare needs at least one --split TRAIN_END:HORIZON_END");
  std::vector<ForecastSplit> splits;
  for (const auto& s : f.splits) {
    const auto colon = s.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument(s);
      std::size_t used_a = 0, used_b = 0;
      const std::string a = s.substr(0, colon), b = s.substr(colon + 1);
      ForecastSplit sp{std::stoi(a, &used_a), std::stoi(b, &used_b)};
      if (used_a != a.size() || used_b != b.size()) throw std::invalid_argument(s);
      splits.push_back(sp);
    } catch (const std::logic_error&) {
      throw ConfigError("malformed split '" + s + "' (expected TRAIN_END:HORIZON_END)");
    }
  }
  const ComparisonReport report = forecast_compare(models, data, splits, forecast_config(o, f));
  for (const auto& row : report.rows) {
    if (!row.available) err << "warning: " << row.model_id << " unavailable for split ending "
                            << row.split.train_end << ": " << row.error << "\n";
  }
  if (o.format == "json") emit(comparison_json(report), o, out);
  else if (o.format == "csv") emit(comparison_csv(report), o, out);
  else emit(comparison_text(report), o, out);
  return kExitOk;
}

// Flat `key = value` lines belong to the subcommand being run.
class SubcommandConfig : public CLI::ConfigINI {
 public:
  explicit SubcommandConfig(const CLI::App* app) : app_(app) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    const auto subs = app_->get_subcommands();
    if (subs.empty()) return items;
    for (auto& item : items) {
      if (item.parents.empty()) item.parents.push_back(subs.front()->get_name());
    }
    return items;
  }

 private:
  const CLI::App* app_;
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"cointsearch: exhaustive cointegration model search"};
  app.name("cointsearch");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key = value configuration file; command-line flags take precedence");
  app.config_formatter(std::make_shared<SubcommandConfig>(&app));

  CommonOptions common;
  SearchOptions search;
  UnitRootOptions unitroot;
  JohansenCliOptions johansen;
  ForecastCliOptions forecast;

  auto* ur = app.add_subcommand("unitroot", "ADF and KPSS tests per variable");
  add_common(ur, common);
  ur->add_option("--variables", unitroot.variables, "variables to test (default: all)")->delimiter(',');
  ur->add_option("--max-lag", unitroot.max_lag, "maximum ADF lag (default: Schwert rule)")
      ->check(CLI::NonNegativeNumber);
  ur->add_option("--difference", unitroot.difference, "test the d-th difference")->check(CLI::Range(0, 2));

  auto* se = app.add_subcommand("search", "exhaustive candidate search with screening and ranking");
  add_common(se, common);
  se->add_option("--predictors", search.predictors, "predictor columns (default: all but the target)")
      ->delimiter(',');
  se->add_option("--mode", search.mode, "model form")->check(CLI::IsMember({"levels", "differences"}));
  se->add_option("--deterministic", search.deterministic, "allowed deterministic cases: n, c, ct")
      ->delimiter(',')
      ->check(CLI::IsMember({"n", "c", "ct"}));
  se->add_option("--eg-level", search.eg_level, "Engle-Granger screening level");
  se->add_option("--eg-lags", search.eg_lags, "augmentation lags of the residual DF test")
      ->check(CLI::NonNegativeNumber);
  se->add_option("--bglm-level", search.bglm_level, "BG LM level (discard when p <= level)");
  se->add_option("--bglm-lags", search.bglm_lags, "BG LM lag count")->check(CLI::PositiveNumber);
  se->add_option("--bglm-design", search.bg_design, "BG auxiliary regressors")
      ->check(CLI::IsMember({"jacobian", "regressors"}));
  se->add_option("--nls-tol", search.nls_tol, "NLS relative coefficient tolerance");
  se->add_option("--nls-max-iter", search.nls_max_iter, "NLS iteration cap");
  se->add_option("--seed", search.seed, "run seed (recorded in the report)");

  auto* jo = app.add_subcommand("johansen", "Johansen rank tests and EC consistency check");
  add_common(jo, common);
  jo->add_option("--variables", johansen.variables, "VEC variables (default: target then all others)")
      ->delimiter(',');
  jo->add_option("--case", johansen.vec_case, "a: restricted constant; b: restricted trend")
      ->check(CLI::IsMember({"a", "b"}));
  jo->add_option("--level", johansen.level, "rank test level");
  jo->add_option("--lags", johansen.lags, "lagged differences in the VEC")->check(CLI::NonNegativeNumber);
  jo->add_option("--rank", johansen.rank, "estimate at this rank instead of the selected one")
      ->check(CLI::NonNegativeNumber);
  jo->add_option("--model", johansen.model, "levels model id for the EC consistency check, e.g. 'L|c|x3,x5|phi'");

  auto* fo = app.add_subcommand("forecast", "Monte Carlo forecast of one model");
  add_common(fo, common, true);
  auto* cp = app.add_subcommand("compare", "forecast comparison of several models over splits");
  add_common(cp, common, true);
  for (auto* sub : {fo, cp}) {
    sub->add_option("--model", forecast.models, "model id (repeatable for compare)")->required();
    sub->add_option("--reps", forecast.reps, "Monte Carlo repetitions")->check(CLI::PositiveNumber);
    sub->add_option("--seed", forecast.seed, "Monte Carlo seed");
    sub->add_flag("--no-coefficient-uncertainty", forecast.no_uncertainty, "keep parameters at their estimates");
    sub->add_option("--band", forecast.band, "sd: mean +- 2 sd; quantile: 2.275%/97.725% quantiles")
        ->check(CLI::IsMember({"sd", "quantile"}));
  }
  fo->add_option("--train-end", forecast.train_end, "last training year")->required();
  fo->add_option("--horizon-end", forecast.horizon_end, "last forecast year (default: last data year)");
  cp->add_option("--split", forecast.splits, "TRAIN_END:HORIZON_END (repeatable)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      out << app.help();
      for (auto* sub : app.get_subcommands()) out << sub->help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (ur->parsed()) return run_unitroot(common, unitroot, out);
    if (se->parsed()) return run_search_cmd(common, search, out, err);
    if (jo->parsed()) return run_johansen_cmd(common, johansen, out);
    if (fo->parsed()) return run_forecast_cmd(common, forecast, out, err);
    if (cp->parsed()) return run_compare_cmd(common, forecast, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace cointsearch
