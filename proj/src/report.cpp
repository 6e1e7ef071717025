#include "cointsearch/report.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "cointsearch/errors.hpp"

namespace cointsearch {

using json = nlohmann::ordered_json;

namespace {

constexpr std::array<DeterministicCase, 3> kAdfCases = {
    DeterministicCase::none, DeterministicCase::constant, DeterministicCase::constant_and_trend};
constexpr std::array<DeterministicCase, 2> kKpssCases = {DeterministicCase::constant,
                                                         DeterministicCase::constant_and_trend};

std::string fmt(double v, int digits = 3) {
  if (!std::isfinite(v)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

json vec_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json mat_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vec_json(m.row(i).transpose()));
  return out;
}

json header(const char* command) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["command"] = command;
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json parameters_json(const std::vector<std::string>& names, const Eigen::VectorXd& coef,
                     const Eigen::MatrixXd& cov, const Eigen::VectorXd& t) {
  json out = json::array();
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out.push_back({{"name", names[i]},
                   {"estimate", coef(k)},
                   {"std_error", std::sqrt(std::max(cov(k, k), 0.0))},
                   {"t_ratio", t(k)}});
  }
  return out;
}

}  // namespace

std::vector<UnitRootRow> unit_root_table(const AlignedDataset& data,
                                         const std::vector<std::string>& variables,
                                         std::optional<int> max_lag, int difference_order) {
  if (difference_order < 0) throw ConfigError("difference order must be non-negative");
  std::vector<UnitRootRow> rows;
  for (const auto& name : variables) {
    UnitRootRow row;
    row.variable = name;
    const TimeSeries s = difference_order > 0 ? diff(data.column(name), difference_order)
                                              : data.column(name);
    for (std::size_t i = 0; i < kAdfCases.size(); ++i) {
      try {
        row.adf[i] = adf_test(s, kAdfCases[i], max_lag);
      } catch (const Error& e) {
        row.adf_error[i] = e.what();
      }
    }
    for (std::size_t i = 0; i < kKpssCases.size(); ++i) {
      try {
        row.kpss[i] = kpss_test(s, kKpssCases[i]);
      } catch (const Error& e) {
        row.kpss_error[i] = e.what();
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string unit_root_json(const std::vector<UnitRootRow>& rows, int difference_order) {
  json j = header("unitroot");
  j["difference_order"] = difference_order;
  json vars = json::array();
  for (const auto& row : rows) {
    json v;
    v["variable"] = row.variable;
    json adf = json::object();
    for (std::size_t i = 0; i < kAdfCases.size(); ++i) {
      const std::string key(case_code(kAdfCases[i]));
      if (row.adf[i]) {
        adf[key] = {{"statistic", row.adf[i]->statistic},
                    {"p_value", row.adf[i]->p_value},
                    {"lags", row.adf[i]->lags_used},
                    {"max_lag", row.adf[i]->max_lag},
                    {"n_obs", row.adf[i]->n_obs}};
      } else {
        adf[key] = {{"error", row.adf_error[i]}};
      }
    }
    v["adf"] = adf;
    json kpss = json::object();
    for (std::size_t i = 0; i < kKpssCases.size(); ++i) {
      const std::string key(case_code(kKpssCases[i]));
      if (row.kpss[i]) {
        kpss[key] = {{"statistic", row.kpss[i]->statistic},
                     {"p_lower", row.kpss[i]->p_bracket.lower},
                     {"p_upper", row.kpss[i]->p_bracket.upper},
                     {"p_label", row.kpss[i]->p_bracket.label()},
                     {"bandwidth", row.kpss[i]->bandwidth}};
      } else {
        kpss[key] = {{"error", row.kpss_error[i]}};
      }
    }
    v["kpss"] = kpss;
    vars.push_back(v);
  }
  j["variables"] = vars;
  return dump(j);
}

std::string unit_root_text(const std::vector<UnitRootRow>& rows, int difference_order) {
  std::ostringstream out;
  out << "Unit-root tests";
  if (difference_order > 0) out << " (differenced " << difference_order << "x)";
  out << "\nADF: p-value of a unit root [BIC lag]; KPSS: p-value bracket of stationarity\n\n";
  out << pad("variable", 12) << pad("ADF 0", 14) << pad("ADF C", 14) << pad("ADF CT", 14)
      << pad("KPSS C", 14) << "KPSS CT\n";
  for (const auto& row : rows) {
    out << pad(row.variable, 12);
    for (std::size_t i = 0; i < 3; ++i) {
      out << pad(row.adf[i] ? fmt(row.adf[i]->p_value) + " [" + std::to_string(row.adf[i]->lags_used) + "]"
                            : "error", 14);
    }
    for (std::size_t i = 0; i < 2; ++i) {
      out << pad(row.kpss[i] ? row.kpss[i]->p_bracket.label() : "error", 14);
    }
    out << "\n";
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < 3; ++i) {
      if (!row.adf_error[i].empty()) {
        out << "note: " << row.variable << " ADF " << case_code(kAdfCases[i]) << ": " << row.adf_error[i] << "\n";
      }
    }
    for (std::size_t i = 0; i < 2; ++i) {
      if (!row.kpss_error[i].empty()) {
        out << "note: " << row.variable << " KPSS " << case_code(kKpssCases[i]) << ": " << row.kpss_error[i] << "\n";
      }
    }
  }
  return out.str();
}

std::string search_json(const SearchReport& report) {
  const auto& cfg = report.config;
  json j = header("search");
  json c;
  c["target"] = cfg.target;
  c["predictors"] = cfg.predictors;
  c["mode"] = cfg.mode == ModelForm::levels ? "levels" : "differences";
  c["merge_groups"] = cfg.merge_groups;
  json cases = json::array();
  for (auto d : cfg.deterministic_options) cases.push_back(std::string(case_code(d)));
  c["deterministic_options"] = cases;
  c["eg_level"] = cfg.screen.eg_level;
  c["eg_augmentation_lags"] = cfg.screen.eg_augmentation_lags;
  c["bglm_level"] = cfg.screen.bglm_level;
  c["bglm_lags"] = cfg.screen.bglm_lags;
  c["bglm_design"] = cfg.screen.bg_design == BgDesign::jacobian ? "jacobian" : "regressors";
  c["nls"] = {{"tol", cfg.screen.nls.tol},
              {"max_iter", cfg.screen.nls.max_iter},
              {"initial_lambda", cfg.screen.nls.initial_lambda}};
  c["seed"] = cfg.seed;
  j["config"] = c;
  j["sample"] = {{"first_year", report.first_year}, {"last_year", report.last_year}};
  j["n_candidates"] = report.n_candidates;
  j["n_survivors"] = report.ranked.size();

  json ranked = json::array();
  for (std::size_t i = 0; i < report.ranked.size(); ++i) {
    const auto& m = report.ranked[i];
    json r;
    r["rank"] = i + 1;
    r["id"] = m.spec.id();
    r["form"] = m.spec.form == ModelForm::levels ? "levels" : "differences";
    r["deterministic"] = std::string(case_code(m.spec.deterministic));
    r["phi_free"] = m.spec.phi_free;
    r["predictors"] = m.spec.subset;
    if (const auto* ec = std::get_if<ECEstimate>(&m.estimate)) {
      r["parameters"] = parameters_json(ec->param_names, ec->params(), ec->covariance, ec->t_ratios);
      r["converged"] = ec->converged;
      r["iterations"] = ec->iterations;
      r["first_year"] = ec->first_year;
    } else {
      const auto& sr = std::get<ShortRunEstimate>(m.estimate);
      r["parameters"] = parameters_json(sr.param_names, sr.ols.coefficients, sr.ols.covariance, sr.ols.t_ratios);
      r["first_year"] = sr.first_year;
    }
    r["ssr"] = m.ssr();
    r["n_obs"] = m.n_obs();
    r["n_params"] = m.n_params();
    r["aic"] = m.scores.aic;
    r["bic"] = m.scores.bic;
    r["er_aic"] = m.scores.er_aic;
    r["er_bic"] = m.scores.er_bic;
    r["aic_rank"] = m.scores.aic_rank;
    r["bic_rank"] = m.scores.bic_rank;
    r["bg_lm_p"] = m.bg_p_value;
    r["eg_statistic"] = m.eg_statistic ? json(*m.eg_statistic) : json(nullptr);
    r["eg_critical_value"] = m.eg_critical_value ? json(*m.eg_critical_value) : json(nullptr);
    ranked.push_back(r);
  }
  j["ranked"] = ranked;

  json discards = json::array();
  for (const auto& d : report.discards) {
    discards.push_back({{"id", d.spec_id}, {"reason", std::string(reason_code(d.reason))}, {"detail", d.detail}});
  }
  j["discards"] = discards;
  return dump(j);
}

std::string search_text(const SearchReport& report) {
  const auto& cfg = report.config;
  std::vector<std::string> preds;
  for (const auto& m : report.ranked) {
    for (const auto& p : m.spec.subset) {
      if (std::find(preds.begin(), preds.end(), p) == preds.end()) preds.push_back(p);
    }
  }
  // Keep predictor columns in configuration order where possible.
  std::stable_sort(preds.begin(), preds.end(), [&](const std::string& a, const std::string& b) {
    auto pos = [&](const std::string& s) {
      return std::find(cfg.predictors.begin(), cfg.predictors.end(), s) - cfg.predictors.begin();
    };
    return pos(a) < pos(b);
  });

  std::ostringstream out;
  out << "Search: target " << cfg.target << ", " << report.n_candidates << " candidates, "
      << report.ranked.size() << " survivors, sample " << report.first_year << "-" << report.last_year << "\n\n";
  out << pad("#", 4);
  for (const auto& p : preds) out << pad(p, std::max<std::size_t>(p.size() + 1, 4));
  out << pad("c", 3) << pad("t", 3) << pad("phi", 5) << pad("ER AIC", 14) << pad("ER BIC", 10)
      << pad("BG LM", 8) << "EG DF\n";
  for (std::size_t i = 0; i < report.ranked.size(); ++i) {
    const auto& m = report.ranked[i];
    out << pad(std::to_string(i + 1), 4);
    for (const auto& p : preds) {
      const bool in = std::find(m.spec.subset.begin(), m.spec.subset.end(), p) != m.spec.subset.end();
      out << pad(in ? "X" : "", std::max<std::size_t>(p.size() + 1, 4));
    }
    out << pad(m.spec.deterministic != DeterministicCase::none ? "X" : "", 3)
        << pad(m.spec.deterministic == DeterministicCase::constant_and_trend ? "X" : "", 3)
        << pad(m.spec.phi_free ? "X" : "", 5)
        << pad(fmt(m.scores.er_aic) + " (" + std::to_string(m.scores.aic_rank) + ")", 14)
        << pad(fmt(m.scores.er_bic), 10) << pad(fmt(m.bg_p_value, 2), 8);
    if (m.eg_statistic) out << fmt(*m.eg_statistic, 2) << " [" << fmt(*m.eg_critical_value, 2) << "]";
    out << "\n";
  }
  out << "\nDiscarded: " << report.discards.size() << "\n";
  for (const auto& d : report.discards) {
    out << "  " << pad(d.spec_id, 28) << pad(std::string(reason_code(d.reason)), 7) << d.detail << "\n";
  }
  return out.str();
}

std::string johansen_json(const VecResult& vec, const std::optional<ConsistencyReport>& check) {
  json j = header("johansen");
  j["variables"] = vec.variables;
  j["target"] = vec.target;
  j["case"] = std::string(vec_case_code(vec.vec_case));
  j["n_obs"] = vec.n_obs;
  j["level"] = vec.level;
  j["eigenvalues"] = vec_json(vec.eigenvalues);
  json tests = json::array();
  for (int r = 0; r < vec.dimension; ++r) {
    tests.push_back({{"rank", r},
                     {"trace", vec.trace_stats(r)},
                     {"trace_p", vec.trace_pvalues(r)},
                     {"trace_critical", vec.trace_critical(r)},
                     {"max_eig", vec.max_eig_stats(r)},
                     {"max_eig_p", vec.max_eig_pvalues(r)},
                     {"max_eig_critical", vec.max_eig_critical(r)}});
  }
  j["tests"] = tests;
  j["selected_rank"] = vec.selected_rank;
  j["max_eig_rank"] = vec.max_eig_rank;
  j["rank"] = vec.rank;
  j["alpha"] = mat_json(vec.alpha);
  j["beta"] = mat_json(vec.beta);
  j["gamma"] = vec_json(vec.gamma);
  j["delta"] = vec.delta ? vec_json(*vec.delta) : json(nullptr);
  j["delta_prime"] = vec.delta_prime ? vec_json(*vec.delta_prime) : json(nullptr);
  j["omega"] = mat_json(vec.omega);
  if (check) {
    j["consistency"] = {{"model", check->model_id},
                        {"xi", vec_json(check->result.xi)},
                        {"target", vec_json(check->result.target)},
                        {"reconstructed", vec_json(check->result.reconstructed_ec)},
                        {"std_errors", vec_json(check->result.std_errors)},
                        {"within_bounds", check->result.within_bounds}};
  } else {
    j["consistency"] = nullptr;
  }
  return dump(j);
}

std::string johansen_text(const VecResult& vec, const std::optional<ConsistencyReport>& check) {
  std::ostringstream out;
  out << "Johansen test, case " << vec_case_code(vec.vec_case) << ", variables";
  for (const auto& v : vec.variables) out << " " << v;
  out << ", n = " << vec.n_obs << "\n\n";
  out << pad("H0 r<=", 8) << pad("eigenvalue", 12) << pad("trace", 10) << pad("p", 8)
      << pad("cv", 10) << pad("max-eig", 10) << pad("p", 8) << "cv\n";
  for (int r = 0; r < vec.dimension; ++r) {
    out << pad(std::to_string(r), 8) << pad(fmt(vec.eigenvalues(r), 4), 12) << pad(fmt(vec.trace_stats(r), 2), 10)
        << pad(fmt(vec.trace_pvalues(r)), 8) << pad(fmt(vec.trace_critical(r), 2), 10)
        << pad(fmt(vec.max_eig_stats(r), 2), 10) << pad(fmt(vec.max_eig_pvalues(r)), 8)
        << fmt(vec.max_eig_critical(r), 2) << "\n";
  }
  out << "\nrank at level " << fmt(vec.level, 2) << ": trace " << vec.selected_rank << ", max-eig "
      << vec.max_eig_rank;
  if (vec.selected_rank != vec.max_eig_rank) out << " (the tests disagree)";
  out << "\n";
  if (check) {
    out << "\nEC consistency with " << check->model_id << " at rank " << vec.rank << ": "
        << (check->result.within_bounds ? "within bounds" : "outside bounds") << "\n";
    out << "  xi:";
    for (Eigen::Index i = 0; i < check->result.xi.size(); ++i) out << " " << fmt(check->result.xi(i), 4);
    out << "\n  " << pad("coefficient", 14) << pad("EC", 12) << pad("reconstructed", 15) << "std error\n";
    for (Eigen::Index i = 0; i < check->result.target.size(); ++i) {
      const std::string name = i < vec.dimension ? vec.variables[i] : (i == vec.dimension ? "const" : "trend");
      out << "  " << pad(name, 14) << pad(fmt(check->result.target(i), 4), 12)
          << pad(fmt(check->result.reconstructed_ec(i), 4), 15)
          << (check->result.std_errors(i) > 0.0 ? fmt(check->result.std_errors(i), 4) : "fixed") << "\n";
    }
  }
  return out.str();
}

std::string forecast_json(const std::string& model_id, const ForecastBands& bands,
                          const std::vector<double>& realization) {
  json j = header("forecast");
  j["model"] = model_id;
  j["reps"] = bands.reps;
  j["seed"] = bands.seed;
  j["covariance_fallback"] = bands.covariance_fallback;
  j["years"] = bands.years;
  j["mean"] = bands.mean;
  j["lower"] = bands.lower;
  j["upper"] = bands.upper;
  j["sd"] = bands.sd;
  j["realization"] = realization;
  return dump(j);
}

std::string forecast_csv(const ForecastBands& bands, const std::vector<double>& realization) {
  std::ostringstream out;
  out.precision(17);
  out << "year,realization,mean,lower,upper\n";
  for (std::size_t h = 0; h < bands.years.size(); ++h) {
    out << bands.years[h] << ",";
    if (h < realization.size()) out << realization[h];
    out << "," << bands.mean[h] << "," << bands.lower[h] << "," << bands.upper[h] << "\n";
  }
  return out.str();
}

std::string comparison_json(const ComparisonReport& report) {
  json j = header("compare");
  json rows = json::array();
  for (const auto& row : report.rows) {
    json r;
    r["model"] = row.model_id;
    r["train_end"] = row.split.train_end;
    r["horizon_end"] = row.split.horizon_end;
    r["available"] = row.available;
    if (!row.available) {
      r["error"] = row.error;
      rows.push_back(r);
      continue;
    }
    r["rmse"] = row.rmse;
    r["mean_band_width"] = row.mean_band_width;
    r["covariance_fallback"] = row.bands.covariance_fallback;
    r["years"] = row.bands.years;
    r["realization"] = row.realization;
    r["mean"] = row.bands.mean;
    r["lower"] = row.bands.lower;
    r["upper"] = row.bands.upper;
    rows.push_back(r);
  }
  j["rows"] = rows;
  return dump(j);
}

std::string comparison_csv(const ComparisonReport& report) {
  std::ostringstream out;
  out.precision(17);
  std::size_t i = 0;
  while (i < report.rows.size()) {
    const int train_end = report.rows[i].split.train_end;
    const int horizon_end = report.rows[i].split.horizon_end;
    std::size_t end = i;
    while (end < report.rows.size() && report.rows[end].split.train_end == train_end &&
           report.rows[end].split.horizon_end == horizon_end) {
      ++end;
    }
    out << "train_end,year,realization";
    for (std::size_t k = i; k < end; ++k) {
      const auto& id = report.rows[k].model_id;
      out << ",\"" << id << " mean\",\"" << id << " lower\",\"" << id << " upper\"";
    }
    out << "\n";
    for (int year = train_end + 1; year <= horizon_end; ++year) {
      out << train_end << "," << year << ",";
      const std::size_t h = static_cast<std::size_t>(year - train_end - 1);
      for (std::size_t k = i; k < end; ++k) {
        if (report.rows[k].available) {
          out << report.rows[k].realization[h];
          break;
        }
      }
      for (std::size_t k = i; k < end; ++k) {
        const auto& r = report.rows[k];
        if (r.available) {
          out << "," << r.bands.mean[h] << "," << r.bands.lower[h] << "," << r.bands.upper[h];
        } else {
          out << ",,,";
        }
      }
      out << "\n";
    }
    i = end;
  }
  return out.str();
}

std::string comparison_text(const ComparisonReport& report) {
  std::ostringstream out;
  out << pad("train_end", 11) << pad("horizon", 9) << pad("model", 28) << pad("RMSE", 12) << "mean band width\n";
  for (const auto& row : report.rows) {
    out << pad(std::to_string(row.split.train_end), 11) << pad(std::to_string(row.split.horizon_end), 9)
        << pad(row.model_id, 28);
    if (row.available) {
      out << pad(fmt(row.rmse, 4), 12) << fmt(row.mean_band_width, 4) << "\n";
    } else {
      out << "unavailable: " << row.error << "\n";
    }
  }
  return out.str();
}

}  // namespace cointsearch
