#include "cointsearch/model.hpp"

#include "cointsearch/errors.hpp"

namespace cointsearch {

std::string_view case_code(DeterministicCase c) {
  switch (c) {
    case DeterministicCase::none: return "n";
    case DeterministicCase::constant: return "c";
    case DeterministicCase::constant_and_trend: return "ct";
  }
  return "?";
}

DeterministicCase parse_case(std::string_view code) {
  if (code == "n" || code == "none" || code == "0") return DeterministicCase::none;
  if (code == "c" || code == "constant" || code == "C") return DeterministicCase::constant;
  if (code == "ct" || code == "constant_and_trend" || code == "CT") {
    return DeterministicCase::constant_and_trend;
  }
  throw ConfigError("unknown deterministic case '" + std::string(code) + "'");
}

std::string CandidateSpec::id() const {
  std::string out = form == ModelForm::levels ? "L|" : "D|";
  out += case_code(deterministic);
  out += '|';
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i) out += ',';
    out += subset[i];
  }
  if (phi_free) out += "|phi";
  return out;
}

int CandidateSpec::n_params() const {
  return static_cast<int>(subset.size()) + deterministic_count(deterministic) + (phi_free ? 1 : 0);
}

void CandidateSpec::validate() const {
  if (form == ModelForm::levels) {
    if (subset.empty()) throw ConfigError("levels-form candidate needs at least one predictor");
    return;
  }
  if (phi_free) throw ConfigError("differences-form candidate cannot have a free phi");
  if (deterministic == DeterministicCase::constant_and_trend) {
    throw ConfigError("differences-form candidate allows only none or constant");
  }
  if (subset.empty() && deterministic != DeterministicCase::constant) {
    throw ConfigError("empty differences-form candidate needs a constant");
  }
}

CandidateSpec parse_spec_id(std::string_view id) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto bar = id.find('|', start);
    parts.emplace_back(id.substr(start, bar - start));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  const auto bad = [&] { return ConfigError("malformed model id '" + std::string(id) + "'"); };
  if (parts.size() < 3 || parts.size() > 4) throw bad();
  CandidateSpec spec;
  if (parts[0] == "L") spec.form = ModelForm::levels;
  else if (parts[0] == "D") spec.form = ModelForm::differences;
  else throw bad();
  spec.deterministic = parse_case(parts[1]);
  if (!parts[2].empty()) {
    std::size_t s = 0;
    while (true) {
      const auto comma = parts[2].find(',', s);
      spec.subset.push_back(parts[2].substr(s, comma - s));
      if (spec.subset.back().empty()) throw bad();
      if (comma == std::string::npos) break;
      s = comma + 1;
    }
  }
  if (parts.size() == 4) {
    if (parts[3] != "phi") throw bad();
    spec.phi_free = true;
  }
  spec.validate();
  return spec;
}

}  // namespace cointsearch
