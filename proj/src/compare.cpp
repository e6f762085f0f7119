#include "rprior/compare.hpp"

#include <cmath>
#include <exception>
#include <sstream>

#include "json.hpp"

#include "rprior/errors.hpp"

namespace rprior {
namespace {

using nlohmann::json;

double parse_param(const std::string& text, const std::string& token) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw InputError("bad numeric parameter in scheme '" + token + "'");
  }
  return v;
}

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(num(v[i]));
  return out;
}

const char* kind_name(CriterionScheme::Kind kind) {
  switch (kind) {
    case CriterionScheme::Kind::ExactEvidence: return "exact";
    case CriterionScheme::Kind::AsymptoticHr:
    case CriterionScheme::Kind::AsymptoticHg:
    case CriterionScheme::Kind::AsymptoticZS: return "asymptotic";
    case CriterionScheme::Kind::AIC:
    case CriterionScheme::Kind::AICc:
    case CriterionScheme::Kind::BIC: return "information";
  }
  return "unknown";
}

struct ScenarioData {
  Standardized data;
  Scenario scenario;
};

ScenarioData prepare(const LoadedDataset& dataset, std::optional<Scenario::Kind> kind) {
  const bool fixed = kind ? *kind == Scenario::Kind::FixedSigma : dataset.data.sigma.has_value();
  if (!fixed) return {Standardized{dataset.data.y, dataset.design, 0.0}, Scenario::variable()};
  Dataset data = dataset.data;
  if (!data.sigma) data.sigma = Eigen::VectorXd::Ones(data.y.size());
  Standardized s = standardize(data, dataset.design);
  const Scenario scenario = Scenario::fixed(s.ln_c_sigma);
  return {std::move(s), scenario};
}

SufficientStats stats_for(const ScenarioData& prepared, const std::vector<std::size_t>& columns) {
  const Eigen::MatrixXd& all = prepared.data.x;
  Eigen::MatrixXd x(all.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] >= static_cast<std::size_t>(all.cols())) {
      throw InputError("candidate column index out of range");
    }
    x.col(static_cast<Eigen::Index>(j)) = all.col(static_cast<Eigen::Index>(columns[j]));
  }
  return diagonalize(x, prepared.data.z, prepared.scenario);
}

}  // namespace

CriterionScheme parse_scheme(const std::string& token, double hyper_g_a) {
  const auto colon = token.find(':');
  const std::string head = token.substr(0, colon);
  const bool has_arg = colon != std::string::npos;
  const std::string arg = has_arg ? token.substr(colon + 1) : std::string();
  auto no_arg = [&] {
    if (has_arg) throw InputError("scheme '" + head + "' takes no parameter");
  };
  try {
    if (head == "gprior") {
      if (!has_arg) throw InputError("scheme 'gprior' needs a parameter, e.g. gprior:1");
      return CriterionScheme::exact(PriorScheme::gprior(parse_param(arg, token)));
    }
    if (head == "hyperg") {
      const double a = has_arg ? parse_param(arg, token) : hyper_g_a;
      return CriterionScheme::exact(PriorScheme::hyper_g(a));
    }
    if (head == "zs") {
      ZsMode mode = ZsMode::Auto;
      if (arg == "series") {
        mode = ZsMode::Series;
      } else if (arg == "asymptotic") {
        mode = ZsMode::Asymptotic;
      } else if (has_arg) {
        throw InputError("scheme 'zs' accepts :series or :asymptotic, got '" + token + "'");
      }
      return CriterionScheme::exact(PriorScheme::zellner_siow(), mode);
    }
    if (head == "parabolic") {
      no_arg();
      return CriterionScheme::exact(PriorScheme::parabolic());
    }
    if (head == "aic") {
      no_arg();
      return CriterionScheme::aic();
    }
    if (head == "aicc") {
      no_arg();
      return CriterionScheme::aicc();
    }
    if (head == "bic") {
      no_arg();
      return CriterionScheme::bic();
    }
    if (head == "hr-asym") {
      no_arg();
      return CriterionScheme::asymptotic_hr();
    }
    if (head == "hg-asym") {
      return CriterionScheme::asymptotic_hg(has_arg ? parse_param(arg, token) : hyper_g_a);
    }
    if (head == "zs-asym") {
      no_arg();
      return CriterionScheme::asymptotic_zs();
    }
  } catch (const DomainError& e) {
    throw InputError("scheme '" + token + "': " + e.what());
  }
  throw InputError("unknown scheme '" + token + "'");
}

SufficientStats candidate_stats(const LoadedDataset& dataset, const std::vector<std::size_t>& columns,
                                std::optional<Scenario::Kind> scenario) {
  if (columns.empty()) throw InputError("empty column list");
  return stats_for(prepare(dataset, scenario), columns);
}

std::vector<std::vector<std::size_t>> parse_subsets(const std::string& text,
                                                    const std::vector<std::string>& names) {
  std::vector<std::vector<std::size_t>> out;
  std::istringstream groups(text);
  std::string group;
  while (std::getline(groups, group, ';')) {
    std::vector<std::size_t> cols;
    std::istringstream items(group);
    std::string item;
    while (std::getline(items, item, ',')) {
      const auto b = item.find_first_not_of(" \t");
      const auto e = item.find_last_not_of(" \t");
      if (b == std::string::npos) continue;
      const std::string name = item.substr(b, e - b + 1);
      std::size_t idx = names.size();
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) idx = i;
      }
      if (idx == names.size()) throw InputError("unknown predictor column '" + name + "'");
      for (std::size_t c : cols) {
        if (c == idx) throw InputError("column '" + name + "' repeated within a candidate");
      }
      cols.push_back(idx);
    }
    if (cols.empty()) throw InputError("empty candidate in column list '" + text + "'");
    out.push_back(std::move(cols));
  }
  if (out.empty()) throw InputError("no candidates in column list '" + text + "'");
  return out;
}

bool ComparisonReport::all_converged() const {
  for (const SchemeComparison& s : schemes) {
    for (const SchemeResult& r : s.results) {
      if (r.evidence && !r.evidence->converged) return false;
    }
  }
  return true;
}

std::string ComparisonReport::to_json() const {
  json cands = json::array();
  for (const CandidateStats& c : candidates) {
    json cols = json::array();
    for (std::size_t j : c.columns) cols.push_back(predictor_names[j]);
    cands.push_back({
        {"id", c.id},
        {"columns", cols},
        {"k", c.stats.k},
        {"n", c.stats.n},
        {"mean_sq", num(c.stats.mean_sq)},
        {"bhat_sq", num(c.stats.bhat_sq)},
        {"q0", num(c.stats.q0)},
        {"q0_clamped", c.stats.q0_clamped},
        {"beta_hat", vector_json(c.stats.beta_hat)},
        {"eigenvalues", vector_json(c.stats.eigenvalues)},
    });
  }
  json blocks = json::array();
  for (const SchemeComparison& s : schemes) {
    json rows = json::array();
    for (const SchemeResult& r : s.results) {
      json row = {
          {"candidate", r.candidate},
          {"criterion", num(r.criterion)},
          {"log_evidence", num(r.log_evidence)},
          {"log_bf_vs_best", num(r.log_bf_vs_best)},
          {"posterior", num(r.posterior)},
      };
      if (r.evidence) {
        row["method"] = to_string(r.evidence->method);
        row["terms"] = r.evidence->terms;
        row["abs_err_estimate"] = num(r.evidence->abs_err_estimate);
        row["converged"] = r.evidence->converged;
      }
      rows.push_back(std::move(row));
    }
    blocks.push_back({
        {"scheme", s.scheme.label()},
        {"kind", kind_name(s.scheme.kind)},
        {"best_candidate", s.best},
        {"results", rows},
    });
  }
  json doc = {
      {"schema", "rprior.compare/1"},
      {"source", source},
      {"n", n},
      {"predictors", predictors},
      {"scenario", scenario.is_fixed() ? "fixed" : "variable"},
      {"ln_c_sigma", num(scenario.ln_c_sigma)},
      {"candidates", cands},
      {"schemes", blocks},
      {"all_converged", all_converged()},
  };
  return doc.dump(2) + "\n";
}

ComparisonReport compare_models(const LoadedDataset& dataset, const CompareRequest& request,
                                const std::string& source) {
  if (request.schemes.empty()) throw InputError("no schemes requested");
  const auto k_all = static_cast<std::size_t>(dataset.design.cols());

  std::vector<std::vector<std::size_t>> subsets = request.subsets;
  if (subsets.empty()) {
    const std::size_t k_max = request.nested_max == 0 ? k_all : request.nested_max;
    if (k_max > k_all) {
      throw InputError("nested maximum " + std::to_string(k_max) + " exceeds the " +
                       std::to_string(k_all) + " predictor columns");
    }
    for (std::size_t k = 1; k <= k_max; ++k) {
      std::vector<std::size_t> cols(k);
      for (std::size_t j = 0; j < k; ++j) cols[j] = j;
      subsets.push_back(std::move(cols));
    }
  }
  for (const auto& cols : subsets) {
    for (std::size_t j : cols) {
      if (j >= k_all) throw InputError("candidate column index out of range");
    }
  }

  ComparisonReport report;
  report.source = source;
  report.n = static_cast<std::size_t>(dataset.data.y.size());
  report.predictors = k_all;
  report.predictor_names = dataset.predictor_names;

  const ScenarioData prepared = prepare(dataset, request.scenario);
  report.scenario = prepared.scenario;
  for (std::size_t id = 0; id < subsets.size(); ++id) {
    report.candidates.push_back({id, subsets[id], stats_for(prepared, subsets[id])});
  }

  for (const CriterionScheme& scheme : request.schemes) {
    SchemeComparison block;
    block.scheme = scheme;
    std::vector<Candidate> cands;
    std::vector<double> logs;
    for (const CandidateStats& c : report.candidates) {
      SchemeResult r;
      r.candidate = c.id;
      if (scheme.is_exact()) {
        r.evidence = log_evidence(c.stats, scheme.prior, scheme.zs_mode);
        r.log_evidence = r.evidence->log_evidence;
        r.criterion = -2.0 * r.log_evidence;
      } else {
        r.criterion = criterion_value(c.stats, scheme);
        r.log_evidence = -0.5 * r.criterion;
      }
      cands.push_back({c.id, c.stats.k, r.criterion});
      logs.push_back(r.log_evidence);
      block.results.push_back(std::move(r));
    }
    block.best = cands[select_best(cands)].id;
    const std::vector<double> post = posterior_probabilities(logs, {});
    const double best_log = logs[block.best];
    for (std::size_t i = 0; i < block.results.size(); ++i) {
      block.results[i].posterior = post[i];
      block.results[i].log_bf_vs_best = logs[i] - best_log;
    }
    report.schemes.push_back(std::move(block));
  }
  return report;
}

}  // namespace rprior
