#pragma once

// Candidate-model comparison on one dataset: statistics, criteria, log
// evidences, Bayes factors and posterior probabilities per scheme, with a
// versioned JSON serialisation.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rprior/io.hpp"
#include "rprior/selection.hpp"

namespace rprior {

/// Parses a scheme token: gprior:<g>, hyperg[:a], zs[:series|:asymptotic],
/// parabolic, aic, aicc, bic, hr-asym, hg-asym[:a], zs-asym.
CriterionScheme parse_scheme(const std::string& token, double hyper_g_a = kDefaultHyperGA);

struct CompareRequest {
  std::vector<CriterionScheme> schemes;
  /// Forces a scenario. Fixed without a sigma column uses unit widths;
  /// variable ignores a sigma column.
  std::optional<Scenario::Kind> scenario;
  /// Explicit candidates as 0-based column lists; empty means nested sizes.
  std::vector<std::vector<std::size_t>> subsets;
  /// Largest nested size; 0 means every predictor.
  std::size_t nested_max = 0;
};

struct CandidateStats {
  std::size_t id = 0;
  std::vector<std::size_t> columns;  // 0-based
  SufficientStats stats;
};

struct SchemeResult {
  std::size_t candidate = 0;
  double criterion = 0.0;
  /// Exact schemes: ln p(y|H). Criteria: -criterion / 2, which carries the
  /// same model ranking.
  double log_evidence = 0.0;
  std::optional<EvidenceValue> evidence;  // exact schemes only
  double log_bf_vs_best = 0.0;
  double posterior = 0.0;
};

struct SchemeComparison {
  CriterionScheme scheme;
  std::vector<SchemeResult> results;  // candidate order
  std::size_t best = 0;               // candidate id per select_best
};

struct ComparisonReport {
  std::string source;
  std::size_t n = 0;
  std::size_t predictors = 0;
  Scenario scenario;
  std::vector<std::string> predictor_names;
  std::vector<CandidateStats> candidates;
  std::vector<SchemeComparison> schemes;

  /// False when any exact evidence missed its tolerance.
  bool all_converged() const;
  /// Schema "rprior.compare/1"; numbers round-trip, non-finite ones are null.
  std::string to_json() const;
};

/// Statistics of one candidate (0-based columns) under the requested or
/// inferred scenario, as compare_models computes them.
SufficientStats candidate_stats(const LoadedDataset& dataset, const std::vector<std::size_t>& columns,
                                std::optional<Scenario::Kind> scenario = std::nullopt);

ComparisonReport compare_models(const LoadedDataset& dataset, const CompareRequest& request,
                                const std::string& source = "<input>");

/// Parses "x1,x3;x2" style subset lists into 0-based column indices.
std::vector<std::vector<std::size_t>> parse_subsets(const std::string& text,
                                                    const std::vector<std::string>& names);

}  // namespace rprior
