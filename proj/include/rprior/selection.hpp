#pragma once

// Model comparison: the -2 log p(y|H) criteria, Bayes factors, posterior
// model probabilities and best-model selection.

#include <cstddef>
#include <string>
#include <vector>

#include "rprior/evidence.hpp"
#include "rprior/model.hpp"
#include "rprior/priors.hpp"

namespace rprior {

struct CriterionScheme {
  enum class Kind { ExactEvidence, AsymptoticHr, AsymptoticHg, AsymptoticZS, AIC, AICc, BIC };
  Kind kind = Kind::AIC;
  PriorScheme prior;               // ExactEvidence only
  double a = kDefaultHyperGA;      // AsymptoticHg only
  ZsMode zs_mode = ZsMode::Auto;   // ExactEvidence with ZellnerSiow only

  static CriterionScheme exact(const PriorScheme& prior, ZsMode zs_mode = ZsMode::Auto);
  static CriterionScheme asymptotic_hr();
  static CriterionScheme asymptotic_hg(double a = kDefaultHyperGA);
  static CriterionScheme asymptotic_zs();
  static CriterionScheme aic();
  static CriterionScheme aicc();
  static CriterionScheme bic();

  bool is_exact() const { return kind == Kind::ExactEvidence; }

  /// Stable textual form, e.g. "exact:hyperg:3", "hg-asym:3", "bic".
  std::string label() const;
};

/// -2 log p(y | H) with K-independent constants dropped; for exact schemes
/// this is -2 times the full log evidence.
double criterion_value(const StatSummary& stats, const CriterionScheme& scheme);

/// ln p(y|A) - ln p(y|B); both must share scenario and prior family.
double log_bayes_factor(const EvidenceValue& a, const EvidenceValue& b);

/// Posterior model probabilities from log evidences and log model priors,
/// normalised with log-sum-exp.
std::vector<double> posterior_probabilities(const std::vector<double>& log_evidences,
                                            const std::vector<double>& log_priors);
std::vector<double> posterior_probabilities(const std::vector<EvidenceValue>& evidences,
                                            const std::vector<double>& log_priors);

struct Candidate {
  std::size_t id = 0;
  std::size_t k = 0;
  double criterion = 0.0;
};

inline constexpr double kTieTolerance = 1e-12;

/// Index of the candidate with the smallest criterion. Values within
/// kTieTolerance of the minimum tie; ties go to the smallest K, then the
/// lowest id.
std::size_t select_best(const std::vector<Candidate>& candidates);

}  // namespace rprior
