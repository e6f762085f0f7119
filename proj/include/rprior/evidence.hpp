#pragma once

// Closed-form log evidences for each prior family and scenario, and the
// quadrature oracles that integrate the conditional evidence against the
// prior densities directly.

#include <cstddef>

#include "rprior/model.hpp"
#include "rprior/priors.hpp"
#include "rprior/quadrature.hpp"

namespace rprior {

struct EvidenceValue {
  enum class Method { ClosedForm, Series, Quadrature, Asymptotic };

  double log_evidence = 0.0;
  PriorScheme scheme;
  Scenario scenario;
  Method method = Method::ClosedForm;
  std::size_t terms = 1;         // series terms or integrand evaluations
  double abs_err_estimate = 0.0;  // absolute error of log_evidence
  bool converged = true;
};

const char* to_string(EvidenceValue::Method method);

/// Zellner-Siow evaluation: the j-series, its large-argument asymptotic, or
/// Auto: the asymptotic once the series argument exceeds kZsSeriesLimit,
/// otherwise the series, except that variable-sigma fits too close to perfect
/// for the term cap use a one-dimensional g-integral instead.
enum class ZsMode { Auto, Series, Asymptotic };

inline constexpr double kZsSeriesLimit = 1e4;
inline constexpr std::size_t kZsMaxTerms = 10000;

/// ln p(y | r, sigma). Fixed-sigma statistics replace (2 pi sigma^2)^{-N/2}
/// by C_sigma; callers in that scenario pass sigma = 1.
double conditional_log_evidence(const StatSummary& stats, double r, double sigma);

EvidenceValue log_evidence_fixed_sigma(const StatSummary& stats, const PriorScheme& scheme,
                                       ZsMode zs_mode = ZsMode::Auto);

EvidenceValue log_evidence_variable_sigma(const StatSummary& stats, const PriorScheme& scheme,
                                          ZsMode zs_mode = ZsMode::Auto);

/// Dispatches on stats.scenario.
EvidenceValue log_evidence(const StatSummary& stats, const PriorScheme& scheme,
                           ZsMode zs_mode = ZsMode::Auto);

/// Mixing variable integrated numerically: the radius r against the r-prior,
/// or g against the g-prior (the GPrior family has no g-integral).
enum class Route { RPrior, GPrior };

/// Adaptive quadrature of the evidence integral in log space. Variable sigma
/// adds an outer integral over ln sigma (Jeffreys prior).
EvidenceValue quadrature_log_evidence(const StatSummary& stats, const PriorScheme& scheme,
                                      Route route = Route::RPrior,
                                      const quadrature::Options& options = {});

}  // namespace rprior
