#pragma once

// Monte Carlo study of model selection over nested candidates: orthonormal
// designs, Cauchy coefficients, unit Gaussian noise and MSE per scheme.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rprior/model.hpp"
#include "rprior/rng.hpp"
#include "rprior/selection.hpp"

namespace rprior {

struct SimConfig {
  enum class ZsEvaluation { Exact, Asymptotic };

  std::size_t n = 100;
  std::size_t k_max = 16;
  std::size_t reps = 1000;
  double signal_scale = 1.0;
  std::uint64_t base_seed = 1;
  /// Scheme tokens: aic, aicc, bic, zs, hyperg[:a], parabolic, gprior:<g>,
  /// hr-asym, hg-asym[:a], zs-asym.
  std::vector<std::string> schemes = {"aic", "aicc", "bic", "zs", "hyperg", "parabolic"};
  double hyper_g_a = kDefaultHyperGA;
  ZsEvaluation zs_mode = ZsEvaluation::Asymptotic;
  std::string candidate_strategy = "nested";
  bool redraw_design = false;
  std::size_t threads = 0;  // 0 picks the hardware concurrency

  void validate() const;
};

/// A configured scheme with its table label (AIC, AICc, BIC, ZS, Hg, Hr, ...).
struct SimScheme {
  std::string name;
  CriterionScheme criterion;
};

/// Resolves the scheme tokens of a config; throws InputError on unknown ones.
std::vector<SimScheme> resolve_schemes(const SimConfig& config);

/// Substream tags for derive_seed.
inline constexpr std::uint64_t kDesignStream = 1;
inline constexpr std::uint64_t kReplicateStream = 2;

/// N x k_max matrix with orthonormal columns from the QR factor of a seeded
/// standard-normal matrix; the triangular factor has a positive diagonal.
Eigen::MatrixXd make_orthogonal_design(std::size_t n, std::size_t k_max, std::uint64_t seed);

/// First k_true entries Cauchy(0, scale), the rest exactly zero.
Eigen::VectorXd draw_coefficients(std::size_t k_true, std::size_t k_max, double scale,
                                  Xoshiro256& stream);

struct ReplicateResult {
  double oracle_mse = 0.0;
  std::vector<double> mse;             // per scheme, NaN on failure
  std::vector<std::size_t> selected_k;  // per scheme, 0 on failure
  std::vector<std::string> errors;      // per scheme, empty on success
};

ReplicateResult run_replicate(const SimConfig& config, const std::vector<SimScheme>& schemes,
                              std::size_t k_true, const NestedDesign& design, Xoshiro256& stream);

struct ReportRow {
  std::size_t k_true = 0;
  std::string scheme;
  double mean_mse = 0.0;
  double std_err = 0.0;  // NaN with fewer than two replicates
  std::size_t reps = 0;
};

struct ExperimentReport {
  SimConfig config;
  std::vector<std::string> scheme_names;  // "Oracle" first
  std::vector<ReportRow> rows;            // k_true major, scheme order minor
  std::vector<std::size_t> failures;      // per scheme name
  std::vector<double> mean_selected_k;    // per row; k_true for Oracle
  double wall_seconds = 0.0;
  std::size_t threads_used = 1;

  const ReportRow& row(std::size_t k_true, const std::string& scheme) const;
};

/// Mean and standard error over a fixed-order sample using pairwise
/// summation. NaN entries are skipped.
struct MeanSe {
  double mean = 0.0;
  double std_err = 0.0;
  std::size_t count = 0;
};
MeanSe aggregate(const std::vector<double>& values);

ExperimentReport run_experiment(const SimConfig& config);

}  // namespace rprior
