#pragma once

// Data representation, fixed-sigma standardisation and the diagonalisation
// that reduces a linear model to its sufficient statistics.

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace rprior {

/// Either a single unknown sigma with a Jeffreys prior, or known per-point
/// widths whose log normalisation ln C_sigma is carried along.
struct Scenario {
  enum class Kind { FixedSigma, VariableSigma };
  Kind kind = Kind::VariableSigma;
  double ln_c_sigma = 0.0;

  static Scenario fixed(double ln_c_sigma) { return {Kind::FixedSigma, ln_c_sigma}; }
  static Scenario variable() { return {Kind::VariableSigma, 0.0}; }
  bool is_fixed() const { return kind == Kind::FixedSigma; }
};

struct Dataset {
  Eigen::VectorXd y;
  Eigen::VectorXd c;                    // sample points, metadata only
  std::optional<Eigen::VectorXd> sigma;  // known widths switch to fixed sigma
};

/// Scalar statistics that every evidence formula consumes.
struct StatSummary {
  std::size_t n = 0;
  std::size_t k = 0;
  double mean_sq = 0.0;  // <y^2>, or <z^2> for fixed sigma
  double bhat_sq = 0.0;
  double q0 = 0.0;
  Scenario scenario;
};

struct SufficientStats : StatSummary {
  Eigen::VectorXd bhat;
  Eigen::VectorXd beta_hat;
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd eigenvectors;  // columns match eigenvalues
  bool q0_clamped = false;        // tiny negative Q0 set to zero
  bool q0_from_residual = false;  // direct residual replaced <y^2> - b^2
};

struct Standardized {
  Eigen::VectorXd z;
  Eigen::MatrixXd x;
  double ln_c_sigma = 0.0;
};

inline constexpr double kRankTolerance = 1e-10;

/// Divides responses and design rows by the known widths.
Standardized standardize(const Dataset& dataset, const Eigen::MatrixXd& design);

/// ln C_sigma = -1/2 sum ln(2 pi sigma_n^2).
double log_c_sigma(const Eigen::VectorXd& sigma);

/// Eigendecomposition of H = X^T X / N and the statistics derived from it.
SufficientStats diagonalize(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                            Scenario scenario = Scenario::variable());

/// beta = S L^{-1/2} b.
Eigen::VectorXd back_transform(const SufficientStats& stats, const Eigen::VectorXd& b);

/// Nested models built from the leading columns of one design. A single
/// Householder QR serves every size K = 1..k_max.
class NestedDesign {
 public:
  explicit NestedDesign(Eigen::MatrixXd design);

  std::size_t n() const { return static_cast<std::size_t>(x_.rows()); }
  std::size_t k_max() const { return static_cast<std::size_t>(x_.cols()); }
  const Eigen::MatrixXd& design() const { return x_; }

  /// Q^T y restricted to the first k_max components.
  Eigen::VectorXd project(const Eigen::VectorXd& y) const;

  /// Statistics of the models K = 1..k_max, element K-1 for size K.
  std::vector<StatSummary> summaries(const Eigen::VectorXd& y, Scenario scenario) const;

  /// Least-squares coefficients of the size-K model, zero-padded to k_max.
  Eigen::VectorXd coefficients(const Eigen::VectorXd& qty, std::size_t k) const;

  /// ||X (beta_a - beta_b)||^2 for full-length coefficient vectors.
  double fitted_distance_sq(const Eigen::VectorXd& beta_a, const Eigen::VectorXd& beta_b) const;

 private:
  Eigen::MatrixXd x_;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr_;
  Eigen::MatrixXd r_;
};

}  // namespace rprior
