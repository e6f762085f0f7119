#include "rprior/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "rprior/errors.hpp"

namespace rprior {
namespace {

void check_design(const Eigen::MatrixXd& x, Eigen::Index n) {
  if (x.cols() < 1) throw InputError("design must have at least one column");
  if (x.rows() != n) {
    throw InputError("design has " + std::to_string(x.rows()) + " rows but there are " +
                     std::to_string(n) + " responses");
  }
  if (x.cols() > x.rows()) {
    throw InputError("design has more columns (" + std::to_string(x.cols()) + ") than rows (" +
                     std::to_string(x.rows()) + ")");
  }
  if (!x.allFinite()) throw InputError("design contains non-finite entries");
}

}  // namespace

double log_c_sigma(const Eigen::VectorXd& sigma) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    s += std::log(2.0 * std::numbers::pi * sigma[i] * sigma[i]);
  }
  return -0.5 * s;
}

Standardized standardize(const Dataset& dataset, const Eigen::MatrixXd& design) {
  if (!dataset.sigma) throw DomainError("standardize requires known sigma values");
  const Eigen::VectorXd& sigma = *dataset.sigma;
  const Eigen::Index n = dataset.y.size();
  if (sigma.size() != n) throw InputError("sigma length does not match responses");
  if (design.rows() != n) throw InputError("design rows do not match responses");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(sigma[i] > 0.0) || !std::isfinite(sigma[i])) {
      throw DomainError("sigma[" + std::to_string(i) + "] must be positive and finite");
    }
  }
  Standardized out;
  out.z = dataset.y.cwiseQuotient(sigma);
  out.x = sigma.cwiseInverse().asDiagonal() * design;
  out.ln_c_sigma = log_c_sigma(sigma);
  return out;
}

SufficientStats diagonalize(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                            Scenario scenario) {
  const Eigen::Index n = y.size();
  if (n < 1) throw InputError("need at least one observation");
  if (!y.allFinite()) throw InputError("responses contain non-finite values");
  check_design(design, n);
  const Eigen::Index k = design.cols();
  const double nd = static_cast<double>(n);

  const Eigen::MatrixXd h_mat = design.transpose() * design / nd;
  const Eigen::VectorXd h = design.transpose() * y / nd;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h_mat);
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");

  // Eigen returns ascending order; reverse and fix signs.
  SufficientStats s;
  s.eigenvalues = eig.eigenvalues().reverse();
  s.eigenvectors = eig.eigenvectors().rowwise().reverse();
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::Index imax = 0;
    s.eigenvectors.col(j).cwiseAbs().maxCoeff(&imax);
    if (s.eigenvectors(imax, j) < 0.0) s.eigenvectors.col(j) *= -1.0;
  }
  const double lmax = s.eigenvalues[0];
  const double lmin = s.eigenvalues[k - 1];
  if (!(lmax > 0.0) || lmin <= kRankTolerance * lmax) {
    throw SingularDesignError("design is rank deficient: smallest eigenvalue " +
                                  std::to_string(lmin) + " vs largest " + std::to_string(lmax),
                              lmin);
  }

  const Eigen::VectorXd sth = s.eigenvectors.transpose() * h;
  s.bhat = sth.cwiseQuotient(s.eigenvalues.cwiseSqrt());
  s.beta_hat = s.eigenvectors * sth.cwiseQuotient(s.eigenvalues);

  s.n = static_cast<std::size_t>(n);
  s.k = static_cast<std::size_t>(k);
  s.scenario = scenario;
  s.mean_sq = y.squaredNorm() / nd;
  s.bhat_sq = s.bhat.squaredNorm();
  s.q0 = s.mean_sq - s.bhat_sq;

  const double direct = (y - design * s.beta_hat).squaredNorm() / nd;
  if (std::abs(s.q0 - direct) > 1e-8 * std::max(s.mean_sq, direct)) {
    s.q0 = direct;
    s.q0_from_residual = true;
  }
  if (s.q0 < 0.0) {
    s.q0 = 0.0;
    s.q0_clamped = true;
  }
  if (s.bhat_sq > s.mean_sq) s.bhat_sq = s.mean_sq;
  return s;
}

Eigen::VectorXd back_transform(const SufficientStats& stats, const Eigen::VectorXd& b) {
  if (static_cast<std::size_t>(b.size()) != stats.k) {
    throw InputError("back_transform: expected " + std::to_string(stats.k) +
                     " components, got " + std::to_string(b.size()));
  }
  return stats.eigenvectors * b.cwiseQuotient(stats.eigenvalues.cwiseSqrt());
}

NestedDesign::NestedDesign(Eigen::MatrixXd design) : x_(std::move(design)) {
  check_design(x_, x_.rows());
  qr_.compute(x_);
  const Eigen::Index k = x_.cols();
  r_ = qr_.matrixQR().topRows(k).triangularView<Eigen::Upper>();

  // Interlacing: every leading block is at least as well conditioned as the
  // full design, so checking the full H covers all nested candidates.
  const Eigen::MatrixXd h = r_.transpose() * r_ / static_cast<double>(x_.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();
  if (!(lmax > 0.0) || lmin <= kRankTolerance * lmax) {
    throw SingularDesignError("design is rank deficient: smallest eigenvalue " +
                                  std::to_string(lmin) + " vs largest " + std::to_string(lmax),
                              lmin);
  }
}

Eigen::VectorXd NestedDesign::project(const Eigen::VectorXd& y) const {
  if (y.size() != x_.rows()) throw InputError("response length does not match design rows");
  Eigen::VectorXd qty = y;
  qty.applyOnTheLeft(qr_.householderQ().transpose());
  return qty.head(x_.cols());
}

std::vector<StatSummary> NestedDesign::summaries(const Eigen::VectorXd& y,
                                                 Scenario scenario) const {
  const Eigen::VectorXd qty = project(y);
  const double nd = static_cast<double>(x_.rows());
  const double mean_sq = y.squaredNorm() / nd;
  std::vector<StatSummary> out;
  out.reserve(k_max());
  double acc = 0.0;
  for (std::size_t k = 1; k <= k_max(); ++k) {
    const double q = qty[static_cast<Eigen::Index>(k - 1)];
    acc += q * q;
    StatSummary s;
    s.n = n();
    s.k = k;
    s.mean_sq = mean_sq;
    s.bhat_sq = std::min(acc / nd, mean_sq);
    s.q0 = std::max(mean_sq - s.bhat_sq, 0.0);
    s.scenario = scenario;
    out.push_back(s);
  }
  return out;
}

Eigen::VectorXd NestedDesign::coefficients(const Eigen::VectorXd& qty, std::size_t k) const {
  if (k < 1 || k > k_max()) throw InputError("model size out of range");
  const auto kk = static_cast<Eigen::Index>(k);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(x_.cols());
  beta.head(kk) = r_.topLeftCorner(kk, kk).triangularView<Eigen::Upper>().solve(qty.head(kk));
  return beta;
}

double NestedDesign::fitted_distance_sq(const Eigen::VectorXd& beta_a,
                                        const Eigen::VectorXd& beta_b) const {
  return (r_.triangularView<Eigen::Upper>() * (beta_a - beta_b)).squaredNorm();
}

}  // namespace rprior
