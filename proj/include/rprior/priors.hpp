#pragma once

// Prior families over the radius r of the coefficient sphere and the
// equivalent mixing densities over g.

#include <cstddef>
#include <string>

namespace rprior {

struct PriorScheme {
  enum class Family { GPrior, HyperG, ZellnerSiow, ParabolicR };
  Family family = Family::ParabolicR;
  double param = 0.0;  // g for GPrior, a for HyperG, unused otherwise

  static PriorScheme gprior(double g);
  static PriorScheme hyper_g(double a = 3.0);
  static PriorScheme zellner_siow();
  static PriorScheme parabolic();

  /// Short name such as "gprior:2", "hyperg:3", "zs", "parabolic".
  std::string label() const;
};

inline constexpr double kDefaultHyperGA = 3.0;

/// ln p(r | sigma, K) for r > 0. Fixed-sigma variants use sigma = 1.
double r_prior_log_density(const PriorScheme& scheme, double r, double sigma, std::size_t k,
                           std::size_t n);

/// ln p(g | K, N) for g > 0. Throws UnsupportedSchemeError for the point-mass
/// GPrior.
double g_prior_log_density(const PriorScheme& scheme, double g, std::size_t k, std::size_t n);

}  // namespace rprior
