#include "doctest.h"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "rprior/errors.hpp"
#include "rprior/priors.hpp"

using namespace rprior;

namespace {

// Integral over (0, inf) by Boost's exp-sinh rule.
template <class F>
double integrate_halfline(F f) {
  boost::math::quadrature::exp_sinh<double> rule;
  return rule.integrate(f, 1e-14);
}

const PriorScheme kRFamilies[] = {PriorScheme::gprior(0.5), PriorScheme::gprior(20.0),
                                  PriorScheme::hyper_g(3.0), PriorScheme::hyper_g(4.5),
                                  PriorScheme::zellner_siow(), PriorScheme::parabolic()};

}  // namespace

TEST_SUITE("priors") {

TEST_CASE("g-prior r-density example") {
  // K = 2, N = 2, g = 1: density 2 r exp(-r^2).
  const double v = r_prior_log_density(PriorScheme::gprior(1.0), 1.0, 1.0, 2, 2);
  CHECK(v == doctest::Approx(std::log(2.0) - 1.0).epsilon(1e-13));
  CHECK(v == doctest::Approx(-0.306853).epsilon(1e-6));
  for (double r : {0.1, 0.7, 2.5}) {
    CHECK(r_prior_log_density(PriorScheme::gprior(1.0), r, 1.0, 2, 2) ==
          doctest::Approx(std::log(2.0 * r) - r * r).epsilon(1e-13));
  }
}

TEST_CASE("Zellner-Siow r-density for K = 1 is half-Cauchy near zero") {
  const double v = r_prior_log_density(PriorScheme::zellner_siow(), 1e-8, 1.0, 1, 1);
  CHECK(v == doctest::Approx(std::log(2.0 / std::numbers::pi)).epsilon(1e-8));
  CHECK(v == doctest::Approx(-0.451583).epsilon(1e-6));
}

TEST_CASE("r-densities integrate to one") {
  for (const PriorScheme& s : kRFamilies) {
    for (std::size_t k : {1u, 2u, 8u}) {
      for (double sigma : {0.5, 2.0}) {
        CAPTURE(s.label());
        CAPTURE(k);
        CAPTURE(sigma);
        const double total = integrate_halfline(
            [&](double r) { return std::exp(r_prior_log_density(s, r, sigma, k, 100)); });
        CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("sigma is a pure scale parameter") {
  for (const PriorScheme& s : kRFamilies) {
    for (double sigma : {0.3, 4.0}) {
      for (double r : {0.01, 0.4, 3.0, 50.0}) {
        const double lhs = r_prior_log_density(s, r, sigma, 3, 30);
        const double rhs = r_prior_log_density(s, r / sigma, 1.0, 3, 30) - std::log(sigma);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("tail and origin slopes") {
  auto slope = [](const PriorScheme& s, double r, std::size_t k) {
    const double h = 1e-4;
    return (r_prior_log_density(s, r * std::exp(h), 1.0, k, 50) -
            r_prior_log_density(s, r * std::exp(-h), 1.0, k, 50)) /
           (2.0 * h);
  };
  for (std::size_t k : {1u, 3u, 8u}) {
    CAPTURE(k);
    CHECK(slope(PriorScheme::zellner_siow(), 1e6, k) == doctest::Approx(-2.0).epsilon(1e-3));
    CHECK(slope(PriorScheme::parabolic(), 1e6, k) == doctest::Approx(-2.0).epsilon(1e-3));
    CHECK(slope(PriorScheme::parabolic(), 1e-6, k) == doctest::Approx(double(k) - 1.0).epsilon(1e-3));
  }
}

TEST_CASE("hyper-g g-density") {
  CHECK(g_prior_log_density(PriorScheme::hyper_g(3.0), 1e-12, 2, 50) ==
        doctest::Approx(-std::log(2.0)).epsilon(1e-10));
  for (double g : {0.1, 1.0, 30.0}) {
    // (a - 2)/2 (1 + g)^(-a/2).
    CHECK(g_prior_log_density(PriorScheme::hyper_g(4.0), g, 3, 20) ==
          doctest::Approx(-2.0 * std::log1p(g)).epsilon(1e-13));
  }
  const double total = integrate_halfline(
      [](double g) { return std::exp(g_prior_log_density(PriorScheme::hyper_g(4.0), g, 1, 10)); });
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("parabolic and Zellner-Siow g-densities in closed form") {
  for (double g : {0.01, 0.5, 8.0, 400.0}) {
    CHECK(g_prior_log_density(PriorScheme::parabolic(), g, 1, 10) ==
          doctest::Approx(std::log(0.5) - 1.5 * std::log1p(g)).epsilon(1e-12));
    // Inverse gamma with shape 1/2 and scale N/2.
    const double n = 40.0;
    const double ig = 0.5 * std::log(n / 2.0) - std::lgamma(0.5) - 1.5 * std::log(g) - n / (2.0 * g);
    CHECK(g_prior_log_density(PriorScheme::zellner_siow(), g, 3, 40) ==
          doctest::Approx(ig).epsilon(1e-12));
  }
}

TEST_CASE("g-densities integrate to one") {
  for (const PriorScheme& s :
       {PriorScheme::hyper_g(3.0), PriorScheme::hyper_g(6.0), PriorScheme::zellner_siow(),
        PriorScheme::parabolic()}) {
    for (std::size_t k : {1u, 4u, 16u}) {
      CAPTURE(s.label());
      CAPTURE(k);
      // Substitute g = e^u to tame the heavy tail and the origin.
      boost::math::quadrature::exp_sinh<double> rule;
      const double lo = rule.integrate(
          [&](double t) {
            const double g = std::exp(-t);
            return g > 0.0 ? std::exp(g_prior_log_density(s, g, k, 30) - t) : 0.0;
          },
          1e-14);
      const double hi = rule.integrate(
          [&](double t) {
            const double g = std::exp(t);
            return std::isfinite(g) ? std::exp(g_prior_log_density(s, g, k, 30) + t) : 0.0;
          },
          1e-14);
      CHECK(lo + hi == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("domain and unsupported combinations") {
  CHECK_THROWS_AS(g_prior_log_density(PriorScheme::gprior(1.0), 1.0, 1, 10), UnsupportedSchemeError);
  CHECK_THROWS_AS(PriorScheme::hyper_g(2.0), DomainError);
  CHECK_THROWS_AS(PriorScheme::gprior(0.0), DomainError);
  CHECK_THROWS_AS(r_prior_log_density(PriorScheme::parabolic(), -1.0, 1.0, 1, 10), DomainError);
  CHECK_THROWS_AS(r_prior_log_density(PriorScheme::parabolic(), 1.0, 0.0, 1, 10), DomainError);
  CHECK_THROWS_AS(r_prior_log_density(PriorScheme::parabolic(), 1.0, 1.0, 0, 10), DomainError);
  CHECK(PriorScheme::hyper_g(3.0).label() == "hyperg:3");
  CHECK(PriorScheme::zellner_siow().label() == "zs");
}

}  // TEST_SUITE
