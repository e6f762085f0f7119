#include "rprior/priors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rprior/errors.hpp"
#include "rprior/specfun.hpp"

namespace rprior {
namespace {

using specfun::ln_gamma;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void check_scheme(const PriorScheme& s) {
  switch (s.family) {
    case PriorScheme::Family::GPrior:
      if (!(s.param > 0.0) || !std::isfinite(s.param)) {
        throw DomainError("g-prior requires finite g > 0, got " + fmt(s.param));
      }
      break;
    case PriorScheme::Family::HyperG:
      if (!(s.param > 2.0) || !std::isfinite(s.param)) {
        throw DomainError("hyper-g prior requires finite a > 2, got " + fmt(s.param));
      }
      break;
    default:
      break;
  }
}

void check_sizes(std::size_t k, std::size_t n) {
  if (k < 1) throw DomainError("model size K must be at least 1");
  if (n < 1) throw DomainError("sample size N must be at least 1");
}

// Tricomi U factor, failing loudly if it did not converge.
double log_u_checked(double a, double b, double z) {
  const specfun::EvalResult u = specfun::log_U(a, b, z);
  if (!u.converged) {
    throw NumericalError("U(" + fmt(a) + ", " + fmt(b) + ", " + fmt(z) + ") did not converge");
  }
  return u.log_value;
}

}  // namespace

PriorScheme PriorScheme::gprior(double g) {
  PriorScheme s{Family::GPrior, g};
  check_scheme(s);
  return s;
}

PriorScheme PriorScheme::hyper_g(double a) {
  PriorScheme s{Family::HyperG, a};
  check_scheme(s);
  return s;
}

PriorScheme PriorScheme::zellner_siow() { return {Family::ZellnerSiow, 0.0}; }

PriorScheme PriorScheme::parabolic() { return {Family::ParabolicR, 0.0}; }

std::string PriorScheme::label() const {
  switch (family) {
    case Family::GPrior: return "gprior:" + fmt(param);
    case Family::HyperG: return "hyperg:" + fmt(param);
    case Family::ZellnerSiow: return "zs";
    case Family::ParabolicR: return "parabolic";
  }
  return "unknown";
}

double r_prior_log_density(const PriorScheme& scheme, double r, double sigma, std::size_t k,
                           std::size_t n) {
  check_scheme(scheme);
  check_sizes(k, n);
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("r must be positive, got " + fmt(r));
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("sigma must be positive, got " + fmt(sigma));
  }
  const double kd = static_cast<double>(k);
  const double t = static_cast<double>(n) * r * r / (2.0 * sigma * sigma);
  const double log_t = std::log(t);
  const double log_r = std::log(r);

  switch (scheme.family) {
    case PriorScheme::Family::GPrior: {
      const double tg = t / scheme.param;
      return std::numbers::ln2 - log_r - ln_gamma(0.5 * kd) + 0.5 * kd * std::log(tg) - tg;
    }
    case PriorScheme::Family::HyperG: {
      const double a = scheme.param;
      const double au = 0.5 * (a + kd) - 1.0;
      return ln_gamma(au) - ln_gamma(0.5 * kd) + std::log(a - 2.0) - log_r + 0.5 * kd * log_t +
             log_u_checked(au, 0.5 * kd, t);
    }
    case PriorScheme::Family::ZellnerSiow:
      return ln_gamma(0.5 * (kd + 1.0)) - ln_gamma(0.5 * kd) - ln_gamma(0.5) +
             std::numbers::ln2 + std::log(sigma) + (kd - 1.0) * log_r -
             0.5 * (kd + 1.0) * std::log(sigma * sigma + r * r);
    case PriorScheme::Family::ParabolicR:
      return std::log(kd) - log_r - 0.5 * std::log(std::numbers::pi) + 0.5 * kd * log_t +
             log_u_checked(0.5 * (kd + 1.0), 0.5, t);
  }
  throw UnsupportedSchemeError("unknown prior family");
}

double g_prior_log_density(const PriorScheme& scheme, double g, std::size_t k, std::size_t n) {
  check_scheme(scheme);
  check_sizes(k, n);
  if (!(g > 0.0) || !std::isfinite(g)) throw DomainError("g must be positive, got " + fmt(g));
  const double kd = static_cast<double>(k);
  switch (scheme.family) {
    case PriorScheme::Family::GPrior:
      throw UnsupportedSchemeError("the g-prior is a point mass in g and has no g-density");
    case PriorScheme::Family::HyperG: {
      const double a = scheme.param;
      return std::log(a - 2.0) - std::numbers::ln2 - 0.5 * a * std::log1p(g);
    }
    case PriorScheme::Family::ZellnerSiow: {
      const double nd = static_cast<double>(n);
      return 0.5 * std::log(nd / (2.0 * std::numbers::pi)) - nd / (2.0 * g) - 1.5 * std::log(g);
    }
    case PriorScheme::Family::ParabolicR:
      return ln_gamma(1.0 + 0.5 * kd) - 0.5 * std::log(std::numbers::pi) -
             ln_gamma(0.5 * (kd + 1.0)) + 0.5 * (kd - 1.0) * std::log(g) -
             (0.5 * kd + 1.0) * std::log1p(g);
  }
  throw UnsupportedSchemeError("unknown prior family");
}

}  // namespace rprior
