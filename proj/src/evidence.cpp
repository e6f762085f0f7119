#include "rprior/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "rprior/errors.hpp"
#include "rprior/specfun.hpp"

namespace rprior {

const char* to_string(EvidenceValue::Method method) {
  switch (method) {
    case EvidenceValue::Method::ClosedForm: return "closed-form";
    case EvidenceValue::Method::Series: return "series";
    case EvidenceValue::Method::Quadrature: return "quadrature";
    case EvidenceValue::Method::Asymptotic: return "asymptotic";
  }
  return "unknown";
}

namespace {

// g / (1 + g) without overflow for huge g.
double shrinkage(double g) { return g <= 1.0 ? g / (1.0 + g) : 1.0 / (1.0 + 1.0 / g); }

using specfun::ln_gamma;
constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLnPi = std::log(std::numbers::pi);

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void check_stats(const StatSummary& s) {
  if (s.k < 1) throw DomainError("evidence requires K >= 1");
  if (s.n < 1) throw DomainError("evidence requires N >= 1");
  if (!std::isfinite(s.mean_sq) || s.mean_sq < 0.0) {
    throw DomainError("mean square must be finite and nonnegative, got " + fmt(s.mean_sq));
  }
  if (!std::isfinite(s.bhat_sq) || s.bhat_sq < 0.0) {
    throw DomainError("bhat^2 must be finite and nonnegative, got " + fmt(s.bhat_sq));
  }
}

// b^2 / <y^2> for the variable-sigma forms; must lie in [0, 1).
double fit_ratio(const StatSummary& s) {
  if (!(s.mean_sq > 0.0)) throw DomainError("variable-sigma evidence requires <y^2> > 0");
  const double w = s.bhat_sq / s.mean_sq;
  if (!(w < 1.0)) {
    throw DomainError("variable-sigma evidence requires bhat^2/<y^2> < 1, got " + fmt(w));
  }
  return w;
}

EvidenceValue from_specfun(const specfun::EvalResult& r, double offset, const PriorScheme& scheme,
                           Scenario scenario) {
  EvidenceValue ev;
  ev.log_evidence = offset + r.log_value;
  ev.scheme = scheme;
  ev.scenario = scenario;
  ev.method = EvidenceValue::Method::ClosedForm;
  ev.terms = r.terms_used;
  ev.converged = r.converged;
  return ev;
}

// sum_j exp(log_term(j)), stopping once terms decrease below the series
// tolerance relative to the running sum.
struct LogSeries {
  double log_sum = -kInf;
  std::size_t terms = 0;
  double rel_tail = 0.0;
  bool converged = false;
};

template <class Term>
LogSeries sum_log_terms(Term&& log_term, bool single_term) {
  LogSeries out;
  const double log_tol = std::log(specfun::kSeriesTolerance);
  double prev = -kInf;
  double last = -kInf;
  int small = 0;
  for (std::size_t j = 0; j < kZsMaxTerms; ++j) {
    bool ok = true;
    const double lt = log_term(j, ok);
    if (!ok) return out;
    out.log_sum = log_add(out.log_sum, lt);
    out.terms = j + 1;
    last = lt;
    if (single_term) {
      out.converged = true;
      return out;
    }
    if (j > 0 && lt < prev && lt - out.log_sum < log_tol) {
      if (++small >= specfun::kConsecutiveSmallTerms) {
        out.converged = true;
        break;
      }
    } else {
      small = 0;
    }
    prev = lt;
  }
  const double ratio = std::exp(last - prev);
  out.rel_tail = ratio < 1.0 ? std::exp(last - out.log_sum) * ratio / (1.0 - ratio) : kInf;
  return out;
}

EvidenceValue from_series(const LogSeries& s, double offset, const PriorScheme& scheme,
                          Scenario scenario) {
  EvidenceValue ev;
  ev.log_evidence = offset + s.log_sum;
  ev.scheme = scheme;
  ev.scenario = scenario;
  ev.method = EvidenceValue::Method::Series;
  ev.terms = std::max<std::size_t>(s.terms, 1);
  ev.abs_err_estimate = s.rel_tail;
  ev.converged = s.converged;
  return ev;
}

bool use_zs_asymptotic(ZsMode mode, double series_arg) {
  switch (mode) {
    case ZsMode::Series: return false;
    case ZsMode::Asymptotic: return true;
    case ZsMode::Auto: return series_arg > kZsSeriesLimit;
  }
  return false;
}

// Terms the variable-sigma Zellner-Siow series needs. For large j its terms
// behave like j^p w^j with p = (N - K - 3) / 2.
double zs_series_terms_needed(double n, double k, double w) {
  if (w <= 0.0) return 1.0;
  const double lw = -std::log(w);
  const double p = std::max(0.5 * (n - k - 3.0), 0.0);
  const double j0 = p / lw;
  const double drop = -std::log(specfun::kSeriesTolerance);
  double j = j0 + drop / lw;
  for (int it = 0; it < 50 && p > 0.0; ++it) {
    j = j0 + (drop + p * std::log(j / std::max(j0, 1.0))) / lw;
  }
  return j;
}

// Variable-sigma Zellner-Siow evidence as a single integral over u = ln g of
// the g-prior evidence, whose sigma integral is closed form.
EvidenceValue zs_variable_g_integral(const StatSummary& stats, const PriorScheme& scheme, double w) {
  const double n = static_cast<double>(stats.n);
  const double k = static_cast<double>(stats.k);
  const double lead = ln_gamma(0.5 * n) - std::numbers::ln2 -
                      0.5 * n * std::log(n * std::numbers::pi * stats.mean_sq);
  auto log_f = [&](double u) {
    const double g = std::exp(u);
    if (!(g > 0.0) || !std::isfinite(g)) return -kInf;
    return g_prior_log_density(scheme, g, stats.k, stats.n) + u - 0.5 * k * std::log1p(g) -
           0.5 * n * std::log1p(-w * shrinkage(g));
  };
  const double center = std::log(std::max(n * w / (k * (1.0 - w)), 1.0));
  const quadrature::Peak peak = quadrature::locate_peak_line(log_f, center, 1.0);
  const quadrature::LogResult res = quadrature::integrate_log_line(log_f, peak);
  EvidenceValue ev;
  ev.log_evidence = lead + res.log_value;
  ev.scheme = scheme;
  ev.scenario = stats.scenario;
  ev.method = EvidenceValue::Method::Quadrature;
  ev.terms = res.evaluations;
  ev.abs_err_estimate = res.rel_error;
  ev.converged = res.converged;
  return ev;
}

}  // namespace

double conditional_log_evidence(const StatSummary& stats, double r, double sigma) {
  check_stats(stats);
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("r must be nonnegative, got " + fmt(r));
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("sigma must be positive, got " + fmt(sigma));
  }
  const double n = static_cast<double>(stats.n);
  const double k = static_cast<double>(stats.k);
  const double s2 = sigma * sigma;
  const double norm = stats.scenario.is_fixed() ? stats.scenario.ln_c_sigma
                                                : -0.5 * n * std::log(2.0 * std::numbers::pi * s2);
  const double z = n * n * stats.bhat_sq * r * r / (4.0 * s2 * s2);
  const specfun::EvalResult f = specfun::log_0F1(0.5 * k, z);
  if (!f.converged) throw NumericalError("0F1 did not converge at z=" + fmt(z));
  return norm - n * (stats.mean_sq + r * r) / (2.0 * s2) + f.log_value;
}

EvidenceValue log_evidence_fixed_sigma(const StatSummary& stats, const PriorScheme& scheme,
                                       ZsMode zs_mode) {
  check_stats(stats);
  if (!stats.scenario.is_fixed()) throw DomainError("statistics are not in the fixed-sigma scenario");
  const double n = static_cast<double>(stats.n);
  const double k = static_cast<double>(stats.k);
  const double bsq = stats.bhat_sq;
  const double l0 = stats.scenario.ln_c_sigma - 0.5 * n * stats.mean_sq;
  const double x = 0.5 * n * bsq;

  switch (scheme.family) {
    case PriorScheme::Family::ParabolicR:
      return from_specfun(specfun::log_1F1(0.5 * (k + 1.0), k + 1.0, x),
                          l0 - k * std::numbers::ln2, scheme, stats.scenario);
    case PriorScheme::Family::HyperG: {
      const double a = PriorScheme::hyper_g(scheme.param).param;
      return from_specfun(specfun::log_1F1(1.0, 0.5 * (k + a), x),
                          l0 + std::log((a - 2.0) / (k + a - 2.0)), scheme, stats.scenario);
    }
    case PriorScheme::Family::GPrior: {
      const double g = PriorScheme::gprior(scheme.param).param;
      EvidenceValue ev;
      ev.log_evidence = l0 - 0.5 * k * std::log1p(g) + x * shrinkage(g);
      ev.scheme = scheme;
      ev.scenario = stats.scenario;
      return ev;
    }
    case PriorScheme::Family::ZellnerSiow: {
      const double arg = 0.25 * n * n * bsq;
      const double lg = ln_gamma(0.5 * (k + 1.0));
      if (use_zs_asymptotic(zs_mode, arg)) {
        EvidenceValue ev;
        ev.log_evidence = stats.scenario.ln_c_sigma - 0.5 * n * stats.q0 + lg +
                          0.5 * k * std::log(2.0 / n);
        ev.scheme = scheme;
        ev.scenario = stats.scenario;
        ev.method = EvidenceValue::Method::Asymptotic;
        return ev;
      }
      const double log_arg = arg > 0.0 ? std::log(arg) : -kInf;
      auto term = [&](std::size_t j, bool& ok) {
        const double jd = static_cast<double>(j);
        const specfun::EvalResult u = specfun::log_U(0.5 * k + jd, 0.5 + jd, 0.5 * n);
        ok = u.converged;
        return (j == 0 ? 0.0 : jd * log_arg) - std::lgamma(jd + 1.0) + u.log_value;
      };
      const LogSeries s = sum_log_terms(term, arg == 0.0);
      return from_series(s, l0 - 0.5 * kLnPi + lg, scheme, stats.scenario);
    }
  }
  throw UnsupportedSchemeError("unknown prior family");
}

EvidenceValue log_evidence_variable_sigma(const StatSummary& stats, const PriorScheme& scheme,
                                          ZsMode zs_mode) {
  check_stats(stats);
  if (stats.scenario.is_fixed()) throw DomainError("statistics are not in the variable-sigma scenario");
  const double w = fit_ratio(stats);
  const double n = static_cast<double>(stats.n);
  const double k = static_cast<double>(stats.k);
  const double lg_n = ln_gamma(0.5 * n);
  const double base = -0.5 * n * std::log(n * std::numbers::pi * stats.mean_sq);

  switch (scheme.family) {
    case PriorScheme::Family::ParabolicR:
      return from_specfun(specfun::log_2F1(0.5 * (k + 1.0), 0.5 * n, k + 1.0, w),
                          lg_n - (k + 1.0) * std::numbers::ln2 + base, scheme, stats.scenario);
    case PriorScheme::Family::HyperG: {
      const double a = PriorScheme::hyper_g(scheme.param).param;
      return from_specfun(specfun::log_2F1(1.0, 0.5 * n, 0.5 * (k + a), w),
                          std::log(a - 2.0) + lg_n - std::numbers::ln2 - std::log(k + a - 2.0) + base,
                          scheme, stats.scenario);
    }
    case PriorScheme::Family::GPrior: {
      const double g = PriorScheme::gprior(scheme.param).param;
      const double s = stats.mean_sq / (1.0 + g) +
                        std::max(stats.mean_sq - stats.bhat_sq, 0.0) * shrinkage(g);
      EvidenceValue ev;
      ev.log_evidence = lg_n - std::numbers::ln2 - 0.5 * k * std::log1p(g) -
                        0.5 * n * std::log(n * std::numbers::pi * s);
      ev.scheme = scheme;
      ev.scenario = stats.scenario;
      return ev;
    }
    case PriorScheme::Family::ZellnerSiow: {
      const double lg = ln_gamma(0.5 * (k + 1.0));
      const double pre = lg - std::log(2.0 * std::sqrt(std::numbers::pi)) + base;
      if (use_zs_asymptotic(zs_mode, 0.25 * n * n * w)) {
        EvidenceValue ev;
        ev.log_evidence = pre + lg_n + 0.5 * k * std::log(2.0 / n) - 0.5 * n * std::log1p(-w);
        ev.scheme = scheme;
        ev.scenario = stats.scenario;
        ev.method = EvidenceValue::Method::Asymptotic;
        return ev;
      }
      // Close to a perfect fit the series needs more terms than the cap.
      if (zs_mode == ZsMode::Auto &&
          zs_series_terms_needed(n, k, w) > 0.5 * static_cast<double>(kZsMaxTerms)) {
        return zs_variable_g_integral(stats, scheme, w);
      }
      const double log_arg = w > 0.0 ? std::log(0.5 * n * w) : -kInf;
      auto term = [&](std::size_t j, bool& ok) {
        const double jd = static_cast<double>(j);
        const specfun::EvalResult u = specfun::log_U(0.5 * k + jd, 0.5 + jd, 0.5 * n);
        ok = u.converged;
        return (j == 0 ? 0.0 : jd * log_arg) + ln_gamma(jd + 0.5 * n) - std::lgamma(jd + 1.0) +
               u.log_value;
      };
      const LogSeries s = sum_log_terms(term, w == 0.0);
      if (!s.converged && zs_mode == ZsMode::Auto) return zs_variable_g_integral(stats, scheme, w);
      return from_series(s, pre, scheme, stats.scenario);
    }
  }
  throw UnsupportedSchemeError("unknown prior family");
}

EvidenceValue log_evidence(const StatSummary& stats, const PriorScheme& scheme, ZsMode zs_mode) {
  return stats.scenario.is_fixed() ? log_evidence_fixed_sigma(stats, scheme, zs_mode)
                                   : log_evidence_variable_sigma(stats, scheme, zs_mode);
}

// ---------------------------------------------------------------------------
// Quadrature oracle

namespace {

struct InnerResult {
  double log_value;
  double rel_error;
  std::size_t evaluations;
  bool converged;
};

// Integral over the mixing variable at a given sigma; log of
// int p(y | r, sigma) p(r | sigma) dr or int p(y | g, sigma) p(g) dg.
InnerResult inner_integral(const StatSummary& stats, const PriorScheme& scheme, Route route,
                           double sigma, const quadrature::Options& options) {
  const double n = static_cast<double>(stats.n);
  const double k = static_cast<double>(stats.k);
  const double s2 = sigma * sigma;
  const double norm = stats.scenario.is_fixed() ? stats.scenario.ln_c_sigma
                                                : -0.5 * n * std::log(2.0 * std::numbers::pi * s2);

  // ln p(y | g, sigma) for the Gaussian coefficient prior of scale g.
  auto log_given_g = [&](double g) {
    return norm - 0.5 * k * std::log1p(g) - n * stats.mean_sq / (2.0 * s2) +
           shrinkage(g) * n * stats.bhat_sq / (2.0 * s2);
  };

  if (route == Route::GPrior) {
    if (scheme.family == PriorScheme::Family::GPrior) {
      return {log_given_g(scheme.param), 0.0, 1, true};
    }
    auto log_f = [&](double u) {
      const double g = std::exp(u);
      if (!(g > 0.0) || !std::isfinite(g)) return -kInf;
      return g_prior_log_density(scheme, g, stats.k, stats.n) + u + log_given_g(g);
    };
    const double center = std::log(std::max(n * stats.bhat_sq / (s2 * k), 1.0));
    const quadrature::Peak peak = quadrature::locate_peak_line(log_f, center, 1.0);
    const quadrature::LogResult res = quadrature::integrate_log_line(log_f, peak, options);
    return {res.log_value, res.rel_error, res.evaluations, res.converged};
  }

  auto log_f = [&](double r) {
    return conditional_log_evidence(stats, r, sigma) +
           r_prior_log_density(scheme, r, sigma, stats.k, stats.n);
  };
  const double hint = stats.bhat_sq > 0.0 ? std::sqrt(stats.bhat_sq) : sigma / std::sqrt(n);
  const quadrature::Peak peak = quadrature::locate_peak_halfline(log_f, hint);
  const quadrature::LogResult res = quadrature::integrate_log_halfline(log_f, peak, options);
  return {res.log_value, res.rel_error, res.evaluations, res.converged};
}

}  // namespace

EvidenceValue quadrature_log_evidence(const StatSummary& stats, const PriorScheme& scheme,
                                      Route route, const quadrature::Options& options) {
  check_stats(stats);
  EvidenceValue ev;
  ev.scheme = scheme;
  ev.scenario = stats.scenario;
  ev.method = EvidenceValue::Method::Quadrature;

  if (stats.scenario.is_fixed()) {
    const InnerResult r = inner_integral(stats, scheme, route, 1.0, options);
    ev.log_evidence = r.log_value;
    ev.abs_err_estimate = r.rel_error;
    ev.terms = r.evaluations;
    ev.converged = r.converged;
    return ev;
  }

  fit_ratio(stats);
  const double n = static_cast<double>(stats.n);
  const double q0 = std::max(stats.q0, 1e-3 * stats.mean_sq);
  const double center = 0.25 * (std::log(q0) + std::log(stats.mean_sq));

  // max_b p(y | b, sigma) bounds the inner integral since the prior is
  // normalised; sigmas whose bound is negligible are skipped.
  auto log_bound = [&](double sigma) {
    const double s2 = sigma * sigma;
    return -0.5 * n * std::log(2.0 * std::numbers::pi * s2) - n * stats.q0 / (2.0 * s2);
  };
  constexpr double kNegligible = 60.0;

  struct Record {
    double log_value;
    double rel_error;
    bool converged;
  };
  std::vector<Record> records;
  std::size_t evaluations = 0;
  double best = -kInf;
  auto log_f = [&](double s) {
    // Beyond e^60 away from the bulk sigma^4 would under- or overflow.
    if (!(std::abs(s - center) <= 60.0)) return -kInf;
    const double sigma = std::exp(s);
    if (log_bound(sigma) < best - kNegligible) return -kInf;
    const InnerResult r = inner_integral(stats, scheme, route, sigma, options);
    evaluations += r.evaluations;
    if (!std::isfinite(r.log_value)) return -kInf;
    records.push_back({r.log_value, r.rel_error, r.converged});
    best = std::max(best, r.log_value);
    return r.log_value;
  };
  log_f(center);
  const quadrature::Peak peak = quadrature::locate_peak_line(log_f, center, 1.0 / std::sqrt(2.0 * n));
  const quadrature::LogResult res = quadrature::integrate_log_line(log_f, peak, options);

  // Only inner integrals that carry weight limit the accuracy.
  double worst_inner = 0.0;
  bool inner_ok = true;
  for (const Record& r : records) {
    if (r.log_value < best - 40.0) continue;
    worst_inner = std::max(worst_inner, r.rel_error);
    inner_ok = inner_ok && r.converged;
  }
  ev.log_evidence = res.log_value;
  ev.abs_err_estimate = res.rel_error + worst_inner;
  ev.terms = evaluations;
  ev.converged = res.converged && inner_ok;
  return ev;
}

}  // namespace rprior
