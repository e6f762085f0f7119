#include "rprior/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
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

double log_fit_term(const StatSummary& s, double scale) {
  const double arg = static_cast<double>(s.n) * s.bhat_sq / (2.0 * scale);
  if (!(arg > 0.0)) throw DomainError("asymptotic criteria need bhat^2 > 0");
  return std::log(arg);
}

}  // namespace

CriterionScheme CriterionScheme::exact(const PriorScheme& prior, ZsMode zs_mode) {
  CriterionScheme s;
  s.kind = Kind::ExactEvidence;
  s.prior = prior;
  s.zs_mode = zs_mode;
  return s;
}

CriterionScheme CriterionScheme::asymptotic_hr() {
  CriterionScheme s;
  s.kind = Kind::AsymptoticHr;
  return s;
}

CriterionScheme CriterionScheme::asymptotic_hg(double a) {
  if (!(a > 2.0) || !std::isfinite(a)) throw DomainError("hyper-g requires a > 2, got " + fmt(a));
  CriterionScheme s;
  s.kind = Kind::AsymptoticHg;
  s.a = a;
  return s;
}

CriterionScheme CriterionScheme::asymptotic_zs() {
  CriterionScheme s;
  s.kind = Kind::AsymptoticZS;
  return s;
}

CriterionScheme CriterionScheme::aic() { return CriterionScheme{}; }

CriterionScheme CriterionScheme::aicc() {
  CriterionScheme s;
  s.kind = Kind::AICc;
  return s;
}

CriterionScheme CriterionScheme::bic() {
  CriterionScheme s;
  s.kind = Kind::BIC;
  return s;
}

std::string CriterionScheme::label() const {
  switch (kind) {
    case Kind::ExactEvidence: {
      std::string out = "exact:" + prior.label();
      if (prior.family == PriorScheme::Family::ZellnerSiow && zs_mode != ZsMode::Auto) {
        out += zs_mode == ZsMode::Series ? ":series" : ":asymptotic";
      }
      return out;
    }
    case Kind::AsymptoticHr: return "hr-asym";
    case Kind::AsymptoticHg: return "hg-asym:" + fmt(a);
    case Kind::AsymptoticZS: return "zs-asym";
    case Kind::AIC: return "aic";
    case Kind::AICc: return "aicc";
    case Kind::BIC: return "bic";
  }
  return "unknown";
}

double criterion_value(const StatSummary& stats, const CriterionScheme& scheme) {
  if (stats.k < 1) throw DomainError("criteria require K >= 1");
  if (stats.n < 1) throw DomainError("criteria require N >= 1");
  const double n = static_cast<double>(stats.n);
  const double k = static_cast<double>(stats.k);
  const bool fixed = stats.scenario.is_fixed();

  // Goodness-of-fit part shared by the information criteria.
  auto fit = [&] {
    if (fixed) return n * stats.q0;
    if (!(stats.q0 > 0.0)) throw DomainError("variable-sigma criteria need Q0 > 0");
    return n * std::log(stats.q0);
  };

  switch (scheme.kind) {
    case CriterionScheme::Kind::ExactEvidence:
      return -2.0 * log_evidence(stats, scheme.prior, scheme.zs_mode).log_evidence;
    case CriterionScheme::Kind::AsymptoticHr:
      if (fixed) {
        return n * stats.q0 + (k + 1.0) * log_fit_term(stats, 1.0) - 2.0 * ln_gamma(0.5 * k + 1.0);
      }
      return -n * stats.bhat_sq / stats.mean_sq + (k + 1.0) * log_fit_term(stats, stats.mean_sq) -
             2.0 * ln_gamma(0.5 * k + 1.0);
    case CriterionScheme::Kind::AsymptoticHg: {
      const double p = k + scheme.a - 2.0;
      if (fixed) return n * stats.q0 + p * log_fit_term(stats, 1.0) - 2.0 * ln_gamma(0.5 * p);
      return -n * stats.bhat_sq / stats.mean_sq + p * log_fit_term(stats, stats.mean_sq) -
             2.0 * ln_gamma(0.5 * p);
    }
    case CriterionScheme::Kind::AsymptoticZS:
      if (fixed) return n * stats.q0 + k * std::log(0.5 * n) - 2.0 * ln_gamma(0.5 * (k + 1.0));
      if (!(stats.mean_sq > 0.0) || !(stats.bhat_sq < stats.mean_sq)) {
        throw DomainError("variable-sigma ZS criterion needs bhat^2 < <y^2>");
      }
      return n * std::log1p(-stats.bhat_sq / stats.mean_sq) + k * std::log(0.5 * n) -
             2.0 * ln_gamma(0.5 * (k + 1.0));
    case CriterionScheme::Kind::AIC:
      return fit() + 2.0 * k;
    case CriterionScheme::Kind::AICc:
      if (!(n > k + 1.0)) {
        throw DomainError("AICc requires N > K + 1, got N=" + std::to_string(stats.n) +
                          ", K=" + std::to_string(stats.k));
      }
      return fit() + 2.0 * k + 2.0 * k * (k + 1.0) / (n - k - 1.0);
    case CriterionScheme::Kind::BIC:
      return fit() + k * std::log(n);
  }
  throw UnsupportedSchemeError("unknown criterion");
}

double log_bayes_factor(const EvidenceValue& a, const EvidenceValue& b) {
  if (a.scenario.kind != b.scenario.kind) {
    throw DomainError("Bayes factor between different scenarios");
  }
  if (a.scheme.family != b.scheme.family) {
    throw DomainError("Bayes factor between different prior families");
  }
  return a.log_evidence - b.log_evidence;
}

std::vector<double> posterior_probabilities(const std::vector<double>& log_evidences,
                                            const std::vector<double>& log_priors) {
  if (log_evidences.empty()) throw DomainError("posterior probabilities of an empty model list");
  if (!log_priors.empty() && log_priors.size() != log_evidences.size()) {
    throw DomainError("model priors and evidences differ in length");
  }
  std::vector<double> w(log_evidences.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = log_evidences[i] + (log_priors.empty() ? 0.0 : log_priors[i]);
    if (std::isnan(w[i])) throw DomainError("NaN log evidence");
  }
  const double hi = *std::max_element(w.begin(), w.end());
  if (!std::isfinite(hi)) throw DomainError("no model has finite posterior weight");
  double total = 0.0;
  for (double& v : w) {
    v = std::exp(v - hi);
    total += v;
  }
  for (double& v : w) v /= total;
  return w;
}

std::vector<double> posterior_probabilities(const std::vector<EvidenceValue>& evidences,
                                            const std::vector<double>& log_priors) {
  std::vector<double> logs;
  logs.reserve(evidences.size());
  for (const EvidenceValue& e : evidences) logs.push_back(e.log_evidence);
  return posterior_probabilities(logs, log_priors);
}

std::size_t select_best(const std::vector<Candidate>& candidates) {
  if (candidates.empty()) throw DomainError("select_best on an empty candidate list");
  double lo = std::numeric_limits<double>::infinity();
  for (const Candidate& c : candidates) {
    if (!std::isnan(c.criterion)) lo = std::min(lo, c.criterion);
  }
  std::size_t best = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Candidate& c = candidates[i];
    if (std::isnan(c.criterion) || c.criterion > lo + kTieTolerance) continue;
    if (best == candidates.size() || c.k < candidates[best].k ||
        (c.k == candidates[best].k && c.id < candidates[best].id)) {
      best = i;
    }
  }
  if (best == candidates.size()) throw DomainError("no candidate has a finite criterion");
  return best;
}

}  // namespace rprior
