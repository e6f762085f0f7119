#include "rprior/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "rprior/errors.hpp"
#include "rprior/quadrature.hpp"

namespace rprior::specfun {

std::string_view to_string(Branch branch) {
  switch (branch) {
    case Branch::Trivial: return "trivial";
    case Branch::Series: return "series";
    case Branch::Asymptotic: return "asymptotic";
    case Branch::LinearTransform: return "linear-transform";
    case Branch::TwoKummer: return "two-kummer";
    case Branch::IntegerB: return "integer-b";
    case Branch::Integral: return "integral";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Pole-free digits lost before a cancelling branch is abandoned.
constexpr double kMaxLogCancellation = 9.21;  // ln(1e4)

[[noreturn]] void domain_error(const char* fn, const std::string& detail) {
  throw DomainError(std::string(fn) + ": " + detail);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::round(x); }

// ln|Gamma(x)| and the sign of Gamma(x) for x not a pole.
double ln_abs_gamma(double x, int& sign) {
  if (x > 0.0) {
    sign = 1;
    return boost::math::lgamma(x);
  }
  // The sign boost reports is unreliable once Gamma(x) underflows.
  const double v = boost::math::lgamma(x);
  sign = static_cast<long long>(std::floor(x)) % 2 == 0 ? 1 : -1;
  return v;
}

// Value stored as sign * exp(log_abs); sign 0 means exactly zero.
struct SignedLog {
  double log_abs = -kInf;
  int sign = 0;

  static SignedLog from(double v) {
    if (v == 0.0) return {};
    return {std::log(std::abs(v)), v > 0.0 ? 1 : -1};
  }
};

SignedLog operator+(SignedLog x, SignedLog y) {
  if (y.sign == 0) return x;
  if (x.sign == 0) return y;
  if (x.log_abs < y.log_abs) std::swap(x, y);
  const double r = std::exp(y.log_abs - x.log_abs);
  if (x.sign == y.sign) return {x.log_abs + std::log1p(r), x.sign};
  if (r >= 1.0) return {};
  return {x.log_abs + std::log1p(-r), x.sign};
}

SignedLog scaled(SignedLog x, double log_factor, int sign) {
  if (x.sign == 0 || sign == 0) return {};
  return {x.log_abs + log_factor, x.sign * sign};
}

struct SeriesSum {
  double log_sum = 0.0;
  std::size_t terms = 0;
  bool converged = false;
};

// Sum of a positive series t_0, t_1, ... with t_{k+1} = t_k * ratio(k), summed
// outward from the index `peak` of (approximately) the largest term, whose
// logarithm is `log_peak`. Terms are kept relative to that largest one, so
// nothing overflows however large the function value is.
template <class Ratio>
SeriesSum sum_from_peak(Ratio&& ratio, std::size_t peak, double log_peak) {
  double sum = 1.0;
  std::size_t terms = 1;

  bool up_done = false;
  double t = 1.0;
  int small = 0;
  for (std::size_t k = peak; terms < kMaxSeriesTerms; ++k) {
    t *= ratio(k);
    sum += t;
    ++terms;
    if (t <= kSeriesTolerance * sum) {
      if (++small >= kConsecutiveSmallTerms) {
        up_done = true;
        break;
      }
    } else {
      small = 0;
    }
  }

  bool down_done = true;
  if (peak > 0) {
    down_done = false;
    t = 1.0;
    small = 0;
    std::size_t k = peak;
    while (k > 0 && terms < kMaxSeriesTerms) {
      t /= ratio(k - 1);
      --k;
      sum += t;
      ++terms;
      if (t <= kSeriesTolerance * sum) {
        if (++small >= kConsecutiveSmallTerms) {
          down_done = true;
          break;
        }
      } else {
        small = 0;
      }
    }
    if (k == 0) down_done = true;
  }
  return {log_peak + std::log(sum), terms, up_done && down_done};
}

// Positive root of the quadratic q2 k^2 + q1 k + q0 = 0 (q2 > 0), rounded up
// and clamped at zero; this is where the term ratio of a series drops to 1.
std::size_t peak_index(double q2, double q1, double q0) {
  const double disc = q1 * q1 - 4.0 * q2 * q0;
  if (disc < 0.0) return 0;
  const double root = (-q1 + std::sqrt(disc)) / (2.0 * q2);
  if (!(root > 0.0)) return 0;
  return static_cast<std::size_t>(std::ceil(std::min(root, 1e15)));
}

// Truncated asymptotic expansion 1 + sum_k t_k. Gives up as soon as terms grow
// past `turn` (the index beyond which growth means divergence), or once a term
// is large enough that cancellation would cost more than a few digits.
constexpr double kMaxAsymptoticTerm = 1e4;

std::optional<SeriesSum> sum_asymptotic(auto&& ratio, double turn,
                                        std::size_t max_terms = 4000) {
  double sum = 1.0;
  double t = 1.0;
  double prev = 1.0;
  int small = 0;
  for (std::size_t k = 0; k < max_terms; ++k) {
    t *= ratio(k);
    if (t == 0.0) {
      if (!(sum > 0.0)) return std::nullopt;
      return SeriesSum{std::log(sum), k + 1, true};
    }
    if (std::abs(t) > kMaxAsymptoticTerm) return std::nullopt;
    sum += t;
    if (std::abs(t) <= kSeriesTolerance * std::abs(sum)) {
      if (++small >= kConsecutiveSmallTerms) {
        if (!(sum > 0.0)) return std::nullopt;
        return SeriesSum{std::log(sum), k + 2, true};
      }
    } else {
      small = 0;
    }
    if (std::abs(t) > prev && static_cast<double>(k) > turn) return std::nullopt;
    prev = std::abs(t);
  }
  return std::nullopt;
}

// Signed series sum_k (p)_k (q)_k / ((r)_k k!) w^k accumulated in log space;
// `q` may be absent (pass nullopt) for the confluent 1F1 case. Also reports the
// largest |term| so callers can judge cancellation.
struct SignedSeries {
  SignedLog value;
  double max_log_term = 0.0;
  std::size_t terms = 0;
  bool converged = false;
};

SignedSeries signed_series(double p, std::optional<double> q, double r, double w) {
  SignedSeries out;
  out.value = SignedLog{0.0, 1};
  double log_t = 0.0;
  int sign = 1;
  int small = 0;
  const double settle = std::max({0.0, -p, q ? -*q : 0.0, -r}) + 1.0;
  const double log_w = std::log(w);
  for (std::size_t k = 0; k < kMaxSeriesTerms; ++k) {
    const double kd = static_cast<double>(k);
    double num = (p + kd);
    if (q) num *= (*q + kd);
    if (num == 0.0) {  // terminating series
      out.terms = k + 1;
      out.converged = true;
      return out;
    }
    const double den = (r + kd) * (kd + 1.0);
    log_t += std::log(std::abs(num)) - std::log(std::abs(den)) + log_w;
    sign *= ((num > 0.0) == (den > 0.0)) ? 1 : -1;
    out.value = out.value + SignedLog{log_t, sign};
    out.max_log_term = std::max(out.max_log_term, log_t);
    // Terms can still grow after the sign changes settle; only a shrinking
    // term counts towards convergence.
    double next = (p + kd + 1.0) * w / ((r + kd + 1.0) * (kd + 2.0));
    if (q) next *= (*q + kd + 1.0);
    if (kd > settle && std::abs(next) < 1.0 &&
        log_t <= std::log(kSeriesTolerance) + out.value.log_abs) {
      if (++small >= kConsecutiveSmallTerms) {
        out.terms = k + 2;
        out.converged = out.value.sign != 0;
        return out;
      }
    } else {
      small = 0;
    }
  }
  out.terms = kMaxSeriesTerms;
  return out;
}

void check_finite(const char* fn, const char* name, double v) {
  if (!std::isfinite(v)) domain_error(fn, std::string(name) + " must be finite, got " + fmt(v));
}

}  // namespace

double ln_gamma(double x) {
  if (!std::isfinite(x) || x <= 0.0) {
    domain_error("ln_gamma", "argument must be finite and positive, got " + fmt(x));
  }
  return boost::math::lgamma(x);
}

// ---------------------------------------------------------------------------
// 0F1

EvalResult log_0F1(double b, double z) {
  check_finite("log_0F1", "b", b);
  check_finite("log_0F1", "z", z);
  if (b <= 0.0) domain_error("log_0F1", "b must be positive, got " + fmt(b));
  if (z < 0.0) domain_error("log_0F1", "z must be nonnegative, got " + fmt(z));
  if (z == 0.0) return {};

  // Bessel regime: 0F1(b; z) = Gamma(b) z^{(1-b)/2} I_{b-1}(2 sqrt z).
  const double x = 2.0 * std::sqrt(z);
  if (x >= 40.0) {
    const double nu = b - 1.0;
    const double mu = 4.0 * nu * nu;
    auto ratio = [&](std::size_t k) {
      const double odd = 2.0 * static_cast<double>(k) + 1.0;
      return -(mu - odd * odd) / ((static_cast<double>(k) + 1.0) * 8.0 * x);
    };
    if (auto s = sum_asymptotic(ratio, std::abs(nu) + 1.0)) {
      const double log_i = x - 0.5 * std::log(2.0 * M_PI * x) + s->log_sum;
      return {ln_gamma(b) + 0.5 * (1.0 - b) * std::log(z) + log_i, s->terms, true,
              Branch::Asymptotic};
    }
  }

  auto ratio = [&](std::size_t k) {
    const double kd = static_cast<double>(k);
    return z / ((b + kd) * (kd + 1.0));
  };
  const std::size_t peak = peak_index(1.0, b + 1.0, b - z);
  const double kp = static_cast<double>(peak);
  const double log_peak =
      peak == 0 ? 0.0
                : kp * std::log(z) - (std::lgamma(b + kp) - ln_gamma(b)) - std::lgamma(kp + 1.0);
  const SeriesSum s = sum_from_peak(ratio, peak, log_peak);
  return {s.log_sum, s.terms, s.converged, Branch::Series};
}

// ---------------------------------------------------------------------------
// 1F1

EvalResult log_1F1(double a, double b, double z) {
  check_finite("log_1F1", "a", a);
  check_finite("log_1F1", "b", b);
  check_finite("log_1F1", "z", z);
  if (a <= 0.0 || b <= 0.0) {
    domain_error("log_1F1", "a and b must be positive, got a=" + fmt(a) + ", b=" + fmt(b));
  }
  if (z < 0.0) domain_error("log_1F1", "z must be nonnegative, got " + fmt(z));
  if (z == 0.0) return {};

  if (z > 40.0 + 2.0 * std::max(a, b)) {
    // Gamma(b)/Gamma(a) e^z z^{a-b} sum_k (b-a)_k (1-a)_k / (k! z^k)
    auto ratio = [&](std::size_t k) {
      const double kd = static_cast<double>(k);
      return (b - a + kd) * (1.0 - a + kd) / ((kd + 1.0) * z);
    };
    const double turn = std::max(std::abs(b - a), std::abs(1.0 - a)) + 1.0;
    if (auto s = sum_asymptotic(ratio, turn)) {
      return {ln_gamma(b) - ln_gamma(a) + (a - b) * std::log(z) + z + s->log_sum, s->terms, true,
              Branch::Asymptotic};
    }
  }

  auto ratio = [&](std::size_t k) {
    const double kd = static_cast<double>(k);
    return (a + kd) * z / ((b + kd) * (kd + 1.0));
  };
  const std::size_t peak = peak_index(1.0, b + 1.0 - z, b - a * z);
  const double kp = static_cast<double>(peak);
  const double log_peak = peak == 0 ? 0.0
                                    : (std::lgamma(a + kp) - ln_gamma(a)) -
                                          (std::lgamma(b + kp) - ln_gamma(b)) +
                                          kp * std::log(z) - std::lgamma(kp + 1.0);
  const SeriesSum s = sum_from_peak(ratio, peak, log_peak);
  return {s.log_sum, s.terms, s.converged, Branch::Series};
}

// ---------------------------------------------------------------------------
// 2F1

namespace {

EvalResult gauss_series(double a, double b, double c, double z) {
  auto ratio = [&](std::size_t k) {
    const double kd = static_cast<double>(k);
    return (a + kd) * (b + kd) * z / ((c + kd) * (kd + 1.0));
  };
  const double q2 = 1.0 - z;
  const std::size_t peak = peak_index(q2, -((a + b) * z - c - 1.0), -(a * b * z - c));
  const double kp = static_cast<double>(peak);
  const double log_peak =
      peak == 0 ? 0.0
                : (std::lgamma(a + kp) - std::lgamma(a)) + (std::lgamma(b + kp) - std::lgamma(b)) -
                      (std::lgamma(c + kp) - std::lgamma(c)) + kp * std::log(z) -
                      std::lgamma(kp + 1.0);
  const SeriesSum s = sum_from_peak(ratio, peak, log_peak);
  return {s.log_sum, s.terms, s.converged, Branch::Series};
}

// Non-integer s = c - a - b:
//   F = G(c)G(s)/(G(c-a)G(c-b)) F(a,b;1-s;w)
//     + w^s G(c)G(-s)/(G(a)G(b)) F(c-a,c-b;1+s;w),   w = 1 - z.
std::optional<EvalResult> gauss_reflect_generic(double a, double b, double c, double w) {
  const double s = c - a - b;
  const double log_w = std::log(w);
  int sg = 0;
  const double lg_c = ln_abs_gamma(c, sg);

  SignedLog total;
  double worst = -kInf;
  std::size_t terms = 0;

  if (!is_nonpositive_integer(c - a) && !is_nonpositive_integer(c - b)) {
    int s1 = 0, s2 = 0, s3 = 0;
    const double lp = lg_c + ln_abs_gamma(s, s1) - ln_abs_gamma(c - a, s2) - ln_abs_gamma(c - b, s3);
    const SignedSeries f = signed_series(a, b, 1.0 - s, w);
    if (!f.converged) return std::nullopt;
    total = total + scaled(f.value, lp, s1 * s2 * s3);
    worst = std::max(worst, lp + f.max_log_term);
    terms += f.terms;
  }
  {
    int s1 = 0, s2 = 0, s3 = 0;
    const double lp = s * log_w + lg_c + ln_abs_gamma(-s, s1) - ln_abs_gamma(a, s2) -
                      ln_abs_gamma(b, s3);
    const SignedSeries f = signed_series(c - a, c - b, 1.0 + s, w);
    if (!f.converged) return std::nullopt;
    total = total + scaled(f.value, lp, s1 * s2 * s3);
    worst = std::max(worst, lp + f.max_log_term);
    terms += f.terms;
  }
  if (total.sign <= 0 || worst - total.log_abs > kMaxLogCancellation) return std::nullopt;
  return EvalResult{total.log_abs, std::max<std::size_t>(terms, 1), true, Branch::LinearTransform};
}

// Integer m = c - a - b >= 0:
//   F = G(m)G(c)/(G(a+m)G(b+m)) sum_{n<m} (a)_n(b)_n/(n!(1-m)_n) w^n
//     - (-1)^m w^m G(c)/(G(a)G(b)) sum_n (a+m)_n(b+m)_n/(n!(n+m)!) w^n
//         [ln w - psi(n+1) - psi(n+m+1) + psi(a+n+m) + psi(b+n+m)]
// Integer m' = a + b - c > 0:
//   F = G(m')G(c)/(G(a)G(b)) w^{-m'} sum_{n<m'} (a-m')_n(b-m')_n/(n!(1-m')_n) w^n
//     - (-1)^{m'} G(c)/(G(a-m')G(b-m')) sum_n (a)_n(b)_n/(n!(n+m')!) w^n
//         [ln w - psi(n+1) - psi(n+m'+1) + psi(a+n) + psi(b+n)]
std::optional<EvalResult> gauss_reflect_integer(double a, double b, double c, double w, long m) {
  const double log_w = std::log(w);
  const bool positive = m >= 0;
  const long mm = positive ? m : -m;
  const double md = static_cast<double>(mm);
  int sg = 0;
  const double lg_c = ln_abs_gamma(c, sg);

  SignedLog total;
  double worst = -kInf;
  std::size_t terms = 0;

  // Finite part.
  if (mm > 0) {
    const double pa = positive ? a : a - md;
    const double pb = positive ? b : b - md;
    int s1 = 0, s2 = 0;
    double lp = std::lgamma(md) + lg_c;
    int sign = 1;
    if (positive) {
      lp -= ln_abs_gamma(a + md, s1) + ln_abs_gamma(b + md, s2);
      sign = s1 * s2;
    } else {
      lp -= ln_abs_gamma(a, s1) + ln_abs_gamma(b, s2);
      lp -= md * log_w;
      sign = s1 * s2;
    }
    SignedLog sum{0.0, 1};
    double log_t = 0.0;
    int st = 1;
    double max_t = 0.0;
    for (long n = 0; n + 1 < mm; ++n) {
      const double nd = static_cast<double>(n);
      const double num = (pa + nd) * (pb + nd);
      if (num == 0.0) break;
      const double den = (nd + 1.0) * (1.0 - md + nd);
      log_t += std::log(std::abs(num)) - std::log(std::abs(den)) + log_w;
      st *= ((num > 0.0) == (den > 0.0)) ? 1 : -1;
      sum = sum + SignedLog{log_t, st};
      max_t = std::max(max_t, log_t);
      ++terms;
    }
    total = total + scaled(sum, lp, sign);
    worst = std::max(worst, lp + max_t);
  }

  // Logarithmic part.
  const double ga = positive ? a : a - md;
  const double gb = positive ? b : b - md;
  if (!is_nonpositive_integer(ga) && !is_nonpositive_integer(gb)) {
    int s1 = 0, s2 = 0;
    const double lp = md * log_w + lg_c - ln_abs_gamma(ga, s1) - ln_abs_gamma(gb, s2) -
                      std::lgamma(md + 1.0) - (positive ? 0.0 : md * log_w);
    // Overall sign: -(-1)^mm times gamma signs.
    const int sign = -((mm % 2 == 0) ? 1 : -1) * s1 * s2;
    const double pa = positive ? a + md : a;  // upper parameters of the series
    const double pb = positive ? b + md : b;
    double psi_n1 = boost::math::digamma(1.0);
    double psi_nm1 = boost::math::digamma(md + 1.0);
    double psi_a = boost::math::digamma(pa);
    double psi_b = boost::math::digamma(pb);
    SignedLog sum;
    double log_c = 0.0;  // log of (pa)_n (pb)_n / (n! (n+m)!) * m! w^n
    double max_t = -kInf;
    int small = 0;
    bool ok = false;
    for (std::size_t n = 0; n < kMaxSeriesTerms; ++n) {
      const double nd = static_cast<double>(n);
      const double bracket = log_w - psi_n1 - psi_nm1 + psi_a + psi_b;
      const SignedLog term = scaled(SignedLog::from(bracket), log_c, 1);
      sum = sum + term;
      const double mag = log_c + std::log(std::max(std::abs(bracket), 1.0));
      max_t = std::max(max_t, mag);
      ++terms;
      if (sum.sign != 0 && nd > 2.0 && mag <= std::log(kSeriesTolerance) + sum.log_abs) {
        if (++small >= kConsecutiveSmallTerms) {
          ok = true;
          break;
        }
      } else {
        small = 0;
      }
      log_c += std::log(pa + nd) + std::log(pb + nd) + log_w - std::log(nd + 1.0) -
               std::log(nd + md + 1.0);
      psi_n1 += 1.0 / (nd + 1.0);
      psi_nm1 += 1.0 / (nd + md + 1.0);
      psi_a += 1.0 / (pa + nd);
      psi_b += 1.0 / (pb + nd);
    }
    if (!ok) return std::nullopt;
    total = total + scaled(sum, lp, sign);
    worst = std::max(worst, lp + max_t);
  }

  if (total.sign <= 0 || worst - total.log_abs > kMaxLogCancellation) return std::nullopt;
  return EvalResult{total.log_abs, std::max<std::size_t>(terms, 1), true, Branch::LinearTransform};
}

}  // namespace

EvalResult log_2F1(double a, double b, double c, double z) {
  check_finite("log_2F1", "a", a);
  check_finite("log_2F1", "b", b);
  check_finite("log_2F1", "c", c);
  check_finite("log_2F1", "z", z);
  if (a <= 0.0 || b <= 0.0 || c <= 0.0) {
    domain_error("log_2F1", "a, b, c must be positive, got a=" + fmt(a) + ", b=" + fmt(b) +
                                ", c=" + fmt(c));
  }
  if (z < 0.0 || z >= 1.0) domain_error("log_2F1", "z must lie in [0, 1), got " + fmt(z));
  if (z == 0.0) return {};

  if (z > 0.9) {
    const double w = 1.0 - z;
    const double s = c - a - b;
    const double m = std::round(s);
    std::optional<EvalResult> r;
    if (std::abs(s - m) <= 1e-12 * std::max(1.0, std::abs(s))) {
      r = gauss_reflect_integer(a, b, c, w, static_cast<long>(m));
    } else if (std::abs(s - m) > 1e-3) {
      r = gauss_reflect_generic(a, b, c, w);
    }
    if (r) return *r;
  }
  return gauss_series(a, b, c, z);
}

// ---------------------------------------------------------------------------
// U

namespace {

// U(a, b, z) = 1/Gamma(a) int_0^inf e^{-z t} t^{a-1} (1+t)^{b-a-1} dt, a > 0,
// integrated in x = ln t.
EvalResult tricomi_integral(double a, double b, double z) {
  const double c = b - a - 1.0;
  auto log1pexp = [](double x) { return x > 35.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); };
  auto phi = [&](double x) { return a * x - z * std::exp(x) + c * log1pexp(x); };
  auto dphi = [&](double x) {
    const double sig = 1.0 / (1.0 + std::exp(-x));
    return a - z * std::exp(x) + c * sig;
  };

  // dphi > 0 as x -> -inf and -> -inf as x -> inf; bracket a root.
  double hi = std::log((a + std::max(c, 0.0) + 1.0) / z) + 1.0;
  for (int it = 0; it < 400 && dphi(hi) > 0.0; ++it) hi += 2.0;
  double lo = hi - 2.0;
  for (int it = 0; it < 400 && dphi(lo) < 0.0; ++it) lo -= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (dphi(mid) > 0.0 ? lo : hi) = mid;
  }
  const double x_star = 0.5 * (lo + hi);
  const double e = std::exp(x_star);
  const double sig = 1.0 / (1.0 + 1.0 / e);
  const double second = -z * e + c * sig * (1.0 - sig);
  const double width = second < 0.0 ? 1.0 / std::sqrt(-second) : 1.0;

  quadrature::Options opts;
  opts.rel_tol = 1e-12;
  const auto res = quadrature::integrate_log_line(phi, {x_star, width}, opts);
  return {res.log_value - ln_gamma(a), res.evaluations, res.converged, Branch::Integral};
}

std::optional<EvalResult> tricomi_two_kummer(double a, double b, double z) {
  // U = G(1-b)/G(a-b+1) M(a,b,z) + G(b-1)/G(a) z^{1-b} M(a-b+1,2-b,z)
  SignedLog total;
  double worst = -kInf;
  std::size_t terms = 0;
  if (!is_nonpositive_integer(a - b + 1.0)) {
    int s1 = 0, s2 = 0;
    const double lp = ln_abs_gamma(1.0 - b, s1) - ln_abs_gamma(a - b + 1.0, s2);
    const SignedSeries m = signed_series(a, std::nullopt, b, z);
    if (!m.converged) return std::nullopt;
    total = total + scaled(m.value, lp, s1 * s2);
    worst = std::max(worst, lp + m.max_log_term);
    terms += m.terms;
  }
  {
    int s1 = 0, s2 = 0;
    const double lp = ln_abs_gamma(b - 1.0, s1) - ln_abs_gamma(a, s2) + (1.0 - b) * std::log(z);
    const SignedSeries m = signed_series(a - b + 1.0, std::nullopt, 2.0 - b, z);
    if (!m.converged) return std::nullopt;
    total = total + scaled(m.value, lp, s1 * s2);
    worst = std::max(worst, lp + m.max_log_term);
    terms += m.terms;
  }
  if (total.sign <= 0 || worst - total.log_abs > kMaxLogCancellation) return std::nullopt;
  return EvalResult{total.log_abs, terms, true, Branch::TwoKummer};
}

// U(a, n+1, z) for integer n >= 0 from the logarithmic series
//   (-1)^{n+1} / (n! G(a-n)) sum_k (a)_k / ((n+1)_k k!) z^k
//       [ln z + psi(a+k) - psi(1+k) - psi(n+k+1)]
//   + 1/G(a) sum_{k=1}^{n} (k-1)! (1-a+k)_{n-k} / (n-k)! z^{-k}.
std::optional<EvalResult> tricomi_integer_b(double a, long n, double z) {
  const double nd = static_cast<double>(n);
  const double log_z = std::log(z);
  SignedLog total;
  double worst = -kInf;
  std::size_t terms = 0;

  if (!is_nonpositive_integer(a - nd)) {
    int s_gamma = 0;
    const double lp = -ln_gamma(nd + 1.0) - ln_abs_gamma(a - nd, s_gamma);
    const int sign = (n % 2 == 0 ? -1 : 1) * s_gamma;
    double psi_a = boost::math::digamma(a);
    double psi_1 = boost::math::digamma(1.0);
    double psi_n = boost::math::digamma(nd + 1.0);
    double log_c = 0.0;
    SignedLog sum;
    double max_t = -kInf;
    int small = 0;
    bool ok = false;
    for (std::size_t k = 0; k < kMaxSeriesTerms; ++k) {
      const double kd = static_cast<double>(k);
      const double bracket = log_z + psi_a - psi_1 - psi_n;
      sum = sum + scaled(SignedLog::from(bracket), log_c, 1);
      const double mag = log_c + std::log(std::max(std::abs(bracket), 1.0));
      max_t = std::max(max_t, mag);
      ++terms;
      if (sum.sign != 0 && kd > a + z && mag <= std::log(kSeriesTolerance) + sum.log_abs) {
        if (++small >= kConsecutiveSmallTerms) {
          ok = true;
          break;
        }
      } else {
        small = 0;
      }
      log_c += std::log(a + kd) + log_z - std::log(nd + 1.0 + kd) - std::log(kd + 1.0);
      psi_a += 1.0 / (a + kd);
      psi_1 += 1.0 / (kd + 1.0);
      psi_n += 1.0 / (nd + kd + 1.0);
    }
    if (!ok) return std::nullopt;
    total = total + scaled(sum, lp, sign);
    worst = std::max(worst, lp + max_t);
  }

  const double lg_a = ln_gamma(a);
  for (long k = 1; k <= n; ++k) {
    const double kd = static_cast<double>(k);
    double log_p = 0.0;
    int sign = 1;
    for (long j = 0; j < n - k; ++j) {
      const double f = 1.0 - a + kd + static_cast<double>(j);
      if (f == 0.0) sign = 0;
      if (f < 0.0) sign = -sign;
      if (f != 0.0) log_p += std::log(std::abs(f));
    }
    if (sign == 0) continue;
    const double lt = ln_gamma(kd) + log_p - ln_gamma(nd - kd + 1.0) - kd * log_z - lg_a;
    total = total + SignedLog{lt, sign};
    worst = std::max(worst, lt);
    ++terms;
  }

  if (total.sign <= 0 || worst - total.log_abs > kMaxLogCancellation) return std::nullopt;
  return EvalResult{total.log_abs, std::max<std::size_t>(terms, 1), true, Branch::IntegerB};
}

}  // namespace

EvalResult log_U(double a, double b, double z) {
  check_finite("log_U", "a", a);
  check_finite("log_U", "b", b);
  check_finite("log_U", "z", z);
  if (a < 0.0) domain_error("log_U", "a must be nonnegative, got " + fmt(a));
  if (z <= 0.0) domain_error("log_U", "z must be positive, got " + fmt(z));
  if (a == 0.0) return {};

  // z^{-a} sum_k (a)_k (a-b+1)_k / k! (-1/z)^k
  const double a2 = a - b + 1.0;
  auto ratio = [&](std::size_t k) {
    const double kd = static_cast<double>(k);
    return -(a + kd) * (a2 + kd) / ((kd + 1.0) * z);
  };
  if (auto s = sum_asymptotic(ratio, std::max(a, std::abs(a2)) + 1.0)) {
    return {-a * std::log(z) + s->log_sum, s->terms, true, Branch::Asymptotic};
  }

  const double b_int = std::round(b);
  if (z <= 50.0) {
    if (std::abs(b - b_int) > 1e-8) {
      if (auto r = tricomi_two_kummer(a, b, z)) return *r;
    } else if (b == b_int) {
      // Kummer's transformation U(a,b,z) = z^{1-b} U(a-b+1, 2-b, z) moves b <= 0 up.
      const auto n = static_cast<long>(b_int >= 1.0 ? b_int - 1.0 : 1.0 - b_int);
      const double shift = b_int >= 1.0 ? 0.0 : (1.0 - b) * std::log(z);
      const double a_eff = b_int >= 1.0 ? a : a - b + 1.0;
      if (a_eff > 0.0) {
        if (auto r = tricomi_integer_b(a_eff, n, z)) {
          r->log_value += shift;
          return *r;
        }
      }
    }
  }
  return tricomi_integral(a, b, z);
}

}  // namespace rprior::specfun
