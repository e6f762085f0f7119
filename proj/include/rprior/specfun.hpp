#pragma once

// Log-space evaluation of the gamma function and of the hypergeometric
// functions 0F1, 1F1 (Kummer M), 2F1 (Gauss) and U (Tricomi).
//
// All evaluators return the natural log of a positive function value so
// that arguments of order N (sample size) never overflow. Each result carries
// the number of series terms (or quadrature nodes) used and the branch that
// produced it.

#include <cstddef>
#include <string_view>

namespace rprior::specfun {

enum class Branch {
  Trivial,          // exact value without summation
  Series,           // power series, summed outward from its largest term
  Asymptotic,       // large-argument asymptotic expansion
  LinearTransform,  // 2F1 via the z -> 1 - z connection formulas
  TwoKummer,        // U as a combination of two Kummer functions
  IntegerB,         // U for integer b from its logarithmic series
  Integral,         // U from its Laplace-type integral representation
};

std::string_view to_string(Branch branch);

struct EvalResult {
  double log_value = 0.0;
  std::size_t terms_used = 1;
  bool converged = true;
  Branch branch = Branch::Trivial;
};

/// Relative size below which a series term counts as negligible, the number
/// of consecutive negligible terms required, and the hard term cap.
inline constexpr double kSeriesTolerance = 1e-15;
inline constexpr int kConsecutiveSmallTerms = 3;
inline constexpr std::size_t kMaxSeriesTerms = 100000;

/// ln Gamma(x) for finite x > 0.
double ln_gamma(double x);

/// ln 0F1(; b; z) for b > 0, z >= 0.
EvalResult log_0F1(double b, double z);

/// ln 1F1(a; b; z) for a > 0, b > 0, z >= 0. Uses the large-z expansion
/// once z > 40 + 2 max(a, b) and that expansion reaches tolerance.
EvalResult log_1F1(double a, double b, double z);

/// ln 2F1(a, b; c; z) for a, b, c > 0 and 0 <= z < 1. Above z = 0.9 the
/// function is rebuilt from series in 1 - z.
EvalResult log_2F1(double a, double b, double c, double z);

/// ln U(a, b, z) for a >= 0, real b, z > 0.
EvalResult log_U(double a, double b, double z);

}  // namespace rprior::specfun
