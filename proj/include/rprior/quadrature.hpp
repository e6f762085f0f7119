#pragma once

// Adaptive Gauss-Kronrod integration, plus log-space drivers for strictly
// positive integrands on (0, inf) and on the whole real line.

#include <cstddef>
#include <functional>
#include <span>

namespace rprior::quadrature {

struct Options {
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  std::size_t max_intervals = 4000;
};

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Globally adaptive 21-point Gauss-Kronrod on [a, b]. Optional interior
/// breakpoints seed the initial partition.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& options = {},
                 std::span<const double> breakpoints = {});

/// Integral of exp(log_f) reported in log space. `rel_error` is the
/// estimated relative error of the integral, i.e. the absolute error of
/// `log_value`.
struct LogResult {
  double log_value = 0.0;
  double rel_error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Peak of a log-integrand and a local width (1/sqrt of the negative
/// curvature), both in the integration variable.
struct Peak {
  double location = 0.0;
  double width = 1.0;
};

/// Searches a log-spaced grid of (0, inf) for the maximum of r f(r) and
/// refines it; returns that location together with a width in r.
Peak locate_peak_halfline(const std::function<double(double)>& log_f,
                          double scale_hint);

/// Same for the real line, searching center +- 40 widths.
Peak locate_peak_line(const std::function<double(double)>& log_f,
                      double center_hint, double width_hint);

/// Integrates exp(log_f(r)) over r in (0, inf) through r = s tan(theta) with
/// s placed at the peak. The integrand is shifted by its peak value before
/// exponentiation.
LogResult integrate_log_halfline(const std::function<double(double)>& log_f,
                                 const Peak& peak, const Options& options = {});

/// Integrates exp(log_f(x)) over the real line through
/// x = peak + width * tan(theta).
LogResult integrate_log_line(const std::function<double(double)>& log_f,
                             const Peak& peak, const Options& options = {});

}  // namespace rprior::quadrature
