#include "rprior/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

namespace rprior::quadrature {
namespace {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208745959417, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss weights for the odd-indexed Kronrod nodes kXgk[1], kXgk[3], ...
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Interval {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Interval& other) const { return error < other.error; }
};

Interval kronrod21(const std::function<double(double)>& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  std::array<double, 10> f1{}, f2{};
  const double fc = f(center);
  double resk = kWgk[10] * fc;
  double resg = 0.0;
  double resabs = std::abs(resk);
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double pair = f1[j] + f2[j];
    resk += kWgk[j] * pair;
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * pair;
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[10] * std::abs(fc - mean);
  for (int j = 0; j < 10; ++j) {
    resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  resk *= half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);

  double err = std::abs((resk - resg * half));
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > tiny / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {a, b, resk, err};
}

double safe_exp(double x) { return x == -std::numeric_limits<double>::infinity() ? 0.0 : std::exp(x); }

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& options, std::span<const double> breakpoints) {
  std::vector<double> edges{a};
  for (double p : breakpoints) {
    if (p > a && p < b) edges.push_back(p);
  }
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::priority_queue<Interval> heap;
  Result out;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    Interval iv = kronrod21(f, edges[i], edges[i + 1]);
    out.evaluations += 21;
    total += iv.value;
    total_err += iv.error;
    heap.push(iv);
  }

  auto done = [&] {
    return total_err <= std::max(options.abs_tol, options.rel_tol * std::abs(total));
  };
  // Intervals too narrow to split keep their contribution but leave the queue.
  std::vector<Interval> frozen;
  while (!done() && !std::isnan(total_err) && !heap.empty() && heap.size() + frozen.size() < options.max_intervals) {
    Interval worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) || worst.b - worst.a <= 1e-12 * std::abs(mid)) {
      frozen.push_back(worst);
      continue;
    }
    Interval left = kronrod21(f, worst.a, mid);
    Interval right = kronrod21(f, mid, worst.b);
    out.evaluations += 42;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum to shed the drift from incremental updates.
  total = 0.0;
  total_err = 0.0;
  for (const Interval& iv : frozen) {
    total += iv.value;
    total_err += iv.error;
  }
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.abs_error = total_err;
  out.converged = done() && std::isfinite(total);
  return out;
}

namespace {

// Golden-section maximisation of a unimodal function on [lo, hi].
double golden_max(const std::function<double(double)>& g, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double g1 = g(x1), g2 = g(x2);
  for (int it = 0; it < 60 && (hi - lo) > 1e-10 * (1.0 + std::abs(lo)); ++it) {
    if (g1 < g2) {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + inv_phi * (hi - lo);
      g2 = g(x2);
    } else {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - inv_phi * (hi - lo);
      g1 = g(x1);
    }
  }
  return 0.5 * (lo + hi);
}

// Width 1/sqrt(-g'') from a central difference, clamped to [min_w, max_w].
double curvature_width(const std::function<double(double)>& g, double x, double h,
                       double fallback) {
  const double g0 = g(x);
  const double gp = g(x + h);
  const double gm = g(x - h);
  const double second = (gp - 2.0 * g0 + gm) / (h * h);
  if (!std::isfinite(second) || second >= 0.0) return fallback;
  return 1.0 / std::sqrt(-second);
}

}  // namespace

Peak locate_peak_halfline(const std::function<double(double)>& log_f, double scale_hint) {
  if (!(scale_hint > 0.0) || !std::isfinite(scale_hint)) scale_hint = 1.0;
  const double u0 = std::log(scale_hint);
  // Maximise the mass per unit ln r, i.e. r f(r); unlike f itself this has an
  // interior maximum even when f peaks at r = 0.
  auto g = [&](double u) { return log_f(std::exp(u)) + u; };

  double best_u = u0;
  double best = -std::numeric_limits<double>::infinity();
  for (double du = -24.0; du <= 24.0; du += 0.5) {
    const double v = g(u0 + du);
    if (v > best) {
      best = v;
      best_u = u0 + du;
    }
  }
  const double u_star = golden_max(g, best_u - 0.5, best_u + 0.5);
  const double w_u = std::clamp(curvature_width(g, u_star, 1e-3, 0.5), 1e-8, 10.0);
  const double r_star = std::exp(u_star);
  return {r_star, r_star * std::min(w_u, 1.0)};
}

Peak locate_peak_line(const std::function<double(double)>& log_f, double center_hint,
                      double width_hint) {
  if (!(width_hint > 0.0) || !std::isfinite(width_hint)) width_hint = 1.0;
  double best_x = center_hint;
  double best = -std::numeric_limits<double>::infinity();
  for (double k = -40.0; k <= 40.0; k += 0.5) {
    const double x = center_hint + k * width_hint;
    const double v = log_f(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  const double x_star = golden_max(log_f, best_x - 0.5 * width_hint, best_x + 0.5 * width_hint);
  const double w = std::clamp(curvature_width(log_f, x_star, 1e-3 * width_hint, width_hint),
                              1e-10 * width_hint, 1e3 * width_hint);
  return {x_star, w};
}

LogResult integrate_log_halfline(const std::function<double(double)>& log_f, const Peak& peak,
                                 const Options& options) {
  const double s = peak.location;
  const double w = std::max(peak.width, 1e-300);
  const double shift = log_f(s) + std::log(w);
  LogResult out;
  if (!std::isfinite(shift)) {
    out.log_value = -std::numeric_limits<double>::infinity();
    return out;
  }
  const double log_s = std::log(s);
  auto integrand = [&](double theta) {
    const double r = s * std::tan(theta);
    if (!(r > 0.0) || !std::isfinite(r)) return 0.0;
    const double lf = log_f(r);
    if (lf == -std::numeric_limits<double>::infinity()) return 0.0;
    const double c = std::cos(theta);
    return safe_exp(lf + log_s - 2.0 * std::log(c) - shift);
  };
  std::vector<double> bps{std::numbers::pi / 4.0};
  for (double k : {-4.0, -1.0, 1.0, 4.0}) {
    const double r = s + k * w;
    if (r > 0.0) bps.push_back(std::atan(r / s));
  }
  const Result res = integrate(integrand, 0.0, std::numbers::pi / 2.0, options, bps);
  out.evaluations = res.evaluations;
  out.converged = res.converged && res.value > 0.0;
  out.log_value = shift + std::log(res.value);
  out.rel_error = res.value > 0.0 ? res.abs_error / res.value : std::numeric_limits<double>::infinity();
  return out;
}

LogResult integrate_log_line(const std::function<double(double)>& log_f, const Peak& peak,
                             const Options& options) {
  const double c = peak.location;
  const double w = peak.width;
  const double shift = log_f(c) + std::log(w);
  LogResult out;
  if (!std::isfinite(shift)) {
    out.log_value = -std::numeric_limits<double>::infinity();
    return out;
  }
  const double log_w = std::log(w);
  auto integrand = [&](double theta) {
    const double x = c + w * std::tan(theta);
    if (!std::isfinite(x)) return 0.0;
    const double lf = log_f(x);
    if (lf == -std::numeric_limits<double>::infinity()) return 0.0;
    const double cs = std::cos(theta);
    return safe_exp(lf + log_w - 2.0 * std::log(cs) - shift);
  };
  const double half_pi = std::numbers::pi / 2.0;
  const std::array<double, 5> bps{std::atan(-4.0), std::atan(-1.0), 0.0, std::atan(1.0),
                                  std::atan(4.0)};
  const Result res = integrate(integrand, -half_pi, half_pi, options, bps);
  out.evaluations = res.evaluations;
  out.converged = res.converged && res.value > 0.0;
  out.log_value = shift + std::log(res.value);
  out.rel_error = res.value > 0.0 ? res.abs_error / res.value : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace rprior::quadrature
