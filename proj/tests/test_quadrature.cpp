#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "rprior/quadrature.hpp"

using namespace rprior::quadrature;

TEST_SUITE("quadrature") {

TEST_CASE("polynomials and smooth functions on finite intervals") {
  const Result p = integrate([](double x) { return 3.0 * x * x; }, 0.0, 2.0);
  CHECK(p.converged);
  CHECK(p.value == doctest::Approx(8.0).epsilon(1e-14));

  const Result s = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(s.value == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(s.abs_error >= 0.0);
}

TEST_CASE("endpoint singularity converges adaptively") {
  const Result r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("breakpoints seed the partition") {
  auto step = [](double x) { return x < 0.3 ? 1.0 : 2.0; };
  const std::vector<double> bp = {0.3};
  const Result r = integrate(step, 0.0, 1.0, {}, bp);
  CHECK(r.value == doctest::Approx(0.3 + 1.4).epsilon(1e-13));
}

TEST_CASE("half-line log integral of a sharply peaked integrand") {
  // int_0^inf r^(m-1) exp(-N (r - 1)^2 ...) style peak: Gamma density with
  // shape 400 has unit integral.
  const double shape = 400.0, rate = 400.0;
  auto log_f = [&](double r) {
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(r) - rate * r;
  };
  const Peak peak = locate_peak_halfline(log_f, 1.0);
  CHECK(peak.location == doctest::Approx(1.0).epsilon(0.05));
  const LogResult res = integrate_log_halfline(log_f, peak);
  CHECK(res.converged);
  CHECK(std::abs(res.log_value) < 1e-11);
  CHECK(res.rel_error < 1e-10);
}

TEST_CASE("half-line heavy tail") {
  // Half-Cauchy density 2 / (pi (1 + r^2)).
  auto log_f = [](double r) { return std::log(2.0 / std::numbers::pi) - std::log1p(r * r); };
  const LogResult res = integrate_log_halfline(log_f, locate_peak_halfline(log_f, 1.0));
  CHECK(std::abs(res.log_value) < 1e-10);
}

TEST_CASE("whole-line log integral with a huge offset") {
  // exp(1e4 - x^2 / 2) integrates to exp(1e4) sqrt(2 pi).
  auto log_f = [](double x) { return 1e4 - 0.5 * (x - 3.0) * (x - 3.0); };
  const Peak peak = locate_peak_line(log_f, 0.0, 1.0);
  CHECK(peak.location == doctest::Approx(3.0).epsilon(1e-6));
  const LogResult res = integrate_log_line(log_f, peak);
  CHECK(res.log_value == doctest::Approx(1e4 + 0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-15));
}

}  // TEST_SUITE
