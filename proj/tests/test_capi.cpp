// Exercises the shared library through its C header only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>

#include "rprior/rprior.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  rp_string_free(s);
  return out;
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

rp_dataset* two_point_dataset(const double* sigma = nullptr) {
  const double y[] = {1.0, 3.0};
  const double x[] = {1.0, 1.0};
  rp_dataset* d = nullptr;
  REQUIRE(rp_dataset_from_arrays(2, 1, y, x, sigma, &d) == RP_OK);
  return d;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(rp_version()) > 0);
  CHECK(std::string(rp_status_name(RP_OK)) == "ok");
  CHECK(std::string(rp_status_name(RP_ERR_DOMAIN)) == "domain error");
  rp_string_free(nullptr);
}

TEST_CASE("special functions") {
  rp_function fn;
  REQUIRE(rp_function_from_name("0F1", &fn) == RP_OK);
  CHECK(fn == RP_FN_0F1);
  const double p0[] = {0.5, 1.0};
  rp_eval r{};
  REQUIRE(rp_specfun(fn, p0, 2, &r) == RP_OK);
  CHECK(r.log_value == doctest::Approx(std::log(std::cosh(2.0))).epsilon(1e-14));
  CHECK(r.converged == 1);
  CHECK(r.terms >= 1);

  const double pu[] = {2.0, 3.0, 3.0};
  REQUIRE(rp_specfun(RP_FN_U, pu, 3, &r) == RP_OK);
  CHECK(r.log_value == doctest::Approx(-2.0 * std::log(3.0)));
  CHECK(std::string(r.branch).size() > 0);

  const double bad[] = {-1.0, 1.0};
  CHECK(rp_specfun(RP_FN_0F1, bad, 2, &r) == RP_ERR_DOMAIN);
  CHECK(std::strlen(rp_last_error()) > 0);
  CHECK(rp_specfun(RP_FN_0F1, p0, 3, &r) == RP_ERR_INPUT);
  CHECK(rp_specfun(RP_FN_0F1, nullptr, 2, &r) == RP_ERR_ARGUMENT);
  CHECK(rp_function_from_name("3F2", &fn) == RP_ERR_INPUT);

  REQUIRE(rp_specfun(RP_FN_0F1, p0, 2, &r) == RP_OK);
  CHECK(std::string(rp_last_error()).empty());
}

TEST_CASE("dataset and statistics") {
  rp_dataset* d = two_point_dataset();
  size_t n = 0, k = 0;
  int has_sigma = -1;
  REQUIRE(rp_dataset_shape(d, &n, &k, &has_sigma) == RP_OK);
  CHECK(n == 2);
  CHECK(k == 1);
  CHECK(has_sigma == 0);

  rp_stats s{};
  REQUIRE(rp_stats_compute(d, nullptr, 0, RP_SCENARIO_AUTO, &s) == RP_OK);
  CHECK(s.mean_sq == doctest::Approx(5.0));
  CHECK(s.bhat_sq == doctest::Approx(4.0));
  CHECK(s.q0 == doctest::Approx(1.0));
  CHECK(s.fixed_sigma == 0);

  REQUIRE(rp_stats_compute(d, nullptr, 0, RP_SCENARIO_FIXED, &s) == RP_OK);
  CHECK(s.fixed_sigma == 1);
  CHECK(s.ln_c_sigma == doctest::Approx(-std::log(2.0 * std::numbers::pi)));

  const size_t cols[] = {3};
  CHECK(rp_stats_compute(d, cols, 1, RP_SCENARIO_AUTO, &s) == RP_ERR_INPUT);
  rp_dataset_free(d);

  const double y[] = {1.0, 2.0};
  const double x[] = {1.0, 1.0, 2.0, 2.0};
  rp_dataset* singular = nullptr;
  REQUIRE(rp_dataset_from_arrays(2, 2, y, x, nullptr, &singular) == RP_OK);
  CHECK(rp_stats_compute(singular, nullptr, 0, RP_SCENARIO_AUTO, &s) == RP_ERR_SINGULAR);
  rp_dataset_free(singular);

  const double bad_sigma[] = {1.0, 0.0};
  rp_dataset* none = nullptr;
  CHECK(rp_dataset_from_arrays(2, 1, y, x, bad_sigma, &none) == RP_ERR_INPUT);
  CHECK(none == nullptr);
  CHECK(rp_dataset_load("/nonexistent.csv", &none) == RP_ERR_INPUT);
}

TEST_CASE("perfect fits still yield statistics") {
  const double y[] = {2.0, 2.0, 2.0};
  const double x[] = {1.0, 1.0, 1.0};
  rp_dataset* d = nullptr;
  REQUIRE(rp_dataset_from_arrays(3, 1, y, x, nullptr, &d) == RP_OK);
  rp_stats s{};
  CHECK(rp_stats_compute(d, nullptr, 0, RP_SCENARIO_VARIABLE, &s) == RP_OK);
  CHECK(s.q0 == doctest::Approx(0.0));
  rp_dataset_free(d);
}

TEST_CASE("evidence, quadrature, criteria and densities") {
  rp_stats s{};
  s.n = 20;
  s.k = 2;
  s.mean_sq = 1.0;
  s.bhat_sq = 0.5;
  s.q0 = 0.5;
  s.fixed_sigma = 1;
  s.ln_c_sigma = -10.0 * std::log(2.0 * std::numbers::pi);

  rp_evidence cf{}, q{};
  REQUIRE(rp_log_evidence(&s, "hyperg:3", &cf) == RP_OK);
  REQUIRE(rp_quadrature_log_evidence(&s, "hyperg:3", RP_ROUTE_R, &q) == RP_OK);
  CHECK(std::string(cf.method) == "closed-form");
  CHECK(std::string(q.method) == "quadrature");
  CHECK(cf.log_evidence == doctest::Approx(q.log_evidence).epsilon(1e-6));
  CHECK(rp_log_evidence(&s, "bic", &cf) == RP_ERR_INPUT);
  CHECK(rp_log_evidence(&s, "gprior:-1", &cf) == RP_ERR_INPUT);

  double c = 0.0;
  REQUIRE(rp_criterion(&s, "aic", &c) == RP_OK);
  CHECK(c == doctest::Approx(20.0 * 0.5 + 4.0));
  s.n = 3;
  CHECK(rp_criterion(&s, "aicc", &c) == RP_ERR_DOMAIN);

  double v = 0.0;
  REQUIRE(rp_prior_density("gprior:1", RP_ROUTE_R, 1.0, 1.0, 2, 2, &v) == RP_OK);
  CHECK(v == doctest::Approx(std::log(2.0) - 1.0));
  CHECK(rp_prior_density("gprior:1", RP_ROUTE_G, 1.0, 1.0, 2, 2, &v) == RP_ERR_UNSUPPORTED);
  REQUIRE(rp_prior_density("hyperg:4", RP_ROUTE_G, 1.0, 1.0, 2, 2, &v) == RP_OK);
  CHECK(v == doctest::Approx(-2.0 * std::log(2.0)));
}

TEST_CASE("compare report") {
  rp_dataset* d = two_point_dataset();
  const char* schemes[] = {"bic", "gprior:1"};
  rp_compare_options opt{};
  opt.schemes = schemes;
  opt.n_schemes = 2;
  opt.source = "mem";
  char* json = nullptr;
  REQUIRE(rp_compare(d, &opt, &json) == RP_OK);
  const std::string report = take(json);
  CHECK(contains(report, "\"schema\": \"rprior.compare/1\""));
  CHECK(contains(report, "\"source\": \"mem\""));
  CHECK(contains(report, "\"posterior\": 1.0"));

  opt.columns = "x1;x1";
  REQUIRE(rp_compare(d, &opt, &json) == RP_OK);
  CHECK(contains(take(json), "\"posterior\": 0.5"));

  opt.nested_max = 1;
  CHECK(rp_compare(d, &opt, &json) == RP_ERR_INPUT);
  CHECK(json == nullptr);
  opt.nested_max = 0;
  opt.columns = "x9";
  CHECK(rp_compare(d, &opt, &json) == RP_ERR_INPUT);
  opt.columns = nullptr;
  opt.n_schemes = 0;
  CHECK(rp_compare(d, &opt, &json) == RP_ERR_INPUT);
  rp_dataset_free(d);
}

TEST_CASE("experiment lifecycle") {
  const char* cfg = R"({"n": 20, "k_max": 3, "reps": 10, "schemes": ["bic", "hyperg"], "threads": 1})";
  rp_experiment* e = nullptr;
  REQUIRE(rp_experiment_run(cfg, nullptr, &e) == RP_OK);
  size_t rows = 0;
  REQUIRE(rp_experiment_rows(e, &rows) == RP_OK);
  CHECK(rows == 9);
  rp_report_row row{};
  REQUIRE(rp_experiment_row(e, 0, &row) == RP_OK);
  CHECK(row.k_true == 1);
  CHECK(std::string(row.scheme) == "Oracle");
  CHECK(row.reps == 10);
  CHECK(rp_experiment_row(e, 9, &row) == RP_ERR_ARGUMENT);
  size_t failures = 99;
  REQUIRE(rp_experiment_failures(e, &failures) == RP_OK);
  CHECK(failures == 0);

  char* csv = nullptr;
  REQUIRE(rp_experiment_csv(e, &csv) == RP_OK);
  const std::string table = take(csv);
  CHECK(table.rfind("k_true,scheme,mean_mse,std_err,reps\n", 0) == 0);

  // A different seed gives a different table; the same seed the same one.
  const uint64_t seed = 99;
  rp_experiment* f = nullptr;
  REQUIRE(rp_experiment_run(cfg, &seed, &f) == RP_OK);
  REQUIRE(rp_experiment_csv(f, &csv) == RP_OK);
  CHECK(take(csv) != table);
  rp_experiment_free(f);
  REQUIRE(rp_experiment_run(cfg, nullptr, &f) == RP_OK);
  REQUIRE(rp_experiment_csv(f, &csv) == RP_OK);
  CHECK(take(csv) == table);
  rp_experiment_free(f);

  char* meta = nullptr;
  REQUIRE(rp_experiment_metadata_json(e, &meta) == RP_OK);
  CHECK(contains(take(meta), "rprior.simulate/1"));

  REQUIRE(rp_experiment_write_csv(e, ".") == RP_OK);
  REQUIRE(rp_experiment_write_charts(e, ".") == RP_OK);
  std::ifstream in("mse_table.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "k_true,scheme,mean_mse,std_err,reps");
  CHECK(rp_experiment_write_csv(e, "/nonexistent/dir") == RP_ERR_IO);
  rp_experiment_free(e);

  CHECK(rp_experiment_run(R"({"bogus": 1})", nullptr, &e) == RP_ERR_INPUT);
  CHECK(e == nullptr);
  CHECK(rp_experiment_run(nullptr, nullptr, &e) == RP_ERR_ARGUMENT);
  char* loaded = nullptr;
  CHECK(rp_config_load("/nonexistent.json", &loaded) == RP_ERR_INPUT);
}
