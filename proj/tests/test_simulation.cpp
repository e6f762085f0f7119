#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "rprior/errors.hpp"
#include "rprior/rng.hpp"
#include "rprior/simulation.hpp"

using namespace rprior;

namespace {

SimConfig small_config() {
  SimConfig c;
  c.n = 30;
  c.k_max = 5;
  c.reps = 40;
  c.base_seed = 12345;
  c.threads = 1;
  return c;
}

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("splitmix64 reference output") {
  std::uint64_t state = 0;
  CHECK(splitmix64(state) == 0xe220a8397b1dcdafULL);
  CHECK(splitmix64(state) == 0x6e789e6aa1b965f4ULL);
}

TEST_CASE("derived seeds differ across tuples and repeat for equal tuples") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t tag : {1u, 2u}) {
    for (std::uint64_t i = 0; i < 20; ++i) {
      for (std::uint64_t j = 0; j < 20; ++j) seen.insert(derive_seed(9, tag, i, j));
    }
  }
  CHECK(seen.size() == 800);
  CHECK(derive_seed(9, 2, 3, 4) == derive_seed(9, 2, 3, 4));
  CHECK(derive_seed(9, 2, 3, 4) != derive_seed(10, 2, 3, 4));
}

TEST_CASE("uniform and normal streams") {
  Xoshiro256 a(77), b(77);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Xoshiro256 s(3);
  double sum = 0.0, sum_sq = 0.0;
  const int m = 200000;
  for (int i = 0; i < m; ++i) {
    const double u = s.uniform();
    CHECK_UNARY(u > 0.0 && u < 1.0);
    const double z = s.normal();
    sum += z;
    sum_sq += z * z;
  }
  CHECK(std::abs(sum / m) < 0.015);
  CHECK(std::abs(sum_sq / m - 1.0) < 0.02);
}

TEST_CASE("orthogonal design") {
  const Eigen::MatrixXd x = make_orthogonal_design(100, 16, 42);
  CHECK((x.transpose() * x - Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(x == make_orthogonal_design(100, 16, 42));
  CHECK(x != make_orthogonal_design(100, 16, 43));
  const Eigen::MatrixXd sq = make_orthogonal_design(6, 6, 1);
  CHECK((sq * sq.transpose() - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(make_orthogonal_design(5, 6, 1), InputError);
}

TEST_CASE("Cauchy coefficients") {
  Xoshiro256 s(5);
  const Eigen::VectorXd beta = draw_coefficients(3, 8, 2.0, s);
  CHECK(beta.size() == 8);
  CHECK(beta.tail(5).isZero(0.0));
  CHECK((beta.head(3).array() != 0.0).all());

  Xoshiro256 a(6), b(6);
  CHECK(draw_coefficients(4, 4, 1.0, a) == draw_coefficients(4, 4, 1.0, b));

  // The median of |Cauchy(0, s)| is s.
  Xoshiro256 m(8);
  std::vector<double> abs_values;
  for (int i = 0; i < 100000; ++i) abs_values.push_back(std::abs(draw_coefficients(1, 1, 5.0, m)(0)));
  std::nth_element(abs_values.begin(), abs_values.begin() + 50000, abs_values.end());
  CHECK(abs_values[50000] == doctest::Approx(5.0).epsilon(0.02));
}

TEST_CASE("replicate contract") {
  const SimConfig c = small_config();
  const auto schemes = resolve_schemes(c);
  const NestedDesign design(make_orthogonal_design(c.n, c.k_max, 1));
  for (std::size_t k_true = 1; k_true <= c.k_max; ++k_true) {
    Xoshiro256 s(k_true);
    const ReplicateResult r = run_replicate(c, schemes, k_true, design, s);
    REQUIRE(r.mse.size() == schemes.size());
    CHECK(r.oracle_mse >= 0.0);
    for (std::size_t i = 0; i < schemes.size(); ++i) {
      CHECK(r.errors[i].empty());
      CHECK(r.mse[i] >= 0.0);
      CHECK(r.selected_k[i] >= 1);
      CHECK(r.selected_k[i] <= c.k_max);
      if (r.selected_k[i] == k_true) CHECK(r.mse[i] == r.oracle_mse);
    }
  }
}

TEST_CASE("scheme resolution") {
  SimConfig c = small_config();
  const auto names = resolve_schemes(c);
  std::vector<std::string> got;
  for (const auto& s : names) got.push_back(s.name);
  CHECK(got == std::vector<std::string>{"AIC", "AICc", "BIC", "ZS", "Hg", "Hr"});
  c.schemes = {"bic", "nonsense"};
  CHECK_THROWS_AS(resolve_schemes(c), InputError);
  c.schemes = {"bic", "bic"};
  CHECK_THROWS_AS(resolve_schemes(c), InputError);
}

TEST_CASE("config validation") {
  SimConfig c = small_config();
  CHECK_NOTHROW(c.validate());
  c.k_max = 40;
  CHECK_THROWS_AS(c.validate(), InputError);
  c = small_config();
  c.reps = 0;
  CHECK_THROWS_AS(c.validate(), InputError);
  c = small_config();
  c.hyper_g_a = 2.0;
  CHECK_THROWS_AS(c.validate(), InputError);
  c = small_config();
  c.candidate_strategy = "all-subsets";
  CHECK_THROWS_AS(c.validate(), InputError);
}

TEST_CASE("aggregate") {
  const MeanSe m = aggregate({1.0, 2.0, 3.0, 4.0});
  CHECK(m.mean == doctest::Approx(2.5));
  CHECK(m.std_err == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(m.count == 4);
  const MeanSe one = aggregate({3.0});
  CHECK(one.mean == 3.0);
  CHECK(std::isnan(one.std_err));
  const MeanSe skip = aggregate({1.0, std::nan(""), 3.0});
  CHECK(skip.count == 2);
  CHECK(skip.mean == 2.0);
}

TEST_CASE("experiment layout and determinism across thread counts") {
  SimConfig c = small_config();
  const ExperimentReport a = run_experiment(c);
  c.threads = 3;
  const ExperimentReport b = run_experiment(c);
  CHECK(a.scheme_names.front() == "Oracle");
  REQUIRE(a.rows.size() == c.k_max * a.scheme_names.size());
  REQUIRE(b.rows.size() == a.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].k_true == b.rows[i].k_true);
    CHECK(a.rows[i].scheme == b.rows[i].scheme);
    CHECK(a.rows[i].mean_mse == b.rows[i].mean_mse);
    CHECK(a.rows[i].std_err == b.rows[i].std_err);
    CHECK(a.rows[i].reps == c.reps);
    CHECK(a.rows[i].mean_mse >= 0.0);
  }
  CHECK(a.row(2, "BIC").k_true == 2);
  CHECK_THROWS_AS(a.row(2, "XYZ"), InputError);
  CHECK(b.threads_used == 3);
}

TEST_CASE("single replicate leaves the standard error undefined") {
  SimConfig c = small_config();
  c.reps = 1;
  const ExperimentReport r = run_experiment(c);
  for (const ReportRow& row : r.rows) {
    CHECK(std::isnan(row.std_err));
    CHECK(std::isfinite(row.mean_mse));
  }
}

TEST_CASE("per-replicate design redraw still runs deterministically") {
  SimConfig c = small_config();
  c.redraw_design = true;
  c.reps = 10;
  const ExperimentReport a = run_experiment(c);
  const ExperimentReport b = run_experiment(c);
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].mean_mse == b.rows[i].mean_mse);
}

}  // TEST_SUITE
