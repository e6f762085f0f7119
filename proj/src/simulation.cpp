#include "rprior/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <thread>

#include "rprior/errors.hpp"

namespace rprior {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double parse_positive(const std::string& text, const std::string& token) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw InputError("bad numeric parameter in scheme '" + token + "'");
  }
  return v;
}

}  // namespace

void SimConfig::validate() const {
  if (n < 1) throw InputError("n must be at least 1");
  if (k_max < 1) throw InputError("k_max must be at least 1");
  if (k_max > n) throw InputError("k_max must not exceed n");
  if (reps < 1) throw InputError("reps must be at least 1");
  if (!(signal_scale > 0.0) || !std::isfinite(signal_scale)) {
    throw InputError("signal_scale must be positive");
  }
  if (!(hyper_g_a > 2.0) || !std::isfinite(hyper_g_a)) throw InputError("hyper_g_a must exceed 2");
  if (candidate_strategy != "nested") {
    throw InputError("candidate_strategy must be \"nested\", got \"" + candidate_strategy + "\"");
  }
  if (schemes.empty()) throw InputError("schemes must not be empty");
  resolve_schemes(*this);
}

std::vector<SimScheme> resolve_schemes(const SimConfig& config) {
  std::vector<SimScheme> out;
  for (const std::string& token : config.schemes) {
    const auto colon = token.find(':');
    const std::string head = token.substr(0, colon);
    const bool has_arg = colon != std::string::npos;
    const std::string arg = has_arg ? token.substr(colon + 1) : std::string();
    auto no_arg = [&] {
      if (has_arg) throw InputError("scheme '" + head + "' takes no parameter");
    };
    try {
      if (head == "aic") {
        no_arg();
        out.push_back({"AIC", CriterionScheme::aic()});
      } else if (head == "aicc") {
        no_arg();
        out.push_back({"AICc", CriterionScheme::aicc()});
      } else if (head == "bic") {
        no_arg();
        out.push_back({"BIC", CriterionScheme::bic()});
      } else if (head == "zs") {
        no_arg();
        out.push_back({"ZS", config.zs_mode == SimConfig::ZsEvaluation::Asymptotic
                                 ? CriterionScheme::asymptotic_zs()
                                 : CriterionScheme::exact(PriorScheme::zellner_siow())});
      } else if (head == "hyperg") {
        const double a = has_arg ? parse_positive(arg, token) : config.hyper_g_a;
        out.push_back({"Hg", CriterionScheme::exact(PriorScheme::hyper_g(a))});
      } else if (head == "parabolic") {
        no_arg();
        out.push_back({"Hr", CriterionScheme::exact(PriorScheme::parabolic())});
      } else if (head == "gprior") {
        if (!has_arg) throw InputError("scheme 'gprior' needs a parameter, e.g. gprior:1");
        const double g = parse_positive(arg, token);
        out.push_back({"G(" + arg + ")", CriterionScheme::exact(PriorScheme::gprior(g))});
      } else if (head == "hr-asym") {
        no_arg();
        out.push_back({"Hr-asym", CriterionScheme::asymptotic_hr()});
      } else if (head == "hg-asym") {
        const double a = has_arg ? parse_positive(arg, token) : config.hyper_g_a;
        out.push_back({"Hg-asym", CriterionScheme::asymptotic_hg(a)});
      } else if (head == "zs-asym") {
        no_arg();
        out.push_back({"ZS-asym", CriterionScheme::asymptotic_zs()});
      } else {
        throw InputError("unknown scheme '" + token + "'");
      }
    } catch (const DomainError& e) {
      throw InputError("scheme '" + token + "': " + e.what());
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (out[i].name == out[j].name) throw InputError("scheme '" + out[i].name + "' listed twice");
    }
  }
  return out;
}

Eigen::MatrixXd make_orthogonal_design(std::size_t n, std::size_t k_max, std::uint64_t seed) {
  if (k_max < 1 || k_max > n) {
    throw InputError("orthogonal design needs 1 <= k_max <= N, got k_max=" +
                     std::to_string(k_max) + ", N=" + std::to_string(n));
  }
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(k_max);
  Xoshiro256 stream(seed);
  Eigen::MatrixXd g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = stream.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (qr.matrixQR()(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

Eigen::VectorXd draw_coefficients(std::size_t k_true, std::size_t k_max, double scale,
                                  Xoshiro256& stream) {
  if (k_true < 1 || k_true > k_max) throw InputError("k_true must lie in 1..k_max");
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k_max));
  for (std::size_t i = 0; i < k_true; ++i) beta[static_cast<Eigen::Index>(i)] = stream.cauchy(scale);
  return beta;
}

ReplicateResult run_replicate(const SimConfig& config, const std::vector<SimScheme>& schemes,
                              std::size_t k_true, const NestedDesign& design, Xoshiro256& stream) {
  const std::size_t n = design.n();
  const std::size_t k_max = design.k_max();
  const Eigen::VectorXd beta = draw_coefficients(k_true, k_max, config.signal_scale, stream);
  Eigen::VectorXd y = design.design() * beta;
  for (std::size_t i = 0; i < n; ++i) y[static_cast<Eigen::Index>(i)] += stream.normal();

  const Eigen::VectorXd qty = design.project(y);
  const Scenario scenario =
      Scenario::fixed(-0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi));
  const std::vector<StatSummary> stats = design.summaries(y, scenario);

  std::vector<double> mse_by_k(k_max + 1, kNaN);
  auto mse_of = [&](std::size_t k) {
    if (std::isnan(mse_by_k[k])) {
      mse_by_k[k] = design.fitted_distance_sq(beta, design.coefficients(qty, k));
    }
    return mse_by_k[k];
  };

  ReplicateResult out;
  out.oracle_mse = mse_of(k_true);
  out.mse.assign(schemes.size(), kNaN);
  out.selected_k.assign(schemes.size(), 0);
  out.errors.assign(schemes.size(), std::string());
  std::vector<Candidate> candidates(k_max);
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    try {
      for (std::size_t k = 1; k <= k_max; ++k) {
        candidates[k - 1] = {k, k, criterion_value(stats[k - 1], schemes[s].criterion)};
      }
      const std::size_t k_hat = candidates[select_best(candidates)].k;
      out.selected_k[s] = k_hat;
      out.mse[s] = mse_of(k_hat);
    } catch (const std::exception& e) {
      out.errors[s] = e.what();
    }
  }
  return out;
}

const ReportRow& ExperimentReport::row(std::size_t k_true, const std::string& scheme) const {
  for (const ReportRow& r : rows) {
    if (r.k_true == k_true && r.scheme == scheme) return r;
  }
  throw InputError("no row for k_true=" + std::to_string(k_true) + ", scheme=" + scheme);
}

MeanSe aggregate(const std::vector<double>& values) {
  std::vector<double> v;
  v.reserve(values.size());
  for (double x : values) {
    if (!std::isnan(x)) v.push_back(x);
  }
  MeanSe out;
  out.count = v.size();
  if (v.empty()) {
    out.mean = kNaN;
    out.std_err = kNaN;
    return out;
  }
  const double m = static_cast<double>(v.size());
  out.mean = pairwise_sum(v) / m;
  if (v.size() < 2) {
    out.std_err = kNaN;
    return out;
  }
  std::vector<double> dev(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) dev[i] = (v[i] - out.mean) * (v[i] - out.mean);
  out.std_err = std::sqrt(pairwise_sum(dev) / (m - 1.0) / m);
  return out;
}

ExperimentReport run_experiment(const SimConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::vector<SimScheme> schemes = resolve_schemes(config);
  const std::size_t units = config.k_max * config.reps;

  std::optional<NestedDesign> shared;
  if (!config.redraw_design) {
    shared.emplace(make_orthogonal_design(config.n, config.k_max,
                                          derive_seed(config.base_seed, kDesignStream, 0, 0)));
  }

  std::vector<ReplicateResult> results(units);
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    try {
      for (std::size_t u = next++; u < units && !failed; u = next++) {
        const std::size_t k_true = u / config.reps + 1;
        const std::size_t rep = u % config.reps;
        Xoshiro256 stream(derive_seed(config.base_seed, kReplicateStream, k_true, rep));
        if (shared) {
          results[u] = run_replicate(config, schemes, k_true, *shared, stream);
        } else {
          const NestedDesign design(make_orthogonal_design(
              config.n, config.k_max, derive_seed(config.base_seed, kDesignStream, k_true, rep + 1)));
          results[u] = run_replicate(config, schemes, k_true, design, stream);
        }
      }
    } catch (...) {
      if (!failed.exchange(true)) fatal = std::current_exception();
    }
  };

  std::size_t threads = config.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, units);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  ExperimentReport report;
  report.config = config;
  report.threads_used = std::max<std::size_t>(threads, 1);
  report.scheme_names.push_back("Oracle");
  for (const SimScheme& s : schemes) report.scheme_names.push_back(s.name);
  report.failures.assign(report.scheme_names.size(), 0);

  std::vector<double> mse(config.reps);
  std::vector<double> ks(config.reps);
  for (std::size_t k_true = 1; k_true <= config.k_max; ++k_true) {
    const std::size_t base = (k_true - 1) * config.reps;
    for (std::size_t col = 0; col < report.scheme_names.size(); ++col) {
      for (std::size_t rep = 0; rep < config.reps; ++rep) {
        const ReplicateResult& r = results[base + rep];
        if (col == 0) {
          mse[rep] = r.oracle_mse;
          ks[rep] = static_cast<double>(k_true);
        } else {
          mse[rep] = r.mse[col - 1];
          ks[rep] = r.selected_k[col - 1] == 0 ? kNaN : static_cast<double>(r.selected_k[col - 1]);
          if (!r.errors[col - 1].empty()) ++report.failures[col];
        }
      }
      const MeanSe agg = aggregate(mse);
      report.rows.push_back({k_true, report.scheme_names[col], agg.mean, agg.std_err, agg.count});
      report.mean_selected_k.push_back(aggregate(ks).mean);
    }
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace rprior
