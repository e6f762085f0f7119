#include "rprior/rprior.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rprior/compare.hpp"
#include "rprior/errors.hpp"
#include "rprior/evidence.hpp"
#include "rprior/io.hpp"
#include "rprior/priors.hpp"
#include "rprior/selection.hpp"
#include "rprior/simulation.hpp"
#include "rprior/specfun.hpp"

struct rp_dataset {
  rprior::LoadedDataset data;
};

struct rp_experiment {
  rprior::ExperimentReport report;
};

namespace {

thread_local std::string g_last_error;

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class F>
rp_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return RP_OK;
  } catch (const ArgumentError& e) {
    g_last_error = e.what();
    return RP_ERR_ARGUMENT;
  } catch (const rprior::InputError& e) {
    g_last_error = e.what();
    return RP_ERR_INPUT;
  } catch (const rprior::SingularDesignError& e) {
    g_last_error = e.what();
    return RP_ERR_SINGULAR;
  } catch (const rprior::DomainError& e) {
    g_last_error = e.what();
    return RP_ERR_DOMAIN;
  } catch (const rprior::NumericalError& e) {
    g_last_error = e.what();
    return RP_ERR_NUMERICAL;
  } catch (const rprior::UnsupportedSchemeError& e) {
    g_last_error = e.what();
    return RP_ERR_UNSUPPORTED;
  } catch (const IoError& e) {
    g_last_error = e.what();
    return RP_ERR_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RP_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return RP_ERR_INTERNAL;
  }
}

template <class T>
void require(const T* p, const char* name) {
  if (p == nullptr) throw ArgumentError(std::string(name) + " is null");
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rprior::Scenario to_scenario(const rp_stats& s) {
  return s.fixed_sigma ? rprior::Scenario::fixed(s.ln_c_sigma) : rprior::Scenario::variable();
}

rprior::StatSummary to_summary(const rp_stats& s) {
  rprior::StatSummary out;
  out.n = s.n;
  out.k = s.k;
  out.mean_sq = s.mean_sq;
  out.bhat_sq = s.bhat_sq;
  out.q0 = s.q0;
  out.scenario = to_scenario(s);
  return out;
}

rprior::PriorScheme exact_prior(const char* token) {
  const rprior::CriterionScheme c = rprior::parse_scheme(token);
  if (!c.is_exact()) {
    throw rprior::InputError(std::string("scheme '") + token + "' has no prior; use rp_criterion");
  }
  return c.prior;
}

void fill(const rprior::EvidenceValue& ev, rp_evidence* out) {
  out->log_evidence = ev.log_evidence;
  out->method = rprior::to_string(ev.method);
  out->terms = ev.terms;
  out->abs_err_estimate = ev.abs_err_estimate;
  out->converged = ev.converged ? 1 : 0;
}

std::string join(const char* dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_file(const std::string& path, const std::string& text) {
  try {
    rprior::write_text_file(path, text);
  } catch (const rprior::InputError& e) {
    throw IoError(e.what());
  }
}

}  // namespace

extern "C" {

const char* rp_last_error(void) { return g_last_error.c_str(); }

const char* rp_status_name(rp_status status) {
  switch (status) {
    case RP_OK: return "ok";
    case RP_ERR_ARGUMENT: return "invalid argument";
    case RP_ERR_INPUT: return "input error";
    case RP_ERR_DOMAIN: return "domain error";
    case RP_ERR_SINGULAR: return "singular design";
    case RP_ERR_NUMERICAL: return "numerical failure";
    case RP_ERR_UNSUPPORTED: return "unsupported scheme";
    case RP_ERR_IO: return "i/o error";
    case RP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void rp_string_free(char* s) { std::free(s); }

const char* rp_version(void) { return "0.1.0"; }

rp_status rp_function_from_name(const char* name, rp_function* out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    const std::string n = name;
    if (n == "0F1" || n == "0f1") {
      *out = RP_FN_0F1;
    } else if (n == "1F1" || n == "1f1") {
      *out = RP_FN_1F1;
    } else if (n == "2F1" || n == "2f1") {
      *out = RP_FN_2F1;
    } else if (n == "U" || n == "u") {
      *out = RP_FN_U;
    } else {
      throw rprior::InputError("unknown function '" + n + "' (expected 0F1, 1F1, 2F1 or U)");
    }
  });
}

rp_status rp_specfun(rp_function fn, const double* params, size_t n_params, rp_eval* out) {
  return guarded([&] {
    require(out, "out");
    require(params, "params");
    auto want = [&](size_t count, const char* name) {
      if (n_params != count) {
        throw rprior::InputError(std::string(name) + " takes " + std::to_string(count) +
                                 " parameters, got " + std::to_string(n_params));
      }
    };
    namespace sf = rprior::specfun;
    sf::EvalResult r;
    switch (fn) {
      case RP_FN_0F1: want(2, "0F1"); r = sf::log_0F1(params[0], params[1]); break;
      case RP_FN_1F1: want(3, "1F1"); r = sf::log_1F1(params[0], params[1], params[2]); break;
      case RP_FN_2F1:
        want(4, "2F1");
        r = sf::log_2F1(params[0], params[1], params[2], params[3]);
        break;
      case RP_FN_U: want(3, "U"); r = sf::log_U(params[0], params[1], params[2]); break;
      default: throw ArgumentError("unknown function id");
    }
    out->log_value = r.log_value;
    out->terms = r.terms_used;
    out->converged = r.converged ? 1 : 0;
    out->branch = sf::to_string(r.branch).data();
  });
}

rp_status rp_dataset_load(const char* path, rp_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto d = std::make_unique<rp_dataset>();
    d->data = rprior::load_dataset(path);
    *out = d.release();
  });
}

rp_status rp_dataset_from_arrays(size_t n, size_t k, const double* y, const double* x,
                                 const double* sigma, rp_dataset** out) {
  return guarded([&] {
    require(y, "y");
    require(x, "x");
    require(out, "out");
    *out = nullptr;
    if (n == 0 || k == 0) throw rprior::InputError("dataset needs n >= 1 and k >= 1");
    const auto rows = static_cast<Eigen::Index>(n);
    const auto cols = static_cast<Eigen::Index>(k);
    auto d = std::make_unique<rp_dataset>();
    d->data.data.y = Eigen::Map<const Eigen::VectorXd>(y, rows);
    d->data.design = Eigen::Map<const Eigen::MatrixXd>(x, rows, cols);
    if (sigma != nullptr) {
      Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(sigma, rows);
      for (Eigen::Index i = 0; i < rows; ++i) {
        if (!(s[i] > 0.0) || !std::isfinite(s[i])) {
          throw rprior::InputError("sigma[" + std::to_string(i) + "] must be positive");
        }
      }
      d->data.data.sigma = std::move(s);
    }
    if (!d->data.data.y.allFinite() || !d->data.design.allFinite()) {
      throw rprior::InputError("dataset contains non-finite values");
    }
    for (size_t j = 1; j <= k; ++j) d->data.predictor_names.push_back("x" + std::to_string(j));
    *out = d.release();
  });
}

rp_status rp_dataset_shape(const rp_dataset* dataset, size_t* n, size_t* k, int* has_sigma) {
  return guarded([&] {
    require(dataset, "dataset");
    if (n) *n = static_cast<size_t>(dataset->data.data.y.size());
    if (k) *k = static_cast<size_t>(dataset->data.design.cols());
    if (has_sigma) *has_sigma = dataset->data.data.sigma ? 1 : 0;
  });
}

void rp_dataset_free(rp_dataset* dataset) { delete dataset; }

rp_status rp_stats_compute(const rp_dataset* dataset, const size_t* columns, size_t n_columns,
                           rp_scenario scenario, rp_stats* out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    std::optional<rprior::Scenario::Kind> kind;
    if (scenario == RP_SCENARIO_FIXED) {
      kind = rprior::Scenario::Kind::FixedSigma;
    } else if (scenario == RP_SCENARIO_VARIABLE) {
      kind = rprior::Scenario::Kind::VariableSigma;
    } else if (scenario != RP_SCENARIO_AUTO) {
      throw ArgumentError("unknown scenario");
    }
    std::vector<size_t> cols;
    if (columns != nullptr) {
      if (n_columns == 0) throw rprior::InputError("empty column list");
      cols.assign(columns, columns + n_columns);
    } else {
      cols.resize(static_cast<size_t>(dataset->data.design.cols()));
      for (size_t j = 0; j < cols.size(); ++j) cols[j] = j;
    }
    const rprior::SufficientStats s = rprior::candidate_stats(dataset->data, cols, kind);
    out->n = s.n;
    out->k = s.k;
    out->mean_sq = s.mean_sq;
    out->bhat_sq = s.bhat_sq;
    out->q0 = s.q0;
    out->fixed_sigma = s.scenario.is_fixed() ? 1 : 0;
    out->ln_c_sigma = s.scenario.ln_c_sigma;
  });
}

rp_status rp_log_evidence(const rp_stats* stats, const char* scheme, rp_evidence* out) {
  return guarded([&] {
    require(stats, "stats");
    require(scheme, "scheme");
    require(out, "out");
    const rprior::CriterionScheme c = rprior::parse_scheme(scheme);
    if (!c.is_exact()) {
      throw rprior::InputError(std::string("scheme '") + scheme + "' has no prior; use rp_criterion");
    }
    fill(rprior::log_evidence(to_summary(*stats), c.prior, c.zs_mode), out);
  });
}

rp_status rp_quadrature_log_evidence(const rp_stats* stats, const char* scheme, rp_route route,
                                     rp_evidence* out) {
  return guarded([&] {
    require(stats, "stats");
    require(scheme, "scheme");
    require(out, "out");
    if (route != RP_ROUTE_R && route != RP_ROUTE_G) throw ArgumentError("unknown route");
    fill(rprior::quadrature_log_evidence(to_summary(*stats), exact_prior(scheme),
                                         route == RP_ROUTE_R ? rprior::Route::RPrior
                                                             : rprior::Route::GPrior),
         out);
  });
}

rp_status rp_criterion(const rp_stats* stats, const char* scheme, double* out) {
  return guarded([&] {
    require(stats, "stats");
    require(scheme, "scheme");
    require(out, "out");
    *out = rprior::criterion_value(to_summary(*stats), rprior::parse_scheme(scheme));
  });
}

rp_status rp_prior_density(const char* scheme, rp_route variable, double x, double sigma,
                           size_t k, size_t n, double* out) {
  return guarded([&] {
    require(scheme, "scheme");
    require(out, "out");
    const rprior::PriorScheme prior = exact_prior(scheme);
    if (variable == RP_ROUTE_R) {
      *out = rprior::r_prior_log_density(prior, x, sigma, k, n);
    } else if (variable == RP_ROUTE_G) {
      *out = rprior::g_prior_log_density(prior, x, k, n);
    } else {
      throw ArgumentError("unknown density variable");
    }
  });
}

rp_status rp_compare(const rp_dataset* dataset, const rp_compare_options* options,
                     char** json_out) {
  bool converged = true;
  const rp_status st = guarded([&] {
    require(dataset, "dataset");
    require(options, "options");
    require(json_out, "json_out");
    *json_out = nullptr;
    const double a = options->hyper_g_a == 0.0 ? rprior::kDefaultHyperGA : options->hyper_g_a;
    rprior::CompareRequest req;
    if (options->n_schemes == 0) throw rprior::InputError("no schemes requested");
    require(options->schemes, "options->schemes");
    for (size_t i = 0; i < options->n_schemes; ++i) {
      require(options->schemes[i], "scheme token");
      req.schemes.push_back(rprior::parse_scheme(options->schemes[i], a));
    }
    if (options->scenario == RP_SCENARIO_FIXED) {
      req.scenario = rprior::Scenario::Kind::FixedSigma;
    } else if (options->scenario == RP_SCENARIO_VARIABLE) {
      req.scenario = rprior::Scenario::Kind::VariableSigma;
    } else if (options->scenario != RP_SCENARIO_AUTO) {
      throw ArgumentError("unknown scenario");
    }
    req.nested_max = options->nested_max;
    if (options->columns != nullptr) {
      if (options->nested_max != 0) {
        throw rprior::InputError("explicit columns and a nested maximum are exclusive");
      }
      req.subsets = rprior::parse_subsets(options->columns, dataset->data.predictor_names);
    }
    const rprior::ComparisonReport rep = rprior::compare_models(
        dataset->data, req, options->source ? options->source : "<memory>");
    *json_out = duplicate(rep.to_json());
    converged = rep.all_converged();
  });
  if (st == RP_OK && !converged) {
    g_last_error = "an exact evidence did not reach its tolerance";
    return RP_ERR_NUMERICAL;
  }
  return st;
}

rp_status rp_config_load(const char* path, char** json_out) {
  return guarded([&] {
    require(path, "path");
    require(json_out, "json_out");
    *json_out = nullptr;
    *json_out = duplicate(rprior::config_to_json(rprior::load_config(path)));
  });
}

rp_status rp_experiment_run(const char* config_json, const uint64_t* seed, rp_experiment** out) {
  return guarded([&] {
    require(config_json, "config_json");
    require(out, "out");
    *out = nullptr;
    rprior::SimConfig config = rprior::parse_config(config_json);
    if (seed != nullptr) config.base_seed = *seed;
    auto e = std::make_unique<rp_experiment>();
    e->report = rprior::run_experiment(config);
    *out = e.release();
  });
}

void rp_experiment_free(rp_experiment* experiment) { delete experiment; }

rp_status rp_experiment_rows(const rp_experiment* experiment, size_t* count) {
  return guarded([&] {
    require(experiment, "experiment");
    require(count, "count");
    *count = experiment->report.rows.size();
  });
}

rp_status rp_experiment_row(const rp_experiment* experiment, size_t index, rp_report_row* out) {
  return guarded([&] {
    require(experiment, "experiment");
    require(out, "out");
    if (index >= experiment->report.rows.size()) throw ArgumentError("row index out of range");
    const rprior::ReportRow& r = experiment->report.rows[index];
    out->k_true = r.k_true;
    out->scheme = r.scheme.c_str();
    out->mean_mse = r.mean_mse;
    out->std_err = r.std_err;
    out->reps = r.reps;
  });
}

rp_status rp_experiment_failures(const rp_experiment* experiment, size_t* count) {
  return guarded([&] {
    require(experiment, "experiment");
    require(count, "count");
    size_t total = 0;
    for (size_t f : experiment->report.failures) total += f;
    *count = total;
  });
}

rp_status rp_experiment_csv(const rp_experiment* experiment, char** out) {
  return guarded([&] {
    require(experiment, "experiment");
    require(out, "out");
    *out = nullptr;
    std::ostringstream ss;
    rprior::write_mse_table(experiment->report, ss);
    *out = duplicate(ss.str());
  });
}

rp_status rp_experiment_metadata_json(const rp_experiment* experiment, char** out) {
  return guarded([&] {
    require(experiment, "experiment");
    require(out, "out");
    *out = nullptr;
    *out = duplicate(rprior::metadata_json(experiment->report));
  });
}

rp_status rp_experiment_write_csv(const rp_experiment* experiment, const char* dir) {
  return guarded([&] {
    require(experiment, "experiment");
    require(dir, "dir");
    std::ostringstream ss;
    rprior::write_mse_table(experiment->report, ss);
    write_file(join(dir, "mse_table.csv"), ss.str());
    write_file(join(dir, "metadata.json"), rprior::metadata_json(experiment->report));
  });
}

rp_status rp_experiment_write_charts(const rp_experiment* experiment, const char* dir) {
  return guarded([&] {
    require(experiment, "experiment");
    require(dir, "dir");
    write_file(join(dir, "mse_vs_k.svg"), rprior::mse_chart_svg(experiment->report, false));
    write_file(join(dir, "mse_minus_oracle.svg"), rprior::mse_chart_svg(experiment->report, true));
  });
}

}  // extern "C"
