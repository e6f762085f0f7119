// Command-line front end over the rprior C API.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rprior/rprior.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;

int fail(rp_status st) {
  std::cerr << "error: " << rp_status_name(st) << ": " << rp_last_error() << "\n";
  return st == RP_ERR_NUMERICAL ? kExitNumerical : kExitInput;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  rp_string_free(s);
  return out;
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write '" << path << "'\n";
    return false;
  }
  return true;
}

bool ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::cerr << "error: cannot create directory '" << dir << "': " << ec.message() << "\n";
    return false;
  }
  return true;
}

rp_scenario scenario_from(const std::string& s) {
  if (s == "fixed") return RP_SCENARIO_FIXED;
  if (s == "variable") return RP_SCENARIO_VARIABLE;
  return RP_SCENARIO_AUTO;
}

struct CompareArgs {
  std::string dataset;
  std::vector<std::string> schemes;
  std::string scenario = "auto";
  std::size_t nested_max = 0;
  std::string columns;
  double hyper_g_a = 3.0;
  std::string out;
};

int run_compare(const CompareArgs& a) {
  rp_dataset* ds = nullptr;
  if (rp_status st = rp_dataset_load(a.dataset.c_str(), &ds); st != RP_OK) return fail(st);

  std::vector<std::string> tokens = a.schemes;
  if (tokens.empty()) tokens = {"parabolic", "hyperg", "zs", "bic"};
  std::vector<const char*> ptrs;
  for (const std::string& t : tokens) ptrs.push_back(t.c_str());

  rp_compare_options opt{};
  opt.schemes = ptrs.data();
  opt.n_schemes = ptrs.size();
  opt.scenario = scenario_from(a.scenario);
  opt.nested_max = a.nested_max;
  opt.columns = a.columns.empty() ? nullptr : a.columns.c_str();
  opt.hyper_g_a = a.hyper_g_a;
  opt.source = a.dataset.c_str();

  char* json = nullptr;
  const rp_status st = rp_compare(ds, &opt, &json);
  rp_dataset_free(ds);
  if (st != RP_OK && json == nullptr) return fail(st);
  const std::string report = take(json);

  if (a.out.empty()) {
    std::cout << report;
  } else {
    if (!ensure_dir(a.out)) return kExitInput;
    const std::string path = (std::filesystem::path(a.out) / "compare.json").string();
    if (!write_file(path, report)) return kExitInput;
    std::cerr << "wrote " << path << "\n";
  }
  return st == RP_OK ? kExitOk : fail(st);
}

struct SimulateArgs {
  std::string config;
  std::string out = ".";
  bool plot = false;
  std::optional<std::uint64_t> seed;
};

int run_simulate(const SimulateArgs& a) {
  char* cfg = nullptr;
  if (rp_status st = rp_config_load(a.config.c_str(), &cfg); st != RP_OK) return fail(st);
  const std::string config = take(cfg);
  if (!ensure_dir(a.out)) return kExitInput;

  rp_experiment* exp = nullptr;
  const std::uint64_t* seed = a.seed ? &*a.seed : nullptr;
  if (rp_status st = rp_experiment_run(config.c_str(), seed, &exp); st != RP_OK) return fail(st);

  rp_status st = rp_experiment_write_csv(exp, a.out.c_str());
  if (st == RP_OK && a.plot) st = rp_experiment_write_charts(exp, a.out.c_str());
  std::size_t failures = 0;
  if (st == RP_OK) st = rp_experiment_failures(exp, &failures);
  rp_experiment_free(exp);
  if (st != RP_OK) return fail(st);

  std::cerr << "wrote " << (std::filesystem::path(a.out) / "mse_table.csv").string() << "\n";
  if (failures > 0) {
    std::cerr << "warning: " << failures << " scheme evaluations failed; see metadata.json\n";
  }
  return kExitOk;
}

int run_specfun(const std::string& name, const std::vector<double>& params) {
  rp_function fn{};
  if (rp_status st = rp_function_from_name(name.c_str(), &fn); st != RP_OK) return fail(st);
  rp_eval r{};
  if (rp_status st = rp_specfun(fn, params.data(), params.size(), &r); st != RP_OK) return fail(st);
  std::printf("log_value %.17g\nterms %zu\nbranch %s\nconverged %s\n", r.log_value, r.terms,
              r.branch, r.converged ? "yes" : "no");
  return r.converged ? kExitOk : kExitNumerical;
}

struct DensityArgs {
  std::string scheme;
  std::string variable = "r";
  double x = 1.0;
  double sigma = 1.0;
  std::size_t k = 1;
  std::size_t n = 100;
};

int run_density(const DensityArgs& a) {
  double v = 0.0;
  const rp_route route = a.variable == "g" ? RP_ROUTE_G : RP_ROUTE_R;
  if (rp_status st = rp_prior_density(a.scheme.c_str(), route, a.x, a.sigma, a.k, a.n, &v);
      st != RP_OK) {
    return fail(st);
  }
  std::printf("log_density %.17g\n", v);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian model comparison with r-priors, g-priors and information criteria"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rp_version()));

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Compare candidate models on a CSV dataset");
  compare->add_option("dataset", cmp.dataset, "CSV with columns y, x1..xK, optional sigma and c")
      ->required();
  compare->add_option("--scheme", cmp.schemes,
                      "Repeatable: gprior:<g>, hyperg[:a], zs, parabolic, aic, aicc, bic, "
                      "hr-asym, hg-asym[:a], zs-asym");
  compare->add_option("--scenario", cmp.scenario, "fixed or variable (default: from sigma column)")
      ->check(CLI::IsMember({"auto", "fixed", "variable"}));
  compare->add_option("--nested-max", cmp.nested_max, "Largest nested model size")
      ->check(CLI::PositiveNumber);
  compare->add_option("--columns", cmp.columns, "Explicit candidates, e.g. \"x1,x3;x2\"")
      ->excludes("--nested-max");
  compare->add_option("--hyper-g-a", cmp.hyper_g_a, "Default a for hyperg")->capture_default_str();
  compare->add_option("--out", cmp.out, "Directory for compare.json (default: stdout)");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run the nested-selection MSE study");
  simulate->add_option("config", sim.config, "JSON run config")->required();
  simulate->add_option("--out", sim.out, "Output directory")->capture_default_str();
  simulate->add_flag("--plot", sim.plot, "Also write SVG charts");
  simulate->add_option("--seed", sim.seed, "Override base_seed");

  std::string fn_name;
  std::vector<double> fn_params;
  auto* specfun = app.add_subcommand("specfun", "Evaluate ln 0F1, 1F1, 2F1 or U");
  specfun->add_option("function", fn_name, "0F1, 1F1, 2F1 or U")->required();
  specfun->add_option("params", fn_params, "Arguments in order")->required();

  DensityArgs dens;
  auto* density = app.add_subcommand("density", "Evaluate a prior log density");
  density->add_option("scheme", dens.scheme, "gprior:<g>, hyperg[:a], zs or parabolic")->required();
  density->add_option("--var", dens.variable, "r or g")->capture_default_str()->check(CLI::IsMember({"r", "g"}));
  density->add_option("--at", dens.x, "Point r or g")->capture_default_str();
  density->add_option("--sigma", dens.sigma, "Noise scale for r densities")->capture_default_str();
  density->add_option("-k,--k", dens.k, "Model size")->capture_default_str();
  density->add_option("-n,--n", dens.n, "Sample size")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  if (*compare) return run_compare(cmp);
  if (*simulate) return run_simulate(sim);
  if (*specfun) return run_specfun(fn_name, fn_params);
  if (*density) return run_density(dens);
  return kExitInput;
}
