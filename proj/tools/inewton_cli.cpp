// inewton command-line front end. Talks to the library only through the C API.

#include "inewton/inewton.h"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace {

constexpr int exit_converged = 0;
constexpr int exit_internal = 1;
constexpr int exit_not_converged = 2;
constexpr int exit_config = 3;
constexpr int exit_verification = 4;

int exit_for(inw_status status) {
  switch (status) {
    case INW_ERR_CONFIG:
    case INW_ERR_PARSE:
    case INW_ERR_IO:
    case INW_ERR_INVALID_ARGUMENT:
      return exit_config;
    default:
      return exit_internal;
  }
}

int report_error(inw_status status) {
  std::fprintf(stderr, "inewton: %s: %s\n", inw_status_name(status), inw_last_error());
  return exit_for(status);
}

struct ConfigHandle {
  inw_config* ptr = nullptr;
  ~ConfigHandle() { inw_config_free(ptr); }
};

int load(const std::string& path, ConfigHandle& config) {
  const inw_status st = inw_config_load(path.c_str(), &config.ptr);
  return st == INW_OK ? -1 : report_error(st);
}

int run_solve(const std::string& path, const std::string& seed, const std::string& out) {
  ConfigHandle config;
  if (int rc = load(path, config); rc >= 0) return rc;
  if (!seed.empty()) {
    if (inw_status st = inw_config_set(config.ptr, "seed", seed.c_str()); st != INW_OK) return report_error(st);
  }
  if (!out.empty()) {
    if (inw_status st = inw_config_set(config.ptr, "out", out.c_str()); st != INW_OK) return report_error(st);
  }
  inw_result* result = nullptr;
  if (inw_status st = inw_solve(config.ptr, &result); st != INW_OK) return report_error(st);

  const char* status_names[] = {"converged", "max_iterations", "numerical_failure", "stalled"};
  std::printf("status=%s\n", status_names[inw_result_status(result)]);
  std::printf("iterations=%zu successes=%zu failures=%zu\n", inw_result_successes(result) + inw_result_failures(result),
              inw_result_successes(result), inw_result_failures(result));
  std::printf("F=%.17g\n", inw_result_value(result));
  std::printf("grad_norm=%.6g\n", inw_result_grad_norm(result));
  const double lam = inw_result_lambda_min(result);
  if (std::isnan(lam)) {
    std::printf("dense_lambda_min=skipped\n");
  } else {
    std::printf("dense_lambda_min=%.6g\n", lam);
  }
  std::printf("final_epsilon=%.6g\n", inw_result_final_epsilon(result));
  std::printf("hessian_cost=%zu\n", inw_result_hessian_cost(result));
  if (*inw_result_diagnostic(result)) std::printf("diagnostic=%s\n", inw_result_diagnostic(result));
  const int rc = inw_result_converged(result) ? exit_converged : exit_not_converged;
  inw_result_free(result);
  return rc;
}

int run_report(inw_status st, inw_report* report) {
  if (st != INW_OK) return report_error(st);
  std::fputs(inw_report_text(report), stdout);
  const int rc = inw_report_passed(report) ? exit_converged : exit_verification;
  inw_report_free(report);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-region and cubic-regularization Newton methods with inexact Hessians"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(inw_version()));

  std::string config_path;
  std::string seed;
  std::string out;
  int trials = 0;

  auto* solve = app.add_subcommand("solve", "Run the configured solver and write a trace CSV");
  solve->add_option("--config", config_path, "Config file")->required();
  solve->add_option("--seed", seed, "Solver seed (overrides the config)");
  solve->add_option("--out", out, "Trace CSV path (overrides the config)");

  auto* verify = app.add_subcommand("verify-sampling", "Monte-Carlo check of the sample-size bounds");
  verify->add_option("--config", config_path, "Config file")->required();

  auto* compare = app.add_subcommand("compare", "Exact versus sub-sampled Hessian runs over several seeds");
  compare->add_option("--config", config_path, "Config file")->required();
  compare->add_option("--trials", trials, "Number of seeds")->required()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config;
  }

  if (solve->parsed()) return run_solve(config_path, seed, out);

  ConfigHandle config;
  if (int rc = load(config_path, config); rc >= 0) return rc;
  inw_report* report = nullptr;
  const inw_status st = verify->parsed() ? inw_verify_sampling(config.ptr, &report)
                                         : inw_compare(config.ptr, trials, &report);
  return run_report(st, report);
}
