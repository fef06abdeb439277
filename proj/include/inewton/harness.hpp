#pragma once

// Experiment driver: flat key = value configuration, solver dispatch, trace
// files, sampling-bound verification and exact-vs-sampled comparison.

#include "inewton/core.hpp"
#include "inewton/cubic_reg.hpp"
#include "inewton/problems.hpp"
#include "inewton/sampling.hpp"
#include "inewton/trust_region.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace inewton {

enum class ProblemKind { quartic, quadratic, biweight, nls_logistic };
enum class SolverKind { tr, arc };

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::quartic;
  std::string data_path;
  DataFormat data_format = DataFormat::csv;
  std::optional<Index> data_dim;
  SyntheticSpec synthetic;
  std::vector<double> quadratic_diag;
  std::vector<double> quadratic_linear;
  /// "zeros", "random" or explicit coordinates.
  std::string x0_kind = "zeros";
  std::vector<double> x0_values;
  double x0_scale = 1.0;

  SolverKind solver = SolverKind::tr;
  /// Empty for the exact Hessian.
  std::optional<SampleMode> hessian;
  bool sample_cap = true;
  std::optional<double> sample_epsilon;
  std::optional<std::size_t> sample_size;

  TRConfig tr;
  ARCConfig arc;
  std::uint64_t seed = 1;
  std::string out_path;
  int trials = 20;

  std::vector<double> verify_epsilons{0.5, 0.3, 0.2, 0.1, 0.05, 0.01};
  std::vector<double> verify_deltas{0.1, 0.01};
  std::vector<SampleMode> verify_modes{SampleMode::uniform_without_replacement,
                                       SampleMode::nonuniform};
  int verify_trials = 1000;
  std::string verify_point = "random";
  bool verify_control = true;
  Index verify_max_dim = 500;

  /// Keys that were set explicitly, in file order.
  std::vector<std::string> keys;
};

/// Every accepted key with a one-line description, in documentation order.
const std::vector<std::pair<std::string, std::string>>& config_keys();

/// Parses "key = value" lines; '#' starts a comment. Unknown or repeated keys
/// and malformed values are configuration errors naming the key.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::string& path);
/// Applies a single key = value assignment.
void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

struct ProblemInstance {
  std::shared_ptr<const Objective> objective;
  std::shared_ptr<const FiniteSumProblem> finite_sum;  // null for analytic problems
  Vector x0;
};

ProblemInstance make_problem(const ExperimentConfig& config, std::uint64_t run_seed);
HessianSource make_hessian_source(const ExperimentConfig& config, const ProblemInstance& problem);

struct RunSummary {
  SolveResult result;
  double final_grad_norm = 0.0;
  std::optional<double> dense_lambda_min;
  /// ||grad F|| <= eps_g and lambda_min >= -(eps + eps_H), with eps the
  /// final Hessian tolerance; empty when no dense check was possible.
  std::optional<bool> optimal;
  std::uint64_t seed = 0;
};

RunSummary run_solver(const ExperimentConfig& config, const ProblemInstance& problem,
                      std::uint64_t seed);

/// Trace CSV text: header, one row per record, '#' footer lines.
std::string format_trace(const ExperimentConfig& config, const RunSummary& summary);

/// Runs the configured solver and writes the trace to out_path when set.
RunSummary run_experiment(const ExperimentConfig& config);

struct VerifyRow {
  SampleMode mode = SampleMode::uniform_without_replacement;
  double epsilon = 0.0;
  double delta = 0.0;
  double prescribed = 0.0;  // unrounded bound
  std::size_t used = 0;
  bool capped = false;
  /// Quartered negative control.
  bool control = false;
  bool full_sample = false;
  ConcentrationReport report;
  /// Rows whose size falls short of the bound carry no guarantee.
  bool guaranteed = true;
  bool pass = true;
};

struct VerifyReport {
  std::vector<VerifyRow> rows;
  bool bounds_hold = true;
  bool control_failed = false;
  bool passed = true;
  std::string text;
};

VerifyReport verify_bounds(const ExperimentConfig& config);

struct CompareRun {
  RunSummary exact;
  RunSummary sampled;
};

struct CompareReport {
  std::vector<CompareRun> runs;
  std::size_t exact_optimal = 0;
  std::size_t sampled_optimal = 0;
  double cost_ratio = 0.0;
  bool passed = true;
  std::string text;
};

CompareReport compare_exact_vs_sampled(const ExperimentConfig& config, int trials);

}  // namespace inewton
