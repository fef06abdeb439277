#include "inewton/harness.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace inewton {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

const char* problem_name(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::quartic: return "quartic";
    case ProblemKind::quadratic: return "quadratic";
    case ProblemKind::biweight: return "biweight";
    case ProblemKind::nls_logistic: return "nls_logistic";
  }
  return "unknown";
}

std::shared_ptr<const Objective> base_objective(const ExperimentConfig& config,
                                                std::shared_ptr<const FiniteSumProblem>& finite_sum) {
  switch (config.problem) {
    case ProblemKind::quartic:
      return std::make_shared<QuarticSaddle>();
    case ProblemKind::quadratic: {
      if (config.quadratic_diag.empty()) {
        fail(ErrorCode::configuration, "problem 'quadratic' needs quadratic_diag");
      }
      const auto d = static_cast<Index>(config.quadratic_diag.size());
      Vector c = Vector::Zero(d);
      if (!config.quadratic_linear.empty()) {
        if (static_cast<Index>(config.quadratic_linear.size()) != d) {
          fail(ErrorCode::configuration, "quadratic_linear must have as many entries as quadratic_diag");
        }
        c = Eigen::Map<const Vector>(config.quadratic_linear.data(), d);
      }
      const Vector diag = Eigen::Map<const Vector>(config.quadratic_diag.data(), d);
      return std::make_shared<Quadratic>(Matrix(diag.asDiagonal()), c);
    }
    case ProblemKind::biweight:
    case ProblemKind::nls_logistic: {
      const LossKind loss =
          config.problem == ProblemKind::biweight ? LossKind::biweight : LossKind::nls_logistic;
      if (!config.data_path.empty()) {
        finite_sum = std::make_shared<FiniteSumProblem>(
            load_dataset(config.data_path, config.data_format, loss, config.data_dim));
      } else {
        SyntheticSpec spec = config.synthetic;
        spec.loss = loss;
        finite_sum = std::make_shared<FiniteSumProblem>(generate_synthetic(spec));
      }
      return finite_sum;
    }
  }
  fail(ErrorCode::internal, "unhandled problem kind");
}

Vector random_point(Index d, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(derive_seed(seed, 0x5eed));
  std::normal_distribution<double> normal(0.0, scale);
  Vector x(d);
  for (Index i = 0; i < d; ++i) x[i] = normal(rng);
  return x;
}

Vector make_x0(const ExperimentConfig& config, Index d, std::uint64_t run_seed) {
  if (config.x0_kind == "values") {
    if (static_cast<Index>(config.x0_values.size()) != d) {
      fail(ErrorCode::configuration, "x0 has " + std::to_string(config.x0_values.size()) +
                                         " entries but the problem dimension is " + std::to_string(d));
    }
    return Eigen::Map<const Vector>(config.x0_values.data(), d);
  }
  if (config.x0_kind == "random") return random_point(d, run_seed, config.x0_scale);
  return Vector::Zero(d);
}

bool is_exact(const ExperimentConfig& config) { return !config.hessian.has_value(); }

}  // namespace

ProblemInstance make_problem(const ExperimentConfig& config, std::uint64_t run_seed) {
  ProblemInstance p;
  p.objective = base_objective(config, p.finite_sum);
  p.x0 = make_x0(config, p.objective->dim(), run_seed);
  return p;
}

HessianSource make_hessian_source(const ExperimentConfig& config, const ProblemInstance& problem) {
  if (is_exact(config)) return exact_hessian_source(problem.objective);
  if (!problem.finite_sum) {
    fail(ErrorCode::configuration, std::string("sub-sampled Hessians need a finite-sum problem, not '") +
                                       problem_name(config.problem) + "'");
  }
  SampledSourceOptions options;
  options.mode = *config.hessian;
  options.cap_at_n = config.sample_cap;
  options.epsilon = config.sample_epsilon;
  options.size = config.sample_size;
  return sampled_hessian_source(problem.finite_sum, options);
}

RunSummary run_solver(const ExperimentConfig& config, const ProblemInstance& problem,
                      std::uint64_t seed) {
  const HessianSource source = make_hessian_source(config, problem);
  RunSummary s;
  s.seed = seed;
  s.result = config.solver == SolverKind::tr
                 ? run_tr(*problem.objective, source, problem.x0, config.tr, seed)
                 : run_arc(*problem.objective, source, problem.x0, config.arc, seed);
  s.final_grad_norm = problem.objective->gradient(s.result.x).norm();
  const OptimalityTolerances& tol = config.solver == SolverKind::tr ? config.tr.tol : config.arc.tol;
  if (problem.objective->dim() <= 500) {
    s.dense_lambda_min = dense_lambda_min(problem.objective->dense_hessian(s.result.x));
    const double eps = source.exact ? 0.0 : s.result.final_epsilon;
    s.optimal = s.final_grad_norm <= tol.eps_g && *s.dense_lambda_min >= -(eps + tol.eps_H);
  }
  return s;
}

std::string format_trace(const ExperimentConfig& config, const RunSummary& summary) {
  const SolveResult& r = summary.result;
  std::string out = "t,F,grad_norm,lambda_min_est,radius_or_sigma,rho,accepted,sample_size,step_norm,eps_t\n";
  for (const IterationRecord& rec : r.trace) {
    out += std::to_string(rec.t) + "," + num(rec.F_value) + "," + num(rec.grad_norm) + "," +
           num(rec.lambda_min_estimate) + "," + num(rec.radius_or_sigma) + "," + num(rec.rho) + "," +
           (rec.accepted ? "1" : "0") + "," + std::to_string(rec.sample_size) + "," +
           num(rec.step_norm) + "," + num(rec.eps_t) + "\n";
  }
  auto footer = [&out](const std::string& key, const std::string& value) {
    out += "# " + key + "=" + value + "\n";
  };
  footer("problem", problem_name(config.problem));
  footer("solver", config.solver == SolverKind::tr ? "tr" : std::string("arc_") + to_string(config.arc.mode));
  footer("hessian", config.hessian ? to_string(*config.hessian) : "exact");
  footer("seed", std::to_string(summary.seed));
  footer("status", to_string(r.status));
  footer("iterations", std::to_string(r.successes + r.failures));
  footer("successes", std::to_string(r.successes));
  footer("failures", std::to_string(r.failures));
  footer("final_F", num(r.F_value));
  footer("final_grad_norm", num(summary.final_grad_norm));
  footer("dense_lambda_min", summary.dense_lambda_min ? num(*summary.dense_lambda_min) : "skipped");
  footer("final_epsilon", num(r.final_epsilon));
  footer("optimal", summary.optimal ? (*summary.optimal ? "true" : "false") : "unknown");
  footer("hessian_cost", std::to_string(r.hessian_cost));
  std::string sizes;
  for (const IterationRecord& rec : r.trace) {
    if (!sizes.empty()) sizes += ";";
    sizes += std::to_string(rec.sample_size);
  }
  footer("sample_sizes", sizes);
  if (!r.diagnostic.empty()) {
    std::string diag = r.diagnostic;
    std::replace(diag.begin(), diag.end(), '\n', ' ');
    footer("diagnostic", diag);
  }
  return out;
}

RunSummary run_experiment(const ExperimentConfig& config) {
  const ProblemInstance problem = make_problem(config, config.seed);
  RunSummary s = run_solver(config, problem, config.seed);
  if (!config.out_path.empty()) {
    std::ofstream f(config.out_path, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::io, "cannot write trace file '" + config.out_path + "'");
    f << format_trace(config, s);
    if (!f) fail(ErrorCode::io, "error writing trace file '" + config.out_path + "'");
  }
  return s;
}

namespace {

bool with_replacement(SampleMode mode) { return mode != SampleMode::uniform_without_replacement; }

std::string verify_line(const VerifyRow& row) {
  const char* kind = row.full_sample ? "full" : row.control ? "control" : "bound";
  const char* status = !row.guaranteed ? "n/a"
                       : row.control   ? (row.report.failure_rate > row.delta ? "FAIL(expected)" : "pass")
                       : row.pass      ? "pass"
                                       : "FAIL";
  char buf[320];
  std::snprintf(buf, sizeof buf, "%-28s %-8s %8.4g %7.3g %12.6g %7zu %-6s %6zu %8zu %8.4f %10.4g  %s\n",
                to_string(row.mode), kind, row.epsilon, row.delta, row.prescribed, row.used,
                row.capped ? "yes" : "no", row.report.trials, row.report.failures,
                row.report.failure_rate, row.report.max_error, status);
  return buf;
}

}  // namespace

VerifyReport verify_bounds(const ExperimentConfig& config) {
  ProblemInstance problem = make_problem(config, config.seed);
  if (!problem.finite_sum) {
    fail(ErrorCode::configuration, "verify-sampling needs a finite-sum problem (biweight or nls_logistic)");
  }
  const FiniteSumProblem& fs = *problem.finite_sum;
  if (fs.dim() > config.verify_max_dim) {
    fail(ErrorCode::configuration, "dimension d=" + std::to_string(fs.dim()) + " exceeds verify_max_dim=" +
                                       std::to_string(config.verify_max_dim) +
                                       "; dense spectral verification refused");
  }
  if (config.verify_epsilons.empty() || config.verify_deltas.empty()) {
    fail(ErrorCode::configuration, "verify_epsilons and verify_deltas must be non-empty");
  }
  const Vector x =
      config.verify_point == "random" ? random_point(fs.dim(), config.seed, 1.0) : Vector::Zero(fs.dim());
  const std::size_t n = fs.num_samples();

  VerifyReport rep;
  std::uint64_t stream = 0;
  auto run_row = [&](VerifyRow row, SampleScheme scheme) {
    row.report = verify_concentration(fs, x, scheme, config.verify_trials, derive_seed(config.seed, ++stream));
    return row;
  };

  std::vector<VerifyRow> bound_rows;
  for (SampleMode mode : config.verify_modes) {
    for (double eps : config.verify_epsilons) {
      for (double delta : config.verify_deltas) {
        SampleScheme scheme = resolve_scheme(fs, x, mode, eps, delta, config.sample_cap);
        VerifyRow row;
        row.mode = mode;
        row.epsilon = eps;
        row.delta = delta;
        row.prescribed = std::ceil(prescribed_sample_bound(fs, x, mode, eps, delta));
        row.used = scheme.resolved_size;
        row.capped = scheme.capped;
        // A capped with-replacement draw falls short of the bound; a capped
        // draw without replacement is the full sum.
        row.guaranteed = !(scheme.capped && with_replacement(mode));
        row = run_row(row, scheme);
        row.pass = !row.guaranteed || row.report.failure_rate <= delta;
        bound_rows.push_back(row);
      }
    }
  }

  {
    SampleScheme scheme;
    scheme.mode = SampleMode::uniform_without_replacement;
    scheme.epsilon = *std::min_element(config.verify_epsilons.begin(), config.verify_epsilons.end());
    scheme.delta = *std::min_element(config.verify_deltas.begin(), config.verify_deltas.end());
    scheme.resolved_size = n;
    VerifyRow row;
    row.mode = scheme.mode;
    row.epsilon = scheme.epsilon;
    row.delta = scheme.delta;
    row.prescribed = static_cast<double>(n);
    row.used = n;
    row.full_sample = true;
    row = run_row(row, scheme);
    row.pass = row.report.failures == 0;
    bound_rows.push_back(row);
  }

  std::vector<VerifyRow> control_rows;
  if (config.verify_control) {
    for (const VerifyRow& base : bound_rows) {
      if (base.full_sample || !base.guaranteed) continue;
      SampleScheme scheme;
      scheme.mode = base.mode;
      scheme.epsilon = base.epsilon;
      scheme.delta = base.delta;
      scheme.cap_at_n = config.sample_cap;
      scheme.resolved_size = std::max<std::size_t>(1, base.used / 4);
      VerifyRow row = base;
      row.control = true;
      row.used = scheme.resolved_size;
      row.capped = false;
      row = run_row(row, scheme);
      row.pass = true;
      if (row.report.failure_rate > row.delta) rep.control_failed = true;
      control_rows.push_back(row);
    }
  }

  for (const VerifyRow& row : bound_rows) {
    if (!row.pass) rep.bounds_hold = false;
  }
  rep.passed = rep.bounds_hold && (!config.verify_control || rep.control_failed);
  rep.rows = bound_rows;
  rep.rows.insert(rep.rows.end(), control_rows.begin(), control_rows.end());

  std::ostringstream os;
  os << "problem=" << problem_name(config.problem) << " n=" << n << " d=" << fs.dim()
     << " K_max=" << short_num(fs.K_max()) << " K_hat=" << short_num(fs.K_hat())
     << " trials=" << config.verify_trials << "\n";
  char head[256];
  std::snprintf(head, sizeof head, "%-28s %-8s %8s %7s %12s %7s %-6s %6s %8s %8s %10s  %s\n", "mode", "kind",
                "epsilon", "delta", "prescribed", "used", "capped", "trials", "failures", "rate",
                "max_error", "status");
  os << head;
  for (const VerifyRow& row : rep.rows) os << verify_line(row);
  os << "bounds_hold=" << (rep.bounds_hold ? "true" : "false");
  if (config.verify_control) os << " control_failed=" << (rep.control_failed ? "true" : "false");
  os << " result=" << (rep.passed ? "PASS" : "FAIL") << "\n";
  rep.text = os.str();
  return rep;
}

CompareReport compare_exact_vs_sampled(const ExperimentConfig& config, int trials) {
  if (!config.hessian) {
    fail(ErrorCode::configuration, "compare needs a sub-sampled 'hessian' mode to set against the exact one");
  }
  if (trials < 1) fail(ErrorCode::configuration, "compare needs at least one trial");
  const ProblemInstance base = make_problem(config, config.seed);
  if (!base.finite_sum) {
    fail(ErrorCode::configuration, "compare needs a finite-sum problem (biweight or nls_logistic)");
  }
  ExperimentConfig exact_config = config;
  exact_config.hessian.reset();

  CompareReport rep;
  rep.runs.resize(static_cast<std::size_t>(trials));
  detail::parallel_for(trials, [&](int k) {
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(k);
    ProblemInstance p = base;
    p.x0 = make_x0(config, base.objective->dim(), seed);
    CompareRun& run = rep.runs[static_cast<std::size_t>(k)];
    run.exact = run_solver(exact_config, p, seed);
    run.sampled = run_solver(config, p, seed);
  });

  const OptimalityTolerances& tol = config.solver == SolverKind::tr ? config.tr.tol : config.arc.tol;
  auto is_optimal = [&](const RunSummary& s) {
    return s.optimal.value_or(s.final_grad_norm <= tol.eps_g);
  };
  auto mean_size = [](const RunSummary& s) {
    double sum = 0.0;
    for (const IterationRecord& rec : s.result.trace) sum += static_cast<double>(rec.sample_size);
    return s.result.trace.empty() ? 0.0 : sum / static_cast<double>(s.result.trace.size());
  };
  double exact_size = 0.0;
  double sampled_size = 0.0;
  std::ostringstream os;
  char line[320];
  std::snprintf(line, sizeof line, "%6s | %-15s %6s %10s %11s | %-15s %6s %10s %11s %10s %9s\n", "seed",
                "exact", "iters", "grad", "lambda_min", "sampled", "iters", "grad", "lambda_min", "eps",
                "mean|S|");
  os << line;
  for (const CompareRun& run : rep.runs) {
    if (is_optimal(run.exact)) ++rep.exact_optimal;
    if (is_optimal(run.sampled)) ++rep.sampled_optimal;
    exact_size += mean_size(run.exact);
    sampled_size += mean_size(run.sampled);
    auto lam = [](const RunSummary& s) { return s.dense_lambda_min ? short_num(*s.dense_lambda_min) : "-"; };
    std::snprintf(line, sizeof line, "%6llu | %-15s %6zu %10.3g %11s | %-15s %6zu %10.3g %11s %10.3g %9.1f\n",
                  static_cast<unsigned long long>(run.exact.seed), to_string(run.exact.result.status),
                  run.exact.result.successes + run.exact.result.failures, run.exact.final_grad_norm,
                  lam(run.exact).c_str(), to_string(run.sampled.result.status),
                  run.sampled.result.successes + run.sampled.result.failures, run.sampled.final_grad_norm,
                  lam(run.sampled).c_str(), run.sampled.result.final_epsilon, mean_size(run.sampled));
    os << line;
  }
  rep.cost_ratio = exact_size > 0.0 ? sampled_size / exact_size : 0.0;
  const double delta = config.solver == SolverKind::tr ? config.tr.delta_total : config.arc.delta_total;
  const double sampled_fraction = static_cast<double>(rep.sampled_optimal) / trials;
  rep.passed = rep.exact_optimal == static_cast<std::size_t>(trials) && sampled_fraction >= 1.0 - delta;
  os << "exact_optimal=" << rep.exact_optimal << "/" << trials << " sampled_optimal=" << rep.sampled_optimal
     << "/" << trials << " required_fraction=" << short_num(1.0 - delta)
     << " cost_ratio=" << short_num(rep.cost_ratio) << " result=" << (rep.passed ? "PASS" : "FAIL") << "\n";
  rep.text = os.str();
  return rep;
}

}  // namespace inewton
