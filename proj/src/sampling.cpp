#include "inewton/sampling.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace inewton {

const char* to_string(SampleMode mode) {
  switch (mode) {
    case SampleMode::uniform_with_replacement: return "uniform_with_replacement";
    case SampleMode::uniform_without_replacement: return "uniform_without_replacement";
    case SampleMode::nonuniform: return "nonuniform";
    case SampleMode::nonuniform_intrinsic: return "nonuniform_intrinsic";
  }
  return "unknown";
}

SampleMode parse_sample_mode(const std::string& name) {
  if (name == "uniform_with_replacement") return SampleMode::uniform_with_replacement;
  if (name == "uniform_without_replacement" || name == "uniform") {
    return SampleMode::uniform_without_replacement;
  }
  if (name == "nonuniform") return SampleMode::nonuniform;
  if (name == "nonuniform_intrinsic" || name == "intrinsic") return SampleMode::nonuniform_intrinsic;
  fail(ErrorCode::configuration, "unknown sampling mode '" + name + "'");
}

namespace {

void check_common(double K, double epsilon, double delta) {
  std::ostringstream os;
  if (!(K > 0.0) || !std::isfinite(K)) {
    os << "Hessian bound must be positive, got " << K;
  } else if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    os << "sampling accuracy epsilon must be positive, got " << epsilon;
  } else if (!(delta > 0.0 && delta < 1.0)) {
    os << "failure probability delta must lie in (0,1), got " << delta;
  } else {
    return;
  }
  fail(ErrorCode::configuration, os.str());
}

std::size_t to_size(double bound) {
  const double c = std::ceil(bound);
  if (!(c < 1e15)) fail(ErrorCode::configuration, "sample size bound is too large to represent");
  return std::max<std::size_t>(1, static_cast<std::size_t>(c));
}

struct KahanSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double v) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

bool is_uniform(SampleMode mode) {
  return mode == SampleMode::uniform_with_replacement ||
         mode == SampleMode::uniform_without_replacement;
}

double sample_bound(const FiniteSumProblem& problem, const Vector& x, SampleMode mode,
                    double epsilon, double delta) {
  switch (mode) {
    case SampleMode::uniform_with_replacement:
    case SampleMode::uniform_without_replacement:
      return uniform_sample_bound(problem.K_max(), epsilon, delta, problem.dim());
    case SampleMode::nonuniform:
      return nonuniform_sample_bound(problem.K_hat(), epsilon, delta, problem.dim());
    case SampleMode::nonuniform_intrinsic:
      return intrinsic_sample_bound(problem.K_hat(), epsilon, delta, intrinsic_dimension(problem, x));
  }
  fail(ErrorCode::internal, "unhandled sampling mode");
}

}  // namespace

double prescribed_sample_bound(const FiniteSumProblem& problem, const Vector& x, SampleMode mode,
                               double epsilon, double delta) {
  return sample_bound(problem, x, mode, epsilon, delta);
}

double uniform_sample_bound(double K_max, double epsilon, double delta, Index d) {
  check_common(K_max, epsilon, delta);
  if (d < 1) fail(ErrorCode::configuration, "dimension must be positive");
  return 16.0 * K_max * K_max * std::log(2.0 * static_cast<double>(d) / delta) / (epsilon * epsilon);
}

double nonuniform_sample_bound(double K_hat, double epsilon, double delta, Index d) {
  check_common(K_hat, epsilon, delta);
  if (d < 1) fail(ErrorCode::configuration, "dimension must be positive");
  return 4.0 * K_hat * K_hat * std::log(2.0 * static_cast<double>(d) / delta) / (epsilon * epsilon);
}

double intrinsic_sample_bound(double K_hat, double epsilon, double delta, double t_intrinsic) {
  check_common(K_hat, epsilon, delta);
  if (epsilon > 0.5) fail(ErrorCode::configuration, "intrinsic-dimension sampling requires epsilon <= 1/2");
  if (!(t_intrinsic >= 1.0) || !std::isfinite(t_intrinsic)) {
    fail(ErrorCode::configuration, "intrinsic dimension must be >= 1");
  }
  return 16.0 / 3.0 * K_hat * K_hat * std::log(8.0 * t_intrinsic / delta) / (epsilon * epsilon);
}

std::size_t uniform_sample_size(double K_max, double epsilon, double delta, Index d) {
  return to_size(uniform_sample_bound(K_max, epsilon, delta, d));
}

std::size_t nonuniform_sample_size(double K_hat, double epsilon, double delta, Index d) {
  return to_size(nonuniform_sample_bound(K_hat, epsilon, delta, d));
}

std::size_t intrinsic_sample_size(double K_hat, double epsilon, double delta, double t_intrinsic) {
  return to_size(intrinsic_sample_bound(K_hat, epsilon, delta, t_intrinsic));
}

double per_iteration_delta(double delta_total, const OptimalityTolerances& tol, TheoremMode mode) {
  if (!(delta_total > 0.0 && delta_total < 1.0)) {
    fail(ErrorCode::configuration, "delta must lie in (0,1)");
  }
  const double g = tol.eps_g;
  const double h3 = tol.eps_H * tol.eps_H * tol.eps_H;
  switch (mode) {
    case TheoremMode::tr_optimal: return delta_total * std::min(g * g * tol.eps_H, h3);
    case TheoremMode::arc_standard: return delta_total * std::min(g * g, h3);
    case TheoremMode::arc_optimal: return delta_total * std::min(std::pow(g, 1.5), h3);
  }
  fail(ErrorCode::internal, "unhandled theorem mode");
}

Vector nonuniform_distribution(const FiniteSumProblem& problem, const Vector& x, bool* fell_back) {
  const Vector c = problem.curvatures(x);
  const Vector norms = problem.rows().rowwise().squaredNorm();
  const Index n = c.size();
  Vector p(n);
  KahanSum total;
  for (Index i = 0; i < n; ++i) {
    p[i] = std::abs(c[i]) * norms[i];
    total.add(p[i]);
  }
  if (fell_back) *fell_back = false;
  if (!(total.sum > 0.0)) {
    if (fell_back) *fell_back = true;
    return Vector::Constant(n, 1.0 / static_cast<double>(n));
  }
  p /= total.sum;
  KahanSum again;
  for (Index i = 0; i < n; ++i) again.add(p[i]);
  p /= again.sum;
  return p;
}

double intrinsic_dimension(const FiniteSumProblem& problem, const Vector& x) {
  const RowMatrix& A = problem.rows();
  const Vector w = problem.curvatures(x).cwiseAbs() / static_cast<double>(A.rows());
  Matrix M = A.transpose() * (w.asDiagonal() * A);
  M = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  if (!(top > 0.0)) return 1.0;
  const double t = M.trace() / top;
  return std::clamp(t, 1.0, static_cast<double>(problem.dim()));
}

SampleScheme resolve_scheme(const FiniteSumProblem& problem, const Vector& x, SampleMode mode,
                            double epsilon, double delta, bool cap_at_n) {
  SampleScheme s;
  s.mode = mode;
  s.epsilon = epsilon;
  s.delta = delta;
  s.cap_at_n = cap_at_n;
  const double bound = sample_bound(problem, x, mode, epsilon, delta);
  const auto n = static_cast<double>(problem.num_samples());
  if ((cap_at_n || mode == SampleMode::uniform_without_replacement) && bound > n) {
    s.resolved_size = problem.num_samples();
    s.capped = true;
  } else {
    s.resolved_size = to_size(bound);
  }
  return s;
}

SampleDraw draw_sample(const FiniteSumProblem& problem, const Vector& x,
                       const SampleScheme& scheme, std::uint64_t seed) {
  const std::size_t n = problem.num_samples();
  std::size_t m = scheme.resolved_size;
  if (m == 0) fail(ErrorCode::configuration, "sample scheme has no resolved size");
  if (scheme.cap_at_n) m = std::min(m, n);
  if (scheme.mode == SampleMode::uniform_without_replacement && m > n) {
    fail(ErrorCode::configuration, "cannot draw more than n samples without replacement");
  }

  std::mt19937_64 rng(seed);
  SampleDraw draw;
  draw.indices.reserve(m);
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);

  if (is_uniform(scheme.mode)) {
    if (scheme.mode == SampleMode::uniform_without_replacement) {
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      for (std::size_t k = 0; k < m; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, n - 1);
        std::swap(perm[k], perm[pick(rng)]);
      }
      draw.indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(m));
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (std::size_t k = 0; k < m; ++k) draw.indices.push_back(pick(rng));
    }
    std::sort(draw.indices.begin(), draw.indices.end());
    draw.weights.assign(m, 1.0 / md);
    draw.probabilities.assign(m, 1.0 / nd);
    draw.norm_bound = problem.K_max();
    return draw;
  }

  const Vector p = nonuniform_distribution(problem, x);
  std::vector<double> cdf(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += p[static_cast<Index>(i)];
    cdf[i] = acc;
  }
  std::uniform_real_distribution<double> unif(0.0, acc);
  for (std::size_t k = 0; k < m; ++k) {
    const double u = unif(rng);
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t j = it == cdf.end() ? n - 1 : static_cast<std::size_t>(it - cdf.begin());
    while (p[static_cast<Index>(j)] == 0.0 && j > 0) --j;  // never land on a zero-probability row
    draw.indices.push_back(j);
  }
  std::sort(draw.indices.begin(), draw.indices.end());
  draw.weights.reserve(m);
  draw.probabilities.reserve(m);
  for (std::size_t j : draw.indices) {
    const double pj = p[static_cast<Index>(j)];
    draw.probabilities.push_back(pj);
    draw.weights.push_back(1.0 / (nd * md * pj));
  }
  draw.norm_bound = problem.K_hat() + scheme.epsilon;
  return draw;
}

HessianOperator build_subsampled_hessian(const FiniteSumProblem& problem, const Vector& x,
                                         const SampleScheme& scheme, std::uint64_t seed) {
  SampleDraw draw = draw_sample(problem, x, scheme, seed);
  SampleRecord record{draw.indices, draw.probabilities};
  const std::size_t m = draw.indices.size();
  return problem.weighted_hessian(x, std::move(draw.indices), std::move(draw.weights), draw.norm_bound)
      .with_samples(std::move(record), m)
      .with_tolerance(scheme.epsilon);
}

ConcentrationReport verify_concentration(const FiniteSumProblem& problem, const Vector& x,
                                         const SampleScheme& scheme, int trials,
                                         std::uint64_t seed) {
  if (trials < 1) fail(ErrorCode::configuration, "need at least one trial");
  const Matrix exact = problem.dense_hessian(x);
  std::vector<double> errors(static_cast<std::size_t>(trials));
  detail::parallel_for(trials, [&](int k) {
    const SampleDraw draw = draw_sample(problem, x, scheme, derive_seed(seed, static_cast<std::uint64_t>(k)));
    const Matrix diff = problem.dense_weighted_hessian(x, draw.indices, draw.weights) - exact;
    Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
    errors[static_cast<std::size_t>(k)] = es.eigenvalues().cwiseAbs().maxCoeff();
  });
  ConcentrationReport r;
  r.trials = static_cast<std::size_t>(trials);
  double sum = 0.0;
  for (double e : errors) {
    if (e > scheme.epsilon) ++r.failures;
    r.max_error = std::max(r.max_error, e);
    sum += e;
  }
  r.mean_error = sum / trials;
  r.failure_rate = static_cast<double>(r.failures) / trials;
  return r;
}

HessianSource sampled_hessian_source(std::shared_ptr<const FiniteSumProblem> problem,
                                     const SampledSourceOptions& options) {
  if (!problem) fail(ErrorCode::invalid_input, "sampled source needs a problem");
  HessianSource source;
  source.exact = false;
  source.norm_bound = is_uniform(options.mode) ? problem->K_max() : problem->K_hat();
  source.bound_adds_epsilon = !is_uniform(options.mode);
  source.build = [problem, options](const HessianRequest& req) {
    const double eps = options.epsilon.value_or(req.epsilon);
    SampleScheme scheme;
    if (options.size) {
      scheme.mode = options.mode;
      scheme.epsilon = eps;
      scheme.delta = req.delta;
      scheme.cap_at_n = options.cap_at_n;
      scheme.resolved_size = *options.size;
    } else {
      scheme = resolve_scheme(*problem, req.x, options.mode, eps, req.delta, options.cap_at_n);
    }
    return build_subsampled_hessian(*problem, req.x, scheme, req.seed);
  };
  return source;
}

}  // namespace inewton
