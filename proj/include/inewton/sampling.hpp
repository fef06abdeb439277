#pragma once

// Sub-sampled Hessians for finite-sum problems and the sample sizes that make
// ||H - grad^2 F|| <= eps hold with probability 1 - delta.

#include "inewton/core.hpp"
#include "inewton/problems.hpp"

#include <optional>
#include <string>

namespace inewton {

enum class SampleMode {
  uniform_with_replacement,
  uniform_without_replacement,
  nonuniform,
  nonuniform_intrinsic,
};

const char* to_string(SampleMode mode);
SampleMode parse_sample_mode(const std::string& name);

struct SampleScheme {
  SampleMode mode = SampleMode::uniform_without_replacement;
  double epsilon = 0.1;
  double delta = 0.1;
  std::size_t resolved_size = 0;
  bool cap_at_n = true;
  /// Set when resolved_size was reduced to n.
  bool capped = false;
};

// Unrounded bounds; the *_sample_size functions return their ceiling.
double uniform_sample_bound(double K_max, double epsilon, double delta, Index d);
double nonuniform_sample_bound(double K_hat, double epsilon, double delta, Index d);
double intrinsic_sample_bound(double K_hat, double epsilon, double delta, double t_intrinsic);

/// Unrounded bound matching `mode` at x (K_max, K_hat or the intrinsic form).
double prescribed_sample_bound(const FiniteSumProblem& problem, const Vector& x, SampleMode mode,
                               double epsilon, double delta);

/// ceil(16 K_max^2 log(2d/delta) / eps^2).
std::size_t uniform_sample_size(double K_max, double epsilon, double delta, Index d);
/// ceil(4 K_hat^2 log(2d/delta) / eps^2).
std::size_t nonuniform_sample_size(double K_hat, double epsilon, double delta, Index d);
/// ceil(16/3 K_hat^2 log(8t/delta) / eps^2); requires eps <= 1/2.
std::size_t intrinsic_sample_size(double K_hat, double epsilon, double delta, double t_intrinsic);

enum class TheoremMode { tr_optimal, arc_standard, arc_optimal };

/// delta min{eps_g^2 eps_H, eps_H^3}, delta min{eps_g^2, eps_H^3} or
/// delta min{eps_g^(3/2), eps_H^3}.
double per_iteration_delta(double delta_total, const OptimalityTolerances& tol, TheoremMode mode);

/// p_i proportional to |f''(a_i'x)| ||a_i||^2, summing to one. Falls back to
/// the uniform distribution (and sets *fell_back) when every weight is zero.
Vector nonuniform_distribution(const FiniteSumProblem& problem, const Vector& x,
                               bool* fell_back = nullptr);

/// tr(M)/||M|| for M = A'|B|A; 1 for the zero matrix.
double intrinsic_dimension(const FiniteSumProblem& problem, const Vector& x);

/// Fills resolved_size from the bound matching `mode`, capped at n when
/// requested. Without-replacement sampling is always capped.
SampleScheme resolve_scheme(const FiniteSumProblem& problem, const Vector& x, SampleMode mode,
                            double epsilon, double delta, bool cap_at_n = true);

struct SampleDraw {
  std::vector<std::size_t> indices;    // sorted
  std::vector<double> weights;         // 1/(n |S| p_j)
  std::vector<double> probabilities;   // p_j of each draw
  double norm_bound = 0.0;
};

SampleDraw draw_sample(const FiniteSumProblem& problem, const Vector& x,
                       const SampleScheme& scheme, std::uint64_t seed);

/// (1/(n|S|)) sum_{j in S} f_j''(a_j'x) a_j a_j' / p_j. Norm bound K_max for
/// uniform schemes and K_hat + eps for non-uniform ones.
HessianOperator build_subsampled_hessian(const FiniteSumProblem& problem, const Vector& x,
                                         const SampleScheme& scheme, std::uint64_t seed);

struct ConcentrationReport {
  std::size_t trials = 0;
  std::size_t failures = 0;
  double failure_rate = 0.0;
  double max_error = 0.0;
  double mean_error = 0.0;
};

/// Empirical Pr(||H - grad^2 F(x)|| > eps) over independent draws, with dense
/// spectral norms. Trials run on worker threads; the result depends only on
/// the seed.
ConcentrationReport verify_concentration(const FiniteSumProblem& problem, const Vector& x,
                                         const SampleScheme& scheme, int trials,
                                         std::uint64_t seed);

struct SampledSourceOptions {
  SampleMode mode = SampleMode::uniform_without_replacement;
  bool cap_at_n = true;
  /// Fixed accuracy used for the sample size instead of the requested one.
  std::optional<double> epsilon;
  /// Fixed |S|, bypassing the bounds.
  std::optional<std::size_t> size;
};

HessianSource sampled_hessian_source(std::shared_ptr<const FiniteSumProblem> problem,
                                     const SampledSourceOptions& options);

}  // namespace inewton
