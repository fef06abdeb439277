#include "inewton/cubic_reg.hpp"

#include "inewton/curvature.hpp"
#include "inewton/sampling.hpp"
#include "inewton/subproblem.hpp"
#include "solver_common.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace inewton {

const char* to_string(ArcMode mode) {
  return mode == ArcMode::optimal ? "optimal" : "standard";
}

void ARCConfig::validate() const {
  std::ostringstream os;
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) {
    os << "sigma0 must be positive and finite";
  } else if (!(eta > 0.0 && eta < 1.0)) {
    os << "eta must lie in (0,1)";
  } else if (!(gamma > 1.0) || !std::isfinite(gamma)) {
    os << "gamma must exceed 1";
  } else if (!(nu > 0.0 && nu <= 1.0)) {
    os << "nu must lie in (0,1]";
  } else if (mode == ArcMode::optimal && !(zeta > 0.0 && zeta < 0.5)) {
    os << "zeta must lie in (0,1/2)";
  } else if (L_estimate && !(*L_estimate > 0.0 && std::isfinite(*L_estimate))) {
    os << "L_estimate must be positive";
  } else if (max_iters < 0) {
    os << "max_iters must be nonnegative";
  } else if (!(sigma_min >= 0.0) || sigma_min > sigma0) {
    os << "sigma_min must lie in [0, sigma0]";
  } else if (!(delta_total > 0.0 && delta_total < 1.0)) {
    os << "delta must lie in (0,1)";
  } else if (max_subspace_dim < 1) {
    os << "max_subspace_dim must be positive";
  } else {
    tol.validate(false);
    return;
  }
  fail(ErrorCode::configuration, os.str());
}

double arc_epsilon(const ARCConfig& config, double K_H) {
  if (!config.L_estimate) fail(ErrorCode::configuration, "arc_epsilon needs L_estimate");
  if (!(K_H >= 0.0)) fail(ErrorCode::invalid_input, "K_H must be nonnegative");
  const double L = *config.L_estimate;
  const double first = std::min(1.0 / 12.0, (1.0 - config.eta) / 6.0) *
                       (std::sqrt(K_H * K_H + 8.0 * L * config.tol.eps_g) - K_H);
  const double second = std::min(1.0 / 6.0, (1.0 - config.eta) / 3.0) * config.nu * config.tol.eps_H;
  double eps = std::min(first, second);
  if (config.mode == ArcMode::optimal) eps = std::min(eps, config.zeta * config.tol.eps_g);
  return eps;
}

namespace {

double spectral_norm_estimate(const std::function<Vector(const Vector&)>& apply, Index d,
                              std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(d);
  for (Index i = 0; i < d; ++i) v[i] = normal(rng);
  v /= v.norm();
  double est = 0.0;
  for (int it = 0; it < 60; ++it) {
    Vector w = apply(apply(v));  // symmetric: power iteration on the square
    const double wn = w.norm();
    if (!(wn > 0.0)) return 0.0;
    const double next = std::sqrt(wn);
    v = w / wn;
    if (std::abs(next - est) <= 1e-10 * next) {
      est = next;
      break;
    }
    est = next;
  }
  return est;
}

}  // namespace

double estimate_hessian_lipschitz(const Objective& objective, const Vector& x0, int segments,
                                  double radius, std::uint64_t seed) {
  if (segments < 1 || !(radius > 0.0)) {
    fail(ErrorCode::configuration, "Lipschitz estimation needs segments >= 1 and radius > 0");
  }
  const Index d = objective.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const HessianOperator H0 = objective.hessian(x0);
  double L = 0.0;
  for (int k = 0; k < segments; ++k) {
    Vector dir(d);
    for (Index i = 0; i < d; ++i) dir[i] = normal(rng);
    const Vector y = x0 + radius * dir / dir.norm();
    const HessianOperator H1 = objective.hessian(y);
    const double norm = spectral_norm_estimate(
        [&](const Vector& v) -> Vector { return H1.apply(v) - H0.apply(v); }, d, rng);
    L = std::max(L, norm / radius);
  }
  // A flat Hessian gives L = 0; keep the constant positive for the epsilon formula.
  return std::max(L, 1e-12);
}

SolveResult run_arc(const Objective& objective, const HessianSource& source, const Vector& x0,
                    const ARCConfig& config_in, std::uint64_t seed) {
  config_in.validate();
  if (!source.build) fail(ErrorCode::configuration, "Hessian source is empty");
  if (x0.size() != objective.dim()) fail(ErrorCode::invalid_input, "x0 has the wrong dimension");

  ARCConfig config = config_in;
  if (!config.L_estimate) {
    config.L_estimate = estimate_hessian_lipschitz(objective, x0, 8, 1.0, derive_seed(seed, 0x11));
  }
  const TheoremMode theorem =
      config.mode == ArcMode::optimal ? TheoremMode::arc_optimal : TheoremMode::arc_standard;
  const double delta_iter = per_iteration_delta(config.delta_total, config.tol, theorem);

  SolveResult res;
  Vector x = x0;
  auto [F, g] = objective.value_gradient(x);
  if (!std::isfinite(F) || !all_finite(g)) {
    res.x = x;
    res.F_value = F;
    res.status = SolveStatus::numerical_failure;
    res.diagnostic = detail::describe_nonfinite(0, "objective at x0");
    return res;
  }

  // Fixed accuracy for the whole run. When the operator bound grows with the
  // accuracy (K_hat + eps), one more evaluation at the enlarged bound keeps
  // the bound valid because the formula is non-increasing in K_H.
  double K_H = source.norm_bound > 0.0 ? source.norm_bound : objective.hessian(x).norm_bound();
  double eps = arc_epsilon(config, K_H);
  if (source.bound_adds_epsilon) eps = arc_epsilon(config, K_H + eps);
  res.final_epsilon = eps;

  const int max_dim = static_cast<int>(std::min<Index>(objective.dim(), config.max_subspace_dim));
  ArcStepOptions step_options;
  step_options.progressive = config.mode == ArcMode::optimal;
  step_options.zeta = config.zeta;
  step_options.max_dim = max_dim;

  double sigma = config.sigma0;
  std::optional<HessianOperator> H_prev;

  for (std::size_t t = 0;; ++t) {
    HessianOperator H = [&] {
      if (config.reuse_hessian && H_prev) return *H_prev;
      HessianOperator fresh = source.build({x, eps, delta_iter, derive_seed(seed, t, 1)});
      res.hessian_cost += fresh.sample_size();
      return fresh;
    }();

    const CurvatureProbe probe =
        make_lanczos_probe(config.nu, delta_iter, derive_seed(seed, t, 2), config.lanczos_max_matvecs);
    const detail::CurvatureDecision cd = detail::examine_curvature(H, g, config.tol, probe);
    IterationRecord rec = detail::base_record(t, F, g, cd.lambda_estimate, sigma, H, eps);

    const bool out_of_budget = t >= static_cast<std::size_t>(config.max_iters);
    if (cd.optimal || cd.stalled || out_of_budget) {
      rec.terminal = true;
      res.trace.push_back(rec);
      res.status = cd.optimal ? SolveStatus::converged
                   : cd.stalled ? SolveStatus::stalled
                                : SolveStatus::max_iterations;
      break;
    }

    SubproblemSolution sol;
    double rho = 0.0;
    try {
      sol = solve_arc_step(CubicModel{g, H, sigma}, cd.direction, step_options);
      const double F_new = objective.value(x + sol.step);
      if (!std::isfinite(F_new) || !all_finite(sol.step)) {
        res.trace.push_back(rec);
        res.status = SolveStatus::numerical_failure;
        res.diagnostic = detail::describe_nonfinite(t, "trial value");
        break;
      }
      rho = acceptance_ratio(F, F_new, -sol.model_value);
    } catch (const Error& e) {
      res.trace.push_back(rec);
      res.status = SolveStatus::numerical_failure;
      res.diagnostic = e.what();
      break;
    }

    rec.rho = rho;
    rec.accepted = rho >= config.eta;
    rec.step_norm = sol.step.norm();
    rec.model_decrease = -sol.model_value;
    rec.model_grad_norm = sol.model_grad_norm;
    rec.cond5_met = sol.certificates.cond5.met;
    res.trace.push_back(rec);
    if (config.record_path) {
      res.iterates.push_back(x);
      res.steps.push_back(sol.step);
    }

    if (rec.accepted) {
      x += sol.step;
      std::tie(F, g) = objective.value_gradient(x);
      if (!std::isfinite(F) || !all_finite(g)) {
        res.status = SolveStatus::numerical_failure;
        res.diagnostic = detail::describe_nonfinite(t + 1, "gradient");
        break;
      }
      sigma = std::max(sigma / config.gamma, config.sigma_min);
      ++res.successes;
      H_prev.reset();
    } else {
      sigma *= config.gamma;
      ++res.failures;
      H_prev = H;
    }
  }
  res.x = x;
  res.F_value = F;
  return res;
}

double arc_sigma_ceiling(double sigma0, double gamma, double L) {
  return std::max(sigma0, 2.0 * gamma * L);
}

double arc_kappa_g(double zeta, double gamma, double L, double epsilon, double K) {
  const double k1 = std::max(1.0, K);
  return 2.0 * (1.0 - 2.0 * zeta) /
         ((1.0 + 4.0 * gamma) * L + 2.0 * std::max(epsilon + zeta * k1, 2.0 * zeta * k1));
}

TraceCheck check_sigma_identity(const std::vector<IterationRecord>& trace, double sigma0,
                                double gamma, double sigma_min) {
  return check_multiplicative_identity(trace, sigma0, gamma, false, sigma_min);
}

}  // namespace inewton
