#include "inewton/trust_region.hpp"

#include "inewton/curvature.hpp"
#include "inewton/sampling.hpp"
#include "inewton/subproblem.hpp"
#include "solver_common.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace inewton {

void TRConfig::validate() const {
  std::ostringstream os;
  if (!(delta0 > 0.0) || !std::isfinite(delta0)) {
    os << "delta0 must be positive and finite";
  } else if (!(eta > 0.0 && eta < 1.0)) {
    os << "eta must lie in (0,1)";
  } else if (!(gamma > 1.0) || !std::isfinite(gamma)) {
    os << "gamma must exceed 1";
  } else if (!(alpha > 0.0 && alpha < 1.0)) {
    os << "alpha must lie in (0,1)";
  } else if (!(nu > 0.0 && nu <= 1.0)) {
    os << "nu must lie in (0,1]";
  } else if (max_iters < 0) {
    os << "max_iters must be nonnegative";
  } else if (!(delta_total > 0.0 && delta_total < 1.0)) {
    os << "delta must lie in (0,1)";
  } else {
    tol.validate(theory_strict);
    return;
  }
  fail(ErrorCode::configuration, os.str());
}

double tr_tolerance(const TRConfig& config, double delta_t) {
  const double eps0 = config.alpha * (1.0 - config.eta) * config.nu * config.tol.eps_H;
  return std::max(eps0, delta_t);
}

SolveResult run_tr(const Objective& objective, const HessianSource& source, const Vector& x0,
                   const TRConfig& config, std::uint64_t seed) {
  config.validate();
  if (!source.build) fail(ErrorCode::configuration, "Hessian source is empty");
  if (x0.size() != objective.dim()) fail(ErrorCode::invalid_input, "x0 has the wrong dimension");

  const double delta_iter = per_iteration_delta(config.delta_total, config.tol, TheoremMode::tr_optimal);
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
  double radius = config.delta0;
  std::optional<HessianOperator> H_prev;

  for (std::size_t t = 0;; ++t) {
    const double eps_t = tr_tolerance(config, radius);
    HessianOperator H = [&] {
      if (config.reuse_hessian && H_prev && H_prev->tolerance() <= eps_t) return *H_prev;
      HessianOperator fresh = source.build({x, eps_t, delta_iter, derive_seed(seed, t, 1)});
      res.hessian_cost += fresh.sample_size();
      return fresh;
    }();
    res.final_epsilon = eps_t;

    const CurvatureProbe probe =
        make_lanczos_probe(config.nu, delta_iter, derive_seed(seed, t, 2), config.lanczos_max_matvecs);
    const detail::CurvatureDecision cd = detail::examine_curvature(H, g, config.tol, probe);
    IterationRecord rec = detail::base_record(t, F, g, cd.lambda_estimate, radius, H, eps_t);

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
    double F_new = 0.0;
    try {
      sol = solve_tr_step(TRModel{g, H, radius}, cd.direction);
      const Vector x_new = x + sol.step;
      F_new = objective.value(x_new);
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
      radius *= config.gamma;
      ++res.successes;
      H_prev.reset();
    } else {
      radius /= config.gamma;
      ++res.failures;
      H_prev = H;
    }
  }
  res.x = x;
  res.F_value = F;
  return res;
}

RadiusFloor tr_radius_floor(const TRConfig& config, double L, double K_H) {
  if (!(L > 0.0)) fail(ErrorCode::invalid_input, "Lipschitz constant must be positive");
  RadiusFloor r;
  const double a = config.alpha * (1.0 - config.eta) * config.nu;
  r.kappa1 = (1.0 - config.alpha) * (1.0 - config.eta) * config.nu / (L + 1.0);
  r.kappa2 = a;
  r.kappa3 = 1.0 / (1.0 + K_H);
  r.kappa4 = (std::sqrt(a * a + 4.0 * L * (1.0 - config.eta)) - a) / (2.0 * L);
  r.kappa_delta = std::min({r.kappa1, r.kappa2, r.kappa3, r.kappa4}) / config.gamma;
  r.floor = r.kappa_delta * std::min(config.tol.eps_g, config.tol.eps_H);
  return r;
}

TraceCheck check_radius_identity(const std::vector<IterationRecord>& trace, double delta0,
                                 double gamma) {
  return check_multiplicative_identity(trace, delta0, gamma, true, 0.0);
}

}  // namespace inewton
