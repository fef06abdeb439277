#pragma once

// Pieces shared by the trust-region and cubic-regularization drivers.

#include "inewton/core.hpp"
#include "inewton/curvature.hpp"

#include <cmath>
#include <optional>
#include <sstream>

namespace inewton::detail {

struct CurvatureDecision {
  bool optimal = false;
  /// Zero gradient and nothing to follow.
  bool stalled = false;
  std::optional<Vector> direction;
  double lambda_estimate = 0.0;
};

inline CurvatureDecision examine_curvature(const HessianOperator& H, const Vector& g,
                                           const OptimalityTolerances& tol,
                                           const CurvatureProbe& probe) {
  CurvatureDecision out;
  const bool first = check_first_order(g, tol);
  const SecondOrderCheck second = check_second_order(H, tol, probe);
  out.lambda_estimate = second.probe.rayleigh;
  out.direction = second.probe.direction;
  out.optimal = first && second.optimal;
  if (out.optimal) return out;
  if (!out.direction && g.norm() == 0.0) {
    // Inconclusive probe at a stationary point: follow the best Ritz vector
    // if it has any negative curvature at all.
    if (second.probe.best_vector && second.probe.rayleigh < 0.0) {
      out.direction = second.probe.best_vector;
    } else {
      out.stalled = true;
    }
  }
  return out;
}

inline IterationRecord base_record(std::size_t t, double F, const Vector& g, double lambda_est,
                                   double radius_or_sigma, const HessianOperator& H, double eps_t) {
  IterationRecord r;
  r.t = t;
  r.F_value = F;
  r.grad_norm = g.norm();
  r.lambda_min_estimate = lambda_est;
  r.radius_or_sigma = radius_or_sigma;
  r.rho = std::nan("");
  r.sample_size = H.sample_size();
  r.eps_t = eps_t;
  return r;
}

inline bool finite_scalar(double v) { return std::isfinite(v); }

inline std::string describe_nonfinite(std::size_t t, const char* what) {
  std::ostringstream os;
  os << "non-finite " << what << " at iteration " << t;
  return os.str();
}

}  // namespace inewton::detail
