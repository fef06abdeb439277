#pragma once

// Trust-region Newton iteration with an inexact Hessian whose accuracy
// follows the radius: eps_t = max(eps_0, Delta_t), eps_0 = alpha (1-eta) nu eps_H.

#include "inewton/core.hpp"

namespace inewton {

struct TRConfig {
  double delta0 = 1.0;
  double eta = 0.2;
  double gamma = 2.0;
  double alpha = 0.5;
  double nu = 0.9;
  OptimalityTolerances tol;
  int max_iters = 1000;
  /// Enforce eps_H <= sqrt(eps_g).
  bool theory_strict = false;
  /// Overall failure probability, split across iterations.
  double delta_total = 0.1;
  /// Reuse H_t after a rejected step when its tolerance still suffices.
  bool reuse_hessian = true;
  /// Lanczos matrix-vector cap; 0 selects the automatic budget.
  int lanczos_max_matvecs = 0;
  /// Keep iterates and trial steps in the result.
  bool record_path = false;

  void validate() const;
};

double tr_tolerance(const TRConfig& config, double delta_t);

SolveResult run_tr(const Objective& objective, const HessianSource& source, const Vector& x0,
                   const TRConfig& config, std::uint64_t seed);

struct RadiusFloor {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
  double kappa4 = 0.0;
  double kappa_delta = 0.0;
  /// kappa_delta min{eps_g, eps_H}
  double floor = 0.0;
};

/// Lower bound on every radius for a problem whose Hessian is L-Lipschitz
/// and whose operators are bounded by K_H.
RadiusFloor tr_radius_floor(const TRConfig& config, double L, double K_H);

/// Delta_{t+1} = gamma Delta_t or Delta_t / gamma replayed exactly, and
/// Delta_t = Delta_0 gamma^(succ - fail) to 1e-12 relative.
TraceCheck check_radius_identity(const std::vector<IterationRecord>& trace, double delta0,
                                 double gamma);

}  // namespace inewton
