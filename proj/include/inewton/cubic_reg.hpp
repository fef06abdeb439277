#pragma once

// Adaptive cubic regularization with an inexact Hessian held to a fixed,
// a-priori accuracy for the whole run.

#include "inewton/core.hpp"

#include <optional>

namespace inewton {

enum class ArcMode { standard, optimal };

const char* to_string(ArcMode mode);

struct ARCConfig {
  double sigma0 = 1.0;
  double eta = 0.2;
  double gamma = 2.0;
  double nu = 0.9;
  /// Condition-5 parameter, in (0, 1/2); used in optimal mode.
  double zeta = 0.25;
  /// Hessian Lipschitz estimate; estimated at x0 when absent.
  std::optional<double> L_estimate;
  OptimalityTolerances tol;
  ArcMode mode = ArcMode::standard;
  int max_iters = 1000;
  /// Lower guard on sigma after successful steps.
  double sigma_min = 1e-12;
  double delta_total = 0.1;
  bool reuse_hessian = true;
  int lanczos_max_matvecs = 0;
  /// Largest Krylov dimension of the progressive solve (capped at d).
  int max_subspace_dim = 50;
  bool record_path = false;

  void validate() const;
};

/// min{ min{1/12,(1-eta)/6} (sqrt(K_H^2 + 8 L eps_g) - K_H), min{1/6,(1-eta)/3} nu eps_H },
/// further capped by zeta eps_g in optimal mode. Requires config.L_estimate.
double arc_epsilon(const ARCConfig& config, double K_H);

/// max ||H(y) - H(x0)|| / ||y - x0|| over `segments` random points y with
/// ||y - x0|| = radius (spectral norms by power iteration).
double estimate_hessian_lipschitz(const Objective& objective, const Vector& x0, int segments,
                                  double radius, std::uint64_t seed);

SolveResult run_arc(const Objective& objective, const HessianSource& source, const Vector& x0,
                    const ARCConfig& config, std::uint64_t seed);

/// max{sigma0, 2 gamma L}.
double arc_sigma_ceiling(double sigma0, double gamma, double L);

/// Step-norm constant of the optimal variant:
/// 2(1-2 zeta) / ((1+4 gamma) L + 2 max{eps + zeta max{1,K}, 2 zeta max{1,K}}).
double arc_kappa_g(double zeta, double gamma, double L, double epsilon, double K);

/// sigma_{t+1} = max(sigma_t / gamma, sigma_min) or gamma sigma_t replayed
/// exactly, and sigma_t = sigma_0 gamma^(fail - succ) while the guard is idle.
TraceCheck check_sigma_identity(const std::vector<IterationRecord>& trace, double sigma0,
                                double gamma, double sigma_min);

}  // namespace inewton
