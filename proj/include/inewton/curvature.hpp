#pragma once

// Extreme-eigenpair estimation for negative-curvature directions.
//
// Lanczos (with full reorthogonalization) runs on the positive semidefinite
// shift K_H I - H, whose dominant eigenvector is the bottom eigenvector of H.
// A top Ritz pair theta of the shifted operator gives a unit u with
// <u, H u> = K_H - theta, so every Ritz vector doubles as a curvature
// certificate that can be checked without knowing lambda_min(H).

#include "inewton/core.hpp"

#include <cstdint>
#include <optional>

namespace inewton {

struct CurvatureResult {
  Vector direction;  // unit norm
  double rayleigh = 0.0;
  int iterations_used = 0;
  bool converged = false;
};

/// ceil(log(d/delta) * sqrt(K_H/kappa)), at least 1: the matrix-vector budget
/// that yields kappa-relative accuracy with probability 1 - delta.
int lanczos_budget(Index d, double norm_bound, double kappa, double delta);

/// Top Ritz pair of K_H I - H from a Gaussian start. `max_matvecs <= 0`
/// selects min(d, max(lanczos_budget, 100)). Convergence means the Ritz
/// residual dropped below 1e-8 K_H (or the Krylov space became invariant).
CurvatureResult lanczos_extreme(const HessianOperator& H, double kappa, double delta,
                                int max_matvecs, std::uint64_t seed);

/// Smallest nu admitted for a given norm bound: 2 K_H / (2 K_H + eps_H).
double min_valid_nu(double norm_bound, double eps_H);

/// Searches for u with <u,Hu> <= -nu eps_H ||u||^2 using kappa = nu/2.
/// Returns nothing if the best Rayleigh quotient stays above -nu eps_H.
/// Throws a configuration error when nu is outside (0,1] or below
/// min_valid_nu(K_H, eps_H).
std::optional<CurvatureResult> negative_curvature_direction(const HessianOperator& H,
                                                            double eps_H, double nu,
                                                            double delta,
                                                            std::uint64_t seed,
                                                            int max_matvecs = 0);

/// Probe used by the drivers: nu_t = max(nu_floor, min_valid_nu(K_H, eps_H)).
CurvatureProbe make_lanczos_probe(double nu_floor, double delta, std::uint64_t seed,
                                  int max_matvecs = 0);

}  // namespace inewton
