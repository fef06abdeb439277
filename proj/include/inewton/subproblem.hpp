#pragma once

// Trust-region and cubic-regularization sub-problem solvers. Every solver
// returns a SubproblemSolution whose certificates can be re-derived from the
// step and the model alone (see check_certificates).

#include "inewton/core.hpp"

#include <optional>
#include <vector>

namespace inewton {

/// m(s) = <g, s> + 1/2 <s, H s>, ||s|| <= radius.
struct TRModel {
  Vector grad;
  HessianOperator H;
  double radius;

  double value(const Vector& s) const;
};

/// m(s) = <g, s> + 1/2 <s, H s> + sigma/3 ||s||^3.
struct CubicModel {
  Vector grad;
  HessianOperator H;
  double sigma;

  double value(const Vector& s) const;
  Vector gradient(const Vector& s) const;
};

/// One inequality of a descent condition: met iff lhs >= rhs up to the
/// certificate slack allowance. `slack` = lhs - rhs.
struct Certificate {
  bool checked = false;
  bool met = false;
  double slack = 0.0;
};

/// Relative slack allowance used when deciding `met`.
inline constexpr double kCertificateSlack = 1e-9;

struct Certificates {
  Certificate cauchy;
  Certificate eigen;
  Certificate cond5;
};

struct SubproblemSolution {
  Vector step;
  double model_value = 0.0;
  double model_grad_norm = 0.0;  // cubic models only
  Certificates certificates;
  /// Unit negative-curvature direction the eigen certificate refers to.
  std::optional<Vector> eigen_direction;
  /// Realized curvature -<u,Hu> of eigen_direction.
  std::optional<double> eigen_curvature;
  /// Condition-5 parameter; the cond5 certificate is checked iff zeta > 0.
  double zeta = 0.0;
  /// Dimension of the subspace the step was computed in.
  int subspace_dim = 1;
};

// ---- trust region --------------------------------------------------------

/// Lower bound 1/2 ||g|| min{||g||/(1 + K_H), radius} on Cauchy decrease.
double tr_cauchy_bound(const TRModel& model);

SubproblemSolution tr_cauchy_point(const TRModel& model);

/// s = +-radius u/||u|| with <g, s> <= 0. Requires <u,Hu> < 0.
SubproblemSolution tr_eigen_point(const TRModel& model, const Vector& u, double nu);

/// Exact minimization over span(basis) intersected with the ball.
SubproblemSolution tr_subspace_solve(const TRModel& model, const std::vector<Vector>& basis);

// ---- cubic regularization -------------------------------------------------

/// Both lower bounds on Cauchy decrease; `cauchy_norm` is ||s^C||.
double arc_cauchy_bound(const CubicModel& model, double cauchy_norm);

SubproblemSolution arc_cauchy_point(const CubicModel& model);

/// Global minimizer of m(alpha u) over alpha in R. Requires <u,Hu> < 0.
SubproblemSolution arc_eigen_point(const CubicModel& model, const Vector& u, double nu);

/// Exact global minimization of the cubic model over span(basis).
SubproblemSolution arc_subspace_solve(const CubicModel& model,
                                      const std::vector<Vector>& basis);

struct ProgressiveSeeds {
  Vector cauchy;
  std::optional<Vector> eigen;
};

/// Grows a Krylov space {g, Hg, H^2 g, ...} augmented with the seed
/// directions until ||grad m(s)|| <= zeta max{||s||^2, min(1,||s||) ||g||}
/// or `max_dim` is reached (cond5_met = false in that case).
SubproblemSolution arc_progressive_solve(const CubicModel& model, const ProgressiveSeeds& seeds,
                                         double zeta, int max_dim);

/// Right-hand side of the Condition-5 stopping rule for step s.
double cond5_bound(const CubicModel& model, const Vector& s, double zeta);

// ---- full steps used by the drivers -----------------------------------------

/// Cauchy seed, optional eigen seed and H g, solved exactly on their span;
/// the result never has a higher model value than either seed.
SubproblemSolution solve_tr_step(const TRModel& model,
                                 const std::optional<Vector>& eigen_direction);

struct ArcStepOptions {
  bool progressive = false;
  double zeta = 0.25;
  int max_dim = 50;
};

SubproblemSolution solve_arc_step(const CubicModel& model,
                                  const std::optional<Vector>& eigen_direction,
                                  const ArcStepOptions& options);

// ---- certificate checking --------------------------------------------------

struct CertificateCheck {
  bool consistent = true;  // recomputed flags agree with the stored ones
  Certificates recomputed;
};

/// Recomputes every certificate that `sol` marks as checked, from the model,
/// the step, the eigen direction and zeta only.
CertificateCheck check_certificates(const TRModel& model, const SubproblemSolution& sol);
CertificateCheck check_certificates(const CubicModel& model, const SubproblemSolution& sol);

// ---- reduced problems --------------------------------------------------------

/// Exact solution of min <g,v> + 1/2 <v,Bv> s.t. ||v|| <= radius for a small
/// dense symmetric B (eigendecomposition plus secular equation, with the
/// hard case).
Vector solve_dense_trust_region(const Matrix& B, const Vector& g, double radius);

/// Exact global minimizer of <g,v> + 1/2 <v,Bv> + sigma/3 ||v||^3 for a small
/// dense symmetric B.
Vector solve_dense_cubic(const Matrix& B, const Vector& g, double sigma);

}  // namespace inewton
