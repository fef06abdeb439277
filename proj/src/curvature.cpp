#include "inewton/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace inewton {

namespace {

// Lanczos on K I - H. When `stop_at` is set, iteration also ends as soon as
// the current Ritz vector has H-Rayleigh quotient <= *stop_at.
CurvatureResult run_lanczos(const HessianOperator& H, int budget, std::uint64_t seed,
                            std::optional<double> stop_at) {
  const Index d = H.dim();
  const double K = H.norm_bound();
  budget = std::clamp<int>(budget, 1, static_cast<int>(d));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector q(d);
  for (Index i = 0; i < d; ++i) q[i] = normal(rng);
  q /= q.norm();

  Matrix Q(d, budget);
  std::vector<double> alpha, beta;
  alpha.reserve(budget);
  beta.reserve(budget);
  const double scale = std::max(K, std::numeric_limits<double>::min());
  const double residual_tol = 1e-8 * scale;
  const double breakdown_tol = 1e-14 * scale;

  CurvatureResult out;
  Vector y_top;
  int k = 0;
  bool converged = false;
  double theta = 0.0;
  for (; k < budget; ++k) {
    Q.col(k) = q;
    Vector w = K * q - H.apply(q);
    const double a = q.dot(w);
    alpha.push_back(a);
    // Full reorthogonalization, twice.
    for (int pass = 0; pass < 2; ++pass) {
      const Vector c = Q.leftCols(k + 1).transpose() * w;
      w.noalias() -= Q.leftCols(k + 1) * c;
    }
    const double b = w.norm();

    const int m = k + 1;
    Vector diag = Eigen::Map<const Vector>(alpha.data(), m);
    Vector sub(std::max(m - 1, 1));
    for (int i = 0; i + 1 < m; ++i) sub[i] = beta[i];
    Eigen::SelfAdjointEigenSolver<Matrix> es;
    es.computeFromTridiagonal(diag, sub.head(m - 1), Eigen::ComputeEigenvectors);
    theta = es.eigenvalues()[m - 1];
    y_top = es.eigenvectors().col(m - 1);
    const double residual = b * std::abs(y_top[m - 1]);

    if (residual <= residual_tol || b <= breakdown_tol) {
      converged = true;
      ++k;
      break;
    }
    if (stop_at && K - theta <= *stop_at) {
      ++k;
      break;
    }
    beta.push_back(b);
    q = w / b;
  }
  if (k >= d) converged = true;  // Krylov space is all of R^d

  Vector u = Q.leftCols(k) * y_top.head(k);
  u /= u.norm();
  out.direction = std::move(u);
  out.rayleigh = out.direction.dot(H.apply(out.direction));
  out.iterations_used = k;
  out.converged = converged;
  return out;
}

int auto_budget(Index d, double K, double kappa, double delta) {
  const int b = std::max(lanczos_budget(d, K, kappa, delta), 100);
  return static_cast<int>(std::min<Index>(d, b));
}

void check_unit_interval(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) {
    std::ostringstream os;
    os << name << " must lie in (0,1), got " << v;
    fail(ErrorCode::configuration, os.str());
  }
}

}  // namespace

int lanczos_budget(Index d, double norm_bound, double kappa, double delta) {
  check_unit_interval(kappa, "kappa");
  check_unit_interval(delta, "delta");
  const double logs = std::log(static_cast<double>(d) / delta);
  const double b = std::ceil(std::max(logs, 1.0) * std::sqrt(std::max(norm_bound, 0.0) / kappa));
  if (!std::isfinite(b) || b > 1e9) return 1000000000;
  return std::max(1, static_cast<int>(b));
}

CurvatureResult lanczos_extreme(const HessianOperator& H, double kappa, double delta,
                                int max_matvecs, std::uint64_t seed) {
  check_unit_interval(kappa, "kappa");
  check_unit_interval(delta, "delta");
  const int budget =
      max_matvecs > 0 ? max_matvecs : auto_budget(H.dim(), H.norm_bound(), kappa, delta);
  return run_lanczos(H, budget, seed, std::nullopt);
}

double min_valid_nu(double norm_bound, double eps_H) {
  return 2.0 * norm_bound / (2.0 * norm_bound + eps_H);
}

std::optional<CurvatureResult> negative_curvature_direction(const HessianOperator& H,
                                                            double eps_H, double nu,
                                                            double delta,
                                                            std::uint64_t seed,
                                                            int max_matvecs) {
  if (!(eps_H > 0.0)) fail(ErrorCode::configuration, "eps_H must be positive");
  if (!(nu > 0.0 && nu <= 1.0)) fail(ErrorCode::configuration, "nu must lie in (0,1]");
  const double nu_min = min_valid_nu(H.norm_bound(), eps_H);
  if (nu < nu_min * (1.0 - 1e-15)) {
    std::ostringstream os;
    os << "nu=" << nu << " is below 2K_H/(2K_H+eps_H)=" << nu_min;
    fail(ErrorCode::configuration, os.str());
  }
  const double kappa = nu / 2.0;
  const double threshold = -nu * eps_H;
  const int budget =
      max_matvecs > 0 ? max_matvecs : auto_budget(H.dim(), H.norm_bound(), kappa, delta);
  CurvatureResult r = run_lanczos(H, budget, seed, threshold);
  if (r.rayleigh <= threshold) return r;
  return std::nullopt;
}

CurvatureProbe make_lanczos_probe(double nu_floor, double delta, std::uint64_t seed,
                                  int max_matvecs) {
  return [=](const HessianOperator& H, double eps_H) {
    const double nu = std::min(1.0, std::max(nu_floor, min_valid_nu(H.norm_bound(), eps_H)));
    const double kappa = nu / 2.0;
    const double threshold = -nu * eps_H;
    const int budget =
        max_matvecs > 0 ? max_matvecs : auto_budget(H.dim(), H.norm_bound(), kappa, delta);
    CurvatureResult r = run_lanczos(H, budget, seed, threshold);
    CurvatureProbeOutcome out;
    out.nu = nu;
    out.converged = r.converged;
    out.rayleigh = r.rayleigh;
    if (r.rayleigh <= threshold) {
      out.direction = r.direction;
      out.converged = true;
    }
    out.best_vector = std::move(r.direction);
    return out;
  };
}

}  // namespace inewton
