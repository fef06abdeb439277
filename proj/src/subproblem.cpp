#include "inewton/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace inewton {

namespace {

constexpr double kDropTolerance = 1e-12;

bool within_slack(double slack, double scale) {
  return slack >= -kCertificateSlack * std::max(1.0, std::abs(scale));
}

Certificate make_certificate(double lhs, double rhs) {
  Certificate c;
  c.checked = true;
  c.slack = lhs - rhs;
  c.met = within_slack(c.slack, std::max(std::abs(lhs), std::abs(rhs)));
  return c;
}

// Two-link chain lhs >= mid >= rhs, reported with the tighter slack.
Certificate make_chain(double lhs, double mid, double rhs) {
  Certificate a = make_certificate(lhs, mid);
  Certificate b = make_certificate(mid, rhs);
  Certificate c;
  c.checked = true;
  c.slack = std::min(a.slack, b.slack);
  c.met = a.met && b.met;
  return c;
}

void require_grad(const Vector& g, const HessianOperator& H) {
  if (g.size() != H.dim()) fail(ErrorCode::invalid_input, "gradient/operator dimension mismatch");
  if (!all_finite(g)) fail(ErrorCode::invalid_input, "gradient has non-finite entries");
}

/// Orthonormal basis U built incrementally, with H U cached.
class ReducedSpace {
 public:
  explicit ReducedSpace(const HessianOperator& H) : H_(H) {}

  bool add(const Vector& v) {
    const double vn = v.norm();
    if (!(vn > 0.0) || !std::isfinite(vn)) return false;
    Vector w = v / vn;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& q : cols_) w -= q.dot(w) * q;
    }
    const double wn = w.norm();
    if (wn <= kDropTolerance) return false;
    w /= wn;
    hcols_.push_back(H_.apply(w));
    cols_.push_back(std::move(w));
    return true;
  }

  int dim() const { return static_cast<int>(cols_.size()); }
  const Vector& h_col(int j) const { return hcols_[j]; }

  Matrix U() const { return stack(cols_); }
  Matrix HU() const { return stack(hcols_); }

  Matrix reduced_hessian() const {
    const Matrix u = U();
    Matrix B = u.transpose() * HU();
    return 0.5 * (B + B.transpose());
  }

 private:
  static Matrix stack(const std::vector<Vector>& v) {
    Matrix m(v.front().size(), static_cast<Index>(v.size()));
    for (std::size_t j = 0; j < v.size(); ++j) m.col(static_cast<Index>(j)) = v[j];
    return m;
  }

  const HessianOperator& H_;
  std::vector<Vector> cols_;
  std::vector<Vector> hcols_;
};

struct Eig {
  Vector values;   // ascending
  Matrix vectors;
};

Eig sym_eig(const Matrix& B) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(B);
  return {es.eigenvalues(), es.eigenvectors()};
}

// Indices of the bottom eigenspace and the norm of g's component in it.
std::vector<Index> bottom_indices(const Vector& lam) {
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  std::vector<Index> idx;
  for (Index i = 0; i < lam.size(); ++i) {
    if (lam[i] <= lam[0] + 1e-12 * scale) idx.push_back(i);
  }
  return idx;
}

}  // namespace

double TRModel::value(const Vector& s) const { return grad.dot(s) + 0.5 * s.dot(H.apply(s)); }

double CubicModel::value(const Vector& s) const {
  const double n = s.norm();
  return grad.dot(s) + 0.5 * s.dot(H.apply(s)) + sigma / 3.0 * n * n * n;
}

Vector CubicModel::gradient(const Vector& s) const {
  return grad + H.apply(s) + sigma * s.norm() * s;
}

// ---------------------------------------------------------------------------
// Dense reduced problems

Vector solve_dense_trust_region(const Matrix& B, const Vector& g, double radius) {
  if (!(radius > 0.0)) fail(ErrorCode::invalid_input, "trust-region radius must be positive");
  const Index p = B.rows();
  const Eig e = sym_eig(B);
  const Vector gam = e.vectors.transpose() * g;
  const double lam1 = e.values[0];
  const double gnorm = g.norm();

  auto v_of = [&](double lam) {
    Vector c(p);
    for (Index i = 0; i < p; ++i) {
      const double den = e.values[i] + lam;
      c[i] = gam[i] == 0.0 ? 0.0 : -gam[i] / den;
    }
    return c;
  };

  if (lam1 > 0.0) {
    const Vector c = v_of(0.0);
    if (c.norm() <= radius) return e.vectors * c;
  }

  const double lo = std::max(0.0, -lam1);
  const auto bottom = bottom_indices(e.values);
  double gb = 0.0;
  for (Index i : bottom) gb += gam[i] * gam[i];
  gb = std::sqrt(gb);

  if (gb <= 1e-12 * std::max(gnorm, std::numeric_limits<double>::min()) && lam1 <= 0.0) {
    // Possible hard case: solve on the complement at lambda = -lam1.
    Vector c = Vector::Zero(p);
    for (Index i = 0; i < p; ++i) {
      if (std::find(bottom.begin(), bottom.end(), i) != bottom.end()) continue;
      c[i] = -gam[i] / (e.values[i] + lo);
    }
    const double cn = c.norm();
    if (cn <= radius) {
      const Index b = bottom.front();
      double tau = std::sqrt(std::max(0.0, radius * radius - cn * cn));
      if (gam[b] > 0.0) tau = -tau;
      c[b] = tau;
      return e.vectors * c;
    }
  }

  // Secular equation 1/radius - 1/||v(lambda)|| = 0 on (lo, hi].
  double hi = std::max(lo, gnorm / radius - lam1) + std::numeric_limits<double>::min();
  hi = std::max(hi, lo * (1.0 + 1e-15) + 1e-300);
  double left = lo;
  double right = hi;
  double lam = hi;
  Vector c = v_of(lam);
  for (int it = 0; it < 500; ++it) {
    const double cn = c.norm();
    if (std::abs(cn - radius) <= 1e-10 * radius) break;
    if (cn > radius) left = lam; else right = lam;
    double dsum = 0.0;
    for (Index i = 0; i < p; ++i) {
      const double den = e.values[i] + lam;
      dsum += gam[i] * gam[i] / (den * den * den);
    }
    const double phi = 1.0 / radius - 1.0 / cn;
    const double dphi = dsum / (cn * cn * cn);
    double next = lam - phi / dphi;
    if (!(next > left && next < right) || !std::isfinite(next)) next = 0.5 * (left + right);
    if (right - left <= 1e-16 * std::max(1.0, std::abs(right))) break;
    lam = next;
    c = v_of(lam);
  }
  const double cn = c.norm();
  if (cn > radius) c *= radius / cn;
  return e.vectors * c;
}

Vector solve_dense_cubic(const Matrix& B, const Vector& g, double sigma) {
  if (!(sigma > 0.0)) fail(ErrorCode::invalid_input, "cubic regularization must be positive");
  const Index p = B.rows();
  const Eig e = sym_eig(B);
  const Vector gam = e.vectors.transpose() * g;
  const double lam1 = e.values[0];
  const double gnorm = g.norm();

  if (gnorm == 0.0 && lam1 >= 0.0) return Vector::Zero(p);

  auto v_of = [&](double r) {
    Vector c(p);
    for (Index i = 0; i < p; ++i) {
      const double den = e.values[i] + sigma * r;
      c[i] = gam[i] == 0.0 ? 0.0 : -gam[i] / den;
    }
    return c;
  };

  const double r_lo = std::max(0.0, -lam1 / sigma);
  const auto bottom = bottom_indices(e.values);
  double gb = 0.0;
  for (Index i : bottom) gb += gam[i] * gam[i];
  gb = std::sqrt(gb);

  if (r_lo > 0.0 && gb <= 1e-12 * std::max(gnorm, std::numeric_limits<double>::min())) {
    Vector c = Vector::Zero(p);
    for (Index i = 0; i < p; ++i) {
      if (std::find(bottom.begin(), bottom.end(), i) != bottom.end()) continue;
      c[i] = -gam[i] / (e.values[i] + sigma * r_lo);
    }
    const double cn = c.norm();
    if (cn <= r_lo) {
      const Index b = bottom.front();
      double tau = std::sqrt(std::max(0.0, r_lo * r_lo - cn * cn));
      if (gam[b] > 0.0) tau = -tau;
      c[b] = tau;
      return e.vectors * c;
    }
  }

  // ||v(r)|| = r, r in (r_lo, r_hi]; Newton on 1/||v(r)|| - 1/r.
  const double r_hi = std::max(
      (-lam1 + std::sqrt(lam1 * lam1 + 4.0 * sigma * gnorm)) / (2.0 * sigma), r_lo);
  double left = r_lo;
  double right = r_hi;
  double r = r_hi;
  Vector c = v_of(r);
  for (int it = 0; it < 500; ++it) {
    const double cn = c.norm();
    if (std::abs(cn - r) <= 1e-15 * std::max(r, 1e-300)) break;
    if (cn > r) left = r; else right = r;
    double dsum = 0.0;
    for (Index i = 0; i < p; ++i) {
      const double den = e.values[i] + sigma * r;
      dsum += gam[i] * gam[i] / (den * den * den);
    }
    const double phi = 1.0 / cn - 1.0 / r;
    const double dphi = sigma * dsum / (cn * cn * cn) + 1.0 / (r * r);
    double next = r - phi / dphi;
    if (!(next > left && next < right) || !std::isfinite(next)) next = 0.5 * (left + right);
    if (right - left <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(right, 1e-300)) {
      break;
    }
    r = next;
    c = v_of(r);
  }
  return e.vectors * c;
}

// ---------------------------------------------------------------------------
// Trust region

double tr_cauchy_bound(const TRModel& model) {
  const double gn = model.grad.norm();
  return 0.5 * gn * std::min(gn / (1.0 + model.H.norm_bound()), model.radius);
}

namespace {

struct RawPoint {
  Vector step;
  double value = 0.0;
};

RawPoint tr_cauchy_raw(const TRModel& model) {
  const double gn = model.grad.norm();
  if (!(gn > 0.0)) fail(ErrorCode::invalid_input, "Cauchy point requires a nonzero gradient");
  const double gHg = model.grad.dot(model.H.apply(model.grad));
  const double delta = model.radius;
  const double tau = gHg <= 0.0 ? 1.0 : std::min(gn * gn * gn / (delta * gHg), 1.0);
  RawPoint p;
  p.step = (-tau * delta / gn) * model.grad;
  p.value = -tau * delta * gn + 0.5 * tau * tau * delta * delta * gHg / (gn * gn);
  return p;
}

// Returns the unit direction and its curvature <u,Hu>, which must be negative.
std::pair<Vector, double> unit_curvature(const HessianOperator& H, const Vector& u) {
  const double un = u.norm();
  if (!(un > 0.0) || !std::isfinite(un)) fail(ErrorCode::invalid_input, "eigen direction must be nonzero");
  Vector uh = u / un;
  const double curv = uh.dot(H.apply(uh));
  if (!(curv < 0.0)) {
    fail(ErrorCode::certificate_violation, "eigen point requires negative curvature <u,Hu> < 0");
  }
  return {std::move(uh), curv};
}

RawPoint tr_eigen_raw(const TRModel& model, const Vector& uh, double curv) {
  const double sign = model.grad.dot(uh) > 0.0 ? -1.0 : 1.0;
  const double delta = model.radius;
  RawPoint p;
  p.step = (sign * delta) * uh;
  p.value = sign * delta * model.grad.dot(uh) + 0.5 * curv * delta * delta;
  return p;
}

void certify(const TRModel& model, SubproblemSolution& sol, bool cauchy, bool eigen) {
  sol.certificates = {};
  if (cauchy && model.grad.norm() > 0.0) {
    const RawPoint c = tr_cauchy_raw(model);
    sol.certificates.cauchy = make_chain(-sol.model_value, -c.value, tr_cauchy_bound(model));
  }
  if (eigen && sol.eigen_direction) {
    const auto [uh, curv] = unit_curvature(model.H, *sol.eigen_direction);
    sol.eigen_curvature = -curv;
    const RawPoint e = tr_eigen_raw(model, uh, curv);
    sol.certificates.eigen =
        make_chain(-sol.model_value, -e.value, 0.5 * (-curv) * model.radius * model.radius);
  }
}

void require_radius(const TRModel& model) {
  require_grad(model.grad, model.H);
  if (!(model.radius > 0.0) || !std::isfinite(model.radius)) {
    fail(ErrorCode::invalid_input, "trust-region radius must be positive");
  }
}

}  // namespace

SubproblemSolution tr_cauchy_point(const TRModel& model) {
  require_radius(model);
  const RawPoint c = tr_cauchy_raw(model);
  SubproblemSolution sol;
  sol.step = c.step;
  sol.model_value = c.value;
  certify(model, sol, true, false);
  return sol;
}

SubproblemSolution tr_eigen_point(const TRModel& model, const Vector& u, double nu) {
  require_radius(model);
  (void)nu;  // the certificate uses the realized curvature
  const auto [uh, curv] = unit_curvature(model.H, u);
  const RawPoint e = tr_eigen_raw(model, uh, curv);
  SubproblemSolution sol;
  sol.step = e.step;
  sol.model_value = e.value;
  sol.eigen_direction = uh;
  certify(model, sol, false, true);
  return sol;
}

SubproblemSolution tr_subspace_solve(const TRModel& model, const std::vector<Vector>& basis) {
  require_radius(model);
  ReducedSpace space(model.H);
  for (const Vector& b : basis) space.add(b);
  if (space.dim() == 0) fail(ErrorCode::invalid_input, "subspace basis is empty or degenerate");
  const Matrix U = space.U();
  const Vector v = solve_dense_trust_region(space.reduced_hessian(), U.transpose() * model.grad,
                                            model.radius);
  SubproblemSolution sol;
  sol.step = U * v;
  sol.model_value = model.grad.dot(sol.step) + 0.5 * sol.step.dot(space.HU() * v);
  sol.subspace_dim = space.dim();
  certify(model, sol, true, false);
  return sol;
}

// ---------------------------------------------------------------------------
// Cubic regularization

double arc_cauchy_bound(const CubicModel& model, double cauchy_norm) {
  const double gn = model.grad.norm();
  const double K = model.H.norm_bound();
  const double sigma = model.sigma;
  const double first =
      cauchy_norm * cauchy_norm * (std::sqrt(K * K + 4.0 * sigma * gn) - K) / 12.0;
  const double K_eff = std::max(K, std::numeric_limits<double>::epsilon());
  const double second =
      gn / (2.0 * std::sqrt(3.0)) * std::min(gn / K_eff, std::sqrt(gn / sigma));
  return std::max(first, second);
}

double cond5_bound(const CubicModel& model, const Vector& s, double zeta) {
  const double sn = s.norm();
  const double theta = std::min(1.0, sn);
  return zeta * std::max(sn * sn, theta * model.grad.norm());
}

namespace {

void require_sigma(const CubicModel& model) {
  require_grad(model.grad, model.H);
  if (!(model.sigma > 0.0) || !std::isfinite(model.sigma)) {
    fail(ErrorCode::invalid_input, "sigma must be positive");
  }
}

RawPoint arc_cauchy_raw(const CubicModel& model) {
  const double gn = model.grad.norm();
  if (!(gn > 0.0)) fail(ErrorCode::invalid_input, "Cauchy point requires a nonzero gradient");
  const double gHg = model.grad.dot(model.H.apply(model.grad));
  // Nonnegative root of sigma gn^3 a^2 + gHg a - gn^2 = 0, in conjugate form
  // when gHg > 0.
  const double disc = std::sqrt(gHg * gHg + 4.0 * model.sigma * std::pow(gn, 5));
  const double alpha = gHg > 0.0 ? 2.0 * gn * gn / (gHg + disc)
                                 : (-gHg + disc) / (2.0 * model.sigma * gn * gn * gn);
  RawPoint p;
  p.step = -alpha * model.grad;
  const double sn = alpha * gn;
  p.value = -alpha * gn * gn + 0.5 * alpha * alpha * gHg + model.sigma / 3.0 * sn * sn * sn;
  return p;
}

RawPoint arc_eigen_raw(const CubicModel& model, const Vector& uh, double c) {
  const double b = model.grad.dot(uh);
  const double sigma = model.sigma;
  auto phi = [&](double a) {
    const double m = std::abs(a);
    return b * a + 0.5 * c * a * a + sigma / 3.0 * m * m * m;
  };
  // Stationary points on each half-line: sigma a^2 + c a + b = 0 for a >= 0,
  // and sigma t^2 + c t - b = 0 with a = -t for a <= 0. With c < 0 the larger
  // root is the local minimizer on its half-line.
  double best_alpha = 0.0;
  double best_value = 0.0;
  bool have = false;
  auto consider = [&](double a) {
    const double v = phi(a);
    const bool descent_side = b * a <= 0.0;
    if (!have || v < best_value || (v == best_value && descent_side)) {
      best_alpha = a;
      best_value = v;
      have = true;
    }
  };
  const double disc_pos = c * c - 4.0 * sigma * b;
  if (disc_pos >= 0.0) consider((-c + std::sqrt(disc_pos)) / (2.0 * sigma));
  const double disc_neg = c * c + 4.0 * sigma * b;
  if (disc_neg >= 0.0) consider(-(-c + std::sqrt(disc_neg)) / (2.0 * sigma));
  RawPoint p;
  p.step = best_alpha * uh;
  p.value = best_value;
  return p;
}

double arc_eigen_bound(double nu_hat, double sigma, double eigen_norm) {
  return nu_hat / 6.0 * std::max(eigen_norm * eigen_norm, nu_hat * nu_hat / (sigma * sigma));
}

void certify(const CubicModel& model, SubproblemSolution& sol, bool cauchy, bool eigen) {
  sol.certificates = {};
  if (cauchy && model.grad.norm() > 0.0) {
    const RawPoint c = arc_cauchy_raw(model);
    sol.certificates.cauchy = make_chain(-sol.model_value, -c.value,
                                         arc_cauchy_bound(model, c.step.norm()));
  }
  if (eigen && sol.eigen_direction) {
    const auto [uh, curv] = unit_curvature(model.H, *sol.eigen_direction);
    sol.eigen_curvature = -curv;
    const RawPoint e = arc_eigen_raw(model, uh, curv);
    sol.certificates.eigen = make_chain(-sol.model_value, -e.value,
                                        arc_eigen_bound(-curv, model.sigma, e.step.norm()));
  }
  if (sol.zeta > 0.0) {
    const double gm = model.gradient(sol.step).norm();
    const double bound = cond5_bound(model, sol.step, sol.zeta);
    sol.model_grad_norm = gm;
    sol.certificates.cond5.checked = true;
    sol.certificates.cond5.slack = bound - gm;
    sol.certificates.cond5.met = gm <= bound * (1.0 + kCertificateSlack);
  }
}

struct ReducedCubic {
  Vector step;
  Vector Hs;
  double value = 0.0;
  double grad_norm = 0.0;
};

ReducedCubic solve_in_space(const CubicModel& model, const ReducedSpace& space) {
  const Matrix U = space.U();
  const Vector v =
      solve_dense_cubic(space.reduced_hessian(), U.transpose() * model.grad, model.sigma);
  ReducedCubic r;
  r.step = U * v;
  r.Hs = space.HU() * v;
  const double sn = r.step.norm();
  r.value = model.grad.dot(r.step) + 0.5 * r.step.dot(r.Hs) + model.sigma / 3.0 * sn * sn * sn;
  r.grad_norm = (model.grad + r.Hs + model.sigma * sn * r.step).norm();
  return r;
}

}  // namespace

SubproblemSolution arc_cauchy_point(const CubicModel& model) {
  require_sigma(model);
  const RawPoint c = arc_cauchy_raw(model);
  SubproblemSolution sol;
  sol.step = c.step;
  sol.model_value = c.value;
  sol.model_grad_norm = model.gradient(sol.step).norm();
  certify(model, sol, true, false);
  return sol;
}

SubproblemSolution arc_eigen_point(const CubicModel& model, const Vector& u, double nu) {
  require_sigma(model);
  (void)nu;  // the certificate uses the realized curvature
  const auto [uh, curv] = unit_curvature(model.H, u);
  const RawPoint e = arc_eigen_raw(model, uh, curv);
  SubproblemSolution sol;
  sol.step = e.step;
  sol.model_value = e.value;
  sol.model_grad_norm = model.gradient(sol.step).norm();
  sol.eigen_direction = uh;
  certify(model, sol, false, true);
  return sol;
}

SubproblemSolution arc_subspace_solve(const CubicModel& model, const std::vector<Vector>& basis) {
  require_sigma(model);
  ReducedSpace space(model.H);
  for (const Vector& b : basis) space.add(b);
  if (space.dim() == 0) fail(ErrorCode::invalid_input, "subspace basis is empty or degenerate");
  const ReducedCubic r = solve_in_space(model, space);
  SubproblemSolution sol;
  sol.step = r.step;
  sol.model_value = r.value;
  sol.model_grad_norm = r.grad_norm;
  sol.subspace_dim = space.dim();
  certify(model, sol, true, false);
  return sol;
}

SubproblemSolution arc_progressive_solve(const CubicModel& model, const ProgressiveSeeds& seeds,
                                         double zeta, int max_dim) {
  require_sigma(model);
  if (!(zeta > 0.0 && zeta < 1.0)) fail(ErrorCode::configuration, "zeta must lie in (0,1)");
  const int d = static_cast<int>(model.grad.size());
  max_dim = std::clamp(max_dim, 1, d);

  ReducedSpace space(model.H);
  space.add(seeds.cauchy);
  if (seeds.eigen) space.add(*seeds.eigen);
  space.add(model.grad);
  if (space.dim() == 0) fail(ErrorCode::invalid_input, "progressive solve needs a nonzero seed");

  ReducedCubic best;
  int best_dim = 0;
  while (true) {
    ReducedCubic r = solve_in_space(model, space);
    const bool done = r.grad_norm <= cond5_bound(model, r.step, zeta);
    if (best_dim == 0 || done || r.value <= best.value) {
      best = std::move(r);
      best_dim = space.dim();
    }
    if (done || space.dim() >= max_dim) break;
    // Extend with H applied to the newest basis vector, falling back to older
    // ones when that direction is already spanned.
    bool grew = false;
    for (int j = space.dim() - 1; j >= 0 && !grew; --j) grew = space.add(space.h_col(j));
    if (!grew) break;
  }
  SubproblemSolution sol;
  sol.step = std::move(best.step);
  sol.model_value = best.value;
  sol.model_grad_norm = best.grad_norm;
  sol.subspace_dim = best_dim;
  sol.zeta = zeta;
  if (seeds.eigen && seeds.eigen->norm() > 0.0) sol.eigen_direction = *seeds.eigen / seeds.eigen->norm();
  certify(model, sol, true, true);
  return sol;
}

// ---------------------------------------------------------------------------
// Driver steps

namespace {

// Candidate unless a seed is strictly better; ties between seeds go to the
// eigen point.
template <class Model>
SubproblemSolution dominate(SubproblemSolution candidate, const std::optional<SubproblemSolution>& cauchy,
                            const std::optional<SubproblemSolution>& eigen) {
  const SubproblemSolution* best = nullptr;
  if (eigen) best = &*eigen;
  if (cauchy && (!best || cauchy->model_value < best->model_value)) best = &*cauchy;
  if (best && best->model_value < candidate.model_value) {
    candidate.step = best->step;
    candidate.model_value = best->model_value;
    candidate.model_grad_norm = best->model_grad_norm;
    candidate.subspace_dim = 1;
  }
  return candidate;
}

}  // namespace

SubproblemSolution solve_tr_step(const TRModel& model,
                                 const std::optional<Vector>& eigen_direction) {
  require_radius(model);
  const bool has_grad = model.grad.norm() > 0.0;
  std::optional<SubproblemSolution> sc, se;
  std::vector<Vector> basis;
  if (has_grad) {
    sc = tr_cauchy_point(model);
    basis.push_back(sc->step);
  }
  if (eigen_direction) {
    se = tr_eigen_point(model, *eigen_direction, 1.0);
    basis.push_back(se->step);
  }
  if (has_grad) basis.push_back(model.H.apply(model.grad));
  if (basis.empty()) fail(ErrorCode::invalid_input, "no descent direction: zero gradient and no curvature seed");
  SubproblemSolution sol = dominate<TRModel>(tr_subspace_solve(model, basis), sc, se);
  if (se) sol.eigen_direction = se->eigen_direction;
  certify(model, sol, has_grad, se.has_value());
  return sol;
}

SubproblemSolution solve_arc_step(const CubicModel& model,
                                  const std::optional<Vector>& eigen_direction,
                                  const ArcStepOptions& options) {
  require_sigma(model);
  const bool has_grad = model.grad.norm() > 0.0;
  std::optional<SubproblemSolution> sc, se;
  if (has_grad) sc = arc_cauchy_point(model);
  if (eigen_direction) se = arc_eigen_point(model, *eigen_direction, 1.0);
  if (!sc && !se) fail(ErrorCode::invalid_input, "no descent direction: zero gradient and no curvature seed");

  SubproblemSolution sol;
  if (options.progressive) {
    ProgressiveSeeds seeds{sc ? sc->step : Vector::Zero(model.grad.size()), std::nullopt};
    if (se) seeds.eigen = se->step;
    sol = arc_progressive_solve(model, seeds, options.zeta, options.max_dim);
  } else {
    std::vector<Vector> basis;
    if (sc) basis.push_back(sc->step);
    if (se) basis.push_back(se->step);
    if (has_grad) basis.push_back(model.H.apply(model.grad));
    sol = arc_subspace_solve(model, basis);
  }
  sol = dominate<CubicModel>(std::move(sol), sc, se);
  if (se) sol.eigen_direction = se->eigen_direction;
  sol.zeta = options.progressive ? options.zeta : 0.0;
  certify(model, sol, has_grad, se.has_value());
  return sol;
}

// ---------------------------------------------------------------------------
// Certificate checking

namespace {

bool agree(const Certificate& stored, const Certificate& re) {
  return stored.checked == re.checked && stored.met == re.met;
}

}  // namespace

CertificateCheck check_certificates(const TRModel& model, const SubproblemSolution& sol) {
  SubproblemSolution copy;
  copy.step = sol.step;
  copy.model_value = model.value(sol.step);
  copy.eigen_direction = sol.eigen_direction;
  certify(model, copy, sol.certificates.cauchy.checked, sol.certificates.eigen.checked);
  CertificateCheck out;
  out.recomputed = copy.certificates;
  const bool in_ball = sol.step.norm() <= model.radius * (1.0 + 1e-12);
  out.consistent = in_ball && agree(sol.certificates.cauchy, out.recomputed.cauchy) &&
                   agree(sol.certificates.eigen, out.recomputed.eigen);
  return out;
}

CertificateCheck check_certificates(const CubicModel& model, const SubproblemSolution& sol) {
  SubproblemSolution copy;
  copy.step = sol.step;
  copy.model_value = model.value(sol.step);
  copy.eigen_direction = sol.eigen_direction;
  copy.zeta = sol.certificates.cond5.checked ? sol.zeta : 0.0;
  certify(model, copy, sol.certificates.cauchy.checked, sol.certificates.eigen.checked);
  CertificateCheck out;
  out.recomputed = copy.certificates;
  out.consistent = agree(sol.certificates.cauchy, out.recomputed.cauchy) &&
                   agree(sol.certificates.eigen, out.recomputed.eigen) &&
                   agree(sol.certificates.cond5, out.recomputed.cond5);
  return out;
}

}  // namespace inewton
