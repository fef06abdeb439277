#include "inewton/core.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace inewton {

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

bool all_finite(const Vector& v) { return v.allFinite(); }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

void OptimalityTolerances::validate(bool require_sqrt_relation) const {
  auto in_unit = [](double v) { return std::isfinite(v) && v > 0.0 && v < 1.0; };
  if (!in_unit(eps_g) || !in_unit(eps_H)) {
    std::ostringstream os;
    os << "optimality tolerances must lie in (0,1): eps_g=" << eps_g << " eps_H=" << eps_H;
    fail(ErrorCode::configuration, os.str());
  }
  if (require_sqrt_relation && eps_H > std::sqrt(eps_g)) {
    fail(ErrorCode::configuration, "eps_H must not exceed sqrt(eps_g)");
  }
}

const char* to_string(HessianKind kind) {
  switch (kind) {
    case HessianKind::exact: return "exact";
    case HessianKind::subsampled: return "subsampled";
    case HessianKind::dense: return "dense";
  }
  return "unknown";
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::numerical_failure: return "numerical_failure";
    case SolveStatus::stalled: return "stalled";
  }
  return "unknown";
}

struct HessianOperator::State {
  Index dim = 0;
  double norm_bound = 0.0;
  Apply apply;
  HessianKind kind = HessianKind::exact;
  double tolerance = 0.0;
  std::size_t sample_size = 0;
  std::shared_ptr<const SampleRecord> samples;
};

HessianOperator::HessianOperator(std::shared_ptr<const State> state)
    : state_(std::move(state)) {}

HessianOperator::HessianOperator(Index dim, double norm_bound, Apply apply, HessianKind kind) {
  if (dim <= 0) fail(ErrorCode::invalid_input, "operator dimension must be positive");
  if (!(norm_bound >= 0.0) || !std::isfinite(norm_bound)) {
    fail(ErrorCode::invalid_input, "operator norm bound must be finite and nonnegative");
  }
  if (!apply) fail(ErrorCode::invalid_input, "operator apply function is empty");
  auto s = std::make_shared<State>();
  s->dim = dim;
  s->norm_bound = norm_bound;
  s->apply = std::move(apply);
  s->kind = kind;
  state_ = std::move(s);
}

HessianOperator HessianOperator::dense(Matrix m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    fail(ErrorCode::invalid_input, "dense operator requires a non-empty square matrix");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const double bound = es.eigenvalues().cwiseAbs().maxCoeff();
  return dense(std::move(m), bound);
}

HessianOperator HessianOperator::dense(Matrix m, double norm_bound) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    fail(ErrorCode::invalid_input, "dense operator requires a non-empty square matrix");
  }
  if (!m.allFinite()) fail(ErrorCode::invalid_input, "dense operator has non-finite entries");
  const Index d = m.rows();
  auto shared = std::make_shared<const Matrix>(std::move(m));
  return HessianOperator(
      d, norm_bound, [shared](const Vector& v) -> Vector { return (*shared) * v; },
      HessianKind::dense);
}

Vector HessianOperator::apply(const Vector& v) const {
  if (v.size() != state_->dim) {
    fail(ErrorCode::invalid_input, "operator applied to a vector of the wrong dimension");
  }
  return state_->apply(v);
}

Index HessianOperator::dim() const noexcept { return state_->dim; }
double HessianOperator::norm_bound() const noexcept { return state_->norm_bound; }
HessianKind HessianOperator::kind() const noexcept { return state_->kind; }
double HessianOperator::tolerance() const noexcept { return state_->tolerance; }
std::size_t HessianOperator::sample_size() const noexcept { return state_->sample_size; }
const SampleRecord* HessianOperator::samples() const noexcept { return state_->samples.get(); }

HessianOperator HessianOperator::with_tolerance(double eps) const {
  auto s = std::make_shared<State>(*state_);
  s->tolerance = eps;
  return HessianOperator(std::move(s));
}

HessianOperator HessianOperator::with_samples(SampleRecord record, std::size_t sample_size) const {
  auto s = std::make_shared<State>(*state_);
  s->samples = std::make_shared<const SampleRecord>(std::move(record));
  s->sample_size = sample_size;
  s->kind = HessianKind::subsampled;
  return HessianOperator(std::move(s));
}

HessianOperator HessianOperator::with_sample_size(std::size_t sample_size) const {
  auto s = std::make_shared<State>(*state_);
  s->sample_size = sample_size;
  return HessianOperator(std::move(s));
}

HessianOperator HessianOperator::with_norm_bound(double bound) const {
  if (!(bound >= 0.0) || !std::isfinite(bound)) {
    fail(ErrorCode::invalid_input, "operator norm bound must be finite and nonnegative");
  }
  auto s = std::make_shared<State>(*state_);
  s->norm_bound = bound;
  return HessianOperator(std::move(s));
}

HessianOperator HessianOperator::shifted(double c) const {
  auto base = state_;
  auto s = std::make_shared<State>(*state_);
  s->apply = [base, c](const Vector& v) -> Vector { return base->apply(v) + c * v; };
  s->norm_bound = state_->norm_bound + std::abs(c);
  return HessianOperator(std::move(s));
}

Matrix HessianOperator::densify() const {
  const Index d = dim();
  Matrix m(d, d);
  Vector e = Vector::Zero(d);
  for (Index j = 0; j < d; ++j) {
    e[j] = 1.0;
    m.col(j) = apply(e);
    e[j] = 0.0;
  }
  return m;
}

OperatorProbeReport probe_operator(const HessianOperator& H, int pairs, std::uint64_t seed,
                                   double sym_tol) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const Index d = H.dim();
  OperatorProbeReport report;
  for (int k = 0; k < pairs; ++k) {
    Vector u(d), v(d);
    for (Index i = 0; i < d; ++i) u[i] = normal(rng);
    for (Index i = 0; i < d; ++i) v[i] = normal(rng);
    const Vector Hu = H.apply(u);
    const Vector Hv = H.apply(v);
    const double a = u.dot(Hv);
    const double b = v.dot(Hu);
    const double scale = std::max({std::abs(a), std::abs(b), u.norm() * Hv.norm(), 1e-300});
    report.max_symmetry_error = std::max(report.max_symmetry_error, std::abs(a - b) / scale);
    const double bound = H.norm_bound() * v.norm();
    const double ratio = bound > 0.0 ? Hv.norm() / bound : (Hv.norm() > 0.0 ? INFINITY : 0.0);
    report.max_norm_ratio = std::max(report.max_norm_ratio, ratio);
  }
  report.symmetric = report.max_symmetry_error <= sym_tol;
  report.bounded = report.max_norm_ratio <= 1.0 + 1e-12;
  return report;
}

HessianSource exact_hessian_source(std::shared_ptr<const Objective> objective) {
  HessianSource source;
  source.exact = true;
  source.build = [objective](const HessianRequest& req) {
    return objective->hessian(req.x);
  };
  return source;
}

bool check_first_order(const Vector& grad, const OptimalityTolerances& tol) {
  if (!all_finite(grad)) fail(ErrorCode::invalid_input, "gradient has non-finite entries");
  return grad.norm() <= tol.eps_g;
}

SecondOrderCheck check_second_order(const HessianOperator& H, const OptimalityTolerances& tol,
                                    const CurvatureProbe& probe) {
  SecondOrderCheck check;
  check.probe = probe(H, tol.eps_H);
  if (check.probe.direction) {
    check.optimal = false;
  } else if (!check.probe.converged) {
    check.optimal = false;
    check.inconclusive = true;
  } else {
    check.optimal = true;
  }
  return check;
}

double acceptance_ratio(double F_old, double F_new, double model_decrease) {
  if (!(model_decrease > 0.0)) {
    fail(ErrorCode::certificate_violation, "model decrease must be strictly positive");
  }
  return (F_old - F_new) / model_decrease;
}

double dense_lambda_min(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

}  // namespace inewton
