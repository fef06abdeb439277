#include "inewton/problems.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace inewton {

ScalarEval biweight_scalar(double z, double b) {
  const double r = z - b;
  const double r2 = r * r;
  const double q = 1.0 + r2;
  return {r2 / q, 2.0 * r / (q * q), 2.0 * (1.0 - 3.0 * r2) / (q * q * q)};
}

namespace {

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

ScalarEval nls_logistic_scalar(double z, double b) {
  const double s = logistic(z);
  const double s1 = s * (1.0 - s);
  const double s2 = s1 * (1.0 - 2.0 * s);
  const double r = s - b;
  return {r * r, 2.0 * r * s1, 2.0 * s1 * s1 + 2.0 * r * s2};
}

const char* to_string(LossKind kind) {
  switch (kind) {
    case LossKind::biweight: return "biweight";
    case LossKind::nls_logistic: return "nls_logistic";
  }
  return "unknown";
}

LossKind parse_loss(const std::string& name) {
  if (name == "biweight") return LossKind::biweight;
  if (name == "nls_logistic") return LossKind::nls_logistic;
  fail(ErrorCode::configuration, "unknown loss '" + name + "'");
}

ScalarLoss make_loss(LossKind kind) {
  switch (kind) {
    // sup |f''| is attained at r = 0 for the bi-weight loss.
    case LossKind::biweight: return {"biweight", biweight_scalar, 2.0};
    case LossKind::nls_logistic: return {"nls_logistic", nls_logistic_scalar, 2.0};
  }
  fail(ErrorCode::internal, "unhandled loss kind");
}

namespace {

struct Kahan {
  double sum = 0.0;
  double c = 0.0;
  void add(double v) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

void require_point(const Vector& x, Index d) {
  if (x.size() != d) fail(ErrorCode::invalid_input, "point has the wrong dimension");
  if (!all_finite(x)) fail(ErrorCode::invalid_input, "point has non-finite entries");
}

}  // namespace

FiniteSumProblem::FiniteSumProblem(RowMatrix A, Vector b, ScalarLoss loss)
    : A_(std::make_shared<const RowMatrix>(std::move(A))), b_(std::move(b)), loss_(std::move(loss)) {
  const RowMatrix& a = *A_;
  if (a.rows() == 0 || a.cols() == 0) fail(ErrorCode::invalid_input, "problem needs n, d >= 1");
  if (b_.size() != a.rows()) fail(ErrorCode::invalid_input, "targets do not match the row count");
  if (!a.allFinite() || !b_.allFinite()) fail(ErrorCode::invalid_input, "data has non-finite entries");
  if (!loss_.eval) fail(ErrorCode::invalid_input, "loss has no evaluator");
  if (!(loss_.curvature_bound > 0.0)) fail(ErrorCode::invalid_input, "loss curvature bound must be positive");
  K_ = loss_.curvature_bound * a.rowwise().squaredNorm();
  K_max_ = K_.maxCoeff();
  Kahan k;
  for (Index i = 0; i < K_.size(); ++i) k.add(K_[i]);
  K_hat_ = k.sum / static_cast<double>(K_.size());
}

std::pair<double, Vector> FiniteSumProblem::value_gradient(const Vector& x) const {
  const RowMatrix& a = *A_;
  require_point(x, a.cols());
  const Vector z = a * x;
  Kahan F;
  Vector g = Vector::Zero(a.cols());
  Vector comp = Vector::Zero(a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    const ScalarEval e = loss_.eval(z[i], b_[i]);
    F.add(e.value);
    for (Index j = 0; j < a.cols(); ++j) {
      const double y = e.first * a(i, j) - comp[j];
      const double t = g[j] + y;
      comp[j] = (t - g[j]) - y;
      g[j] = t;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(a.rows());
  return {F.sum * inv_n, g * inv_n};
}

double FiniteSumProblem::value(const Vector& x) const {
  const RowMatrix& a = *A_;
  require_point(x, a.cols());
  const Vector z = a * x;
  Kahan F;
  for (Index i = 0; i < a.rows(); ++i) F.add(loss_.eval(z[i], b_[i]).value);
  return F.sum / static_cast<double>(a.rows());
}

Vector FiniteSumProblem::gradient(const Vector& x) const { return value_gradient(x).second; }

Vector FiniteSumProblem::curvatures(const Vector& x) const {
  const RowMatrix& a = *A_;
  require_point(x, a.cols());
  const Vector z = a * x;
  Vector c(a.rows());
  for (Index i = 0; i < a.rows(); ++i) c[i] = loss_.eval(z[i], b_[i]).second;
  return c;
}

HessianOperator FiniteSumProblem::weighted_hessian(const Vector& x,
                                                   std::vector<std::size_t> indices,
                                                   std::vector<double> weights,
                                                   double norm_bound) const {
  const RowMatrix& a = *A_;
  require_point(x, a.cols());
  if (indices.empty() || indices.size() != weights.size()) {
    fail(ErrorCode::internal, "weighted Hessian needs one weight per sampled index");
  }
  const auto n = static_cast<std::size_t>(a.rows());
  Vector coef(static_cast<Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const std::size_t j = indices[k];
    if (j >= n) fail(ErrorCode::internal, "sample index out of range");
    const double z = a.row(static_cast<Index>(j)).dot(x);
    coef[static_cast<Index>(k)] = weights[k] * loss_.eval(z, b_[static_cast<Index>(j)]).second;
  }
  auto A = A_;
  auto idx = std::make_shared<const std::vector<std::size_t>>(std::move(indices));
  auto apply = [A, idx, coef](const Vector& v) -> Vector {
    const RowMatrix& m = *A;
    Vector out = Vector::Zero(m.cols());
    for (std::size_t k = 0; k < idx->size(); ++k) {
      const auto row = m.row(static_cast<Index>((*idx)[k]));
      out.noalias() += (coef[static_cast<Index>(k)] * row.dot(v)) * row.transpose();
    }
    return out;
  };
  const std::size_t count = idx->size();
  return HessianOperator(a.cols(), norm_bound, std::move(apply), HessianKind::exact)
      .with_sample_size(count);
}

Matrix FiniteSumProblem::dense_weighted_hessian(const Vector& x,
                                                const std::vector<std::size_t>& indices,
                                                const std::vector<double>& weights) const {
  const RowMatrix& a = *A_;
  require_point(x, a.cols());
  const auto m = static_cast<Index>(indices.size());
  Matrix S(m, a.cols());
  Vector w(m);
  for (Index k = 0; k < m; ++k) {
    const auto j = static_cast<Index>(indices[static_cast<std::size_t>(k)]);
    if (j >= a.rows()) fail(ErrorCode::internal, "sample index out of range");
    S.row(k) = a.row(j);
    w[k] = weights[static_cast<std::size_t>(k)] * loss_.eval(a.row(j).dot(x), b_[j]).second;
  }
  Matrix H = S.transpose() * (w.asDiagonal() * S);
  return 0.5 * (H + H.transpose());
}

HessianOperator FiniteSumProblem::hessian(const Vector& x) const {
  const auto n = num_samples();
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  return weighted_hessian(x, std::move(idx), std::move(w), K_max_);
}

Matrix FiniteSumProblem::dense_hessian(const Vector& x) const {
  const RowMatrix& a = *A_;
  const Vector c = curvatures(x) / static_cast<double>(a.rows());
  Matrix H = a.transpose() * (c.asDiagonal() * a);
  return 0.5 * (H + H.transpose());
}

// ---------------------------------------------------------------------------

double QuarticSaddle::value(const Vector& x) const {
  require_point(x, 2);
  const double x2 = x[0] * x[0];
  return 0.25 * x2 * x2 - 0.5 * x2 + 0.5 * x[1] * x[1];
}

Vector QuarticSaddle::gradient(const Vector& x) const {
  require_point(x, 2);
  Vector g(2);
  g << x[0] * x[0] * x[0] - x[0], x[1];
  return g;
}

Matrix QuarticSaddle::dense_hessian(const Vector& x) const {
  require_point(x, 2);
  Matrix H = Matrix::Zero(2, 2);
  H(0, 0) = 3.0 * x[0] * x[0] - 1.0;
  H(1, 1) = 1.0;
  return H;
}

HessianOperator QuarticSaddle::hessian(const Vector& x) const {
  Matrix H = dense_hessian(x);
  const double bound = std::max(std::abs(H(0, 0)), 1.0);
  return HessianOperator::dense(std::move(H), bound);
}

double QuarticSaddle::segment_lipschitz(const Vector& x, const Vector& s) {
  // ||H(y) - H(y')|| = 3 |y1^2 - y1'^2| <= 3 max|y1 + y1'| |y1 - y1'| on the segment.
  return 3.0 * std::max(std::abs(2.0 * x[0]), std::abs(2.0 * x[0] + 2.0 * s[0]));
}

// ---------------------------------------------------------------------------

Quadratic::Quadratic(Matrix Q, Vector c)
    : Q_(std::move(Q)), c_(std::move(c)), H_(HessianOperator::dense(Q_)) {
  if (Q_.rows() != c_.size()) fail(ErrorCode::invalid_input, "quadratic: Q and c disagree in size");
  if ((Q_ - Q_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, Q_.cwiseAbs().maxCoeff())) {
    fail(ErrorCode::invalid_input, "quadratic: Q must be symmetric");
  }
}

double Quadratic::value(const Vector& x) const {
  require_point(x, dim());
  return 0.5 * x.dot(Q_ * x) + c_.dot(x);
}

Vector Quadratic::gradient(const Vector& x) const {
  require_point(x, dim());
  return Q_ * x + c_;
}

HessianOperator Quadratic::hessian(const Vector& x) const {
  require_point(x, dim());
  return H_;
}

// ---------------------------------------------------------------------------

FiniteSumProblem generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 1 || spec.d < 1) fail(ErrorCode::configuration, "synthetic problem needs n, d >= 1");
  if (!(spec.skew >= 1.0)) fail(ErrorCode::configuration, "skew must be >= 1");
  if (!(spec.kmax >= 0.0) || !(spec.noise >= 0.0)) {
    fail(ErrorCode::configuration, "kmax and noise must be nonnegative");
  }
  std::mt19937_64 rng(derive_seed(spec.seed, 0x5eed));
  std::normal_distribution<double> normal;
  const double row_sd = 1.0 / std::sqrt(static_cast<double>(spec.d));

  RowMatrix A(spec.n, spec.d);
  for (Index i = 0; i < spec.n; ++i) {
    for (Index j = 0; j < spec.d; ++j) A(i, j) = row_sd * normal(rng);
  }
  if (spec.skew > 1.0) {
    const Index heavy = std::max<Index>(1, spec.n / 100);
    A.topRows(heavy) *= std::sqrt(spec.skew);
  }
  const ScalarLoss loss = make_loss(spec.loss);
  if (spec.kmax > 0.0) {
    const double current = loss.curvature_bound * A.rowwise().squaredNorm().maxCoeff();
    A *= std::sqrt(spec.kmax / current);
  }

  Vector x_star(spec.d);
  for (Index j = 0; j < spec.d; ++j) x_star[j] = normal(rng);
  const Vector z = A * x_star;
  Vector b(spec.n);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Index i = 0; i < spec.n; ++i) {
    if (spec.loss == LossKind::biweight) {
      b[i] = z[i] + spec.noise * normal(rng);
    } else {
      b[i] = unif(rng) < logistic(z[i]) ? 1.0 : 0.0;
    }
  }
  return FiniteSumProblem(std::move(A), std::move(b), loss);
}

}  // namespace inewton
