#pragma once

// Objective instances: finite sums of scalar losses of linear predictions,
// F(x) = (1/n) sum_i f(a_i'x; b_i), plus small analytic test functions.

#include "inewton/core.hpp"

#include <functional>
#include <optional>
#include <string>

namespace inewton {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ScalarEval {
  double value = 0.0;
  double first = 0.0;
  double second = 0.0;
};

/// r^2/(1+r^2) with r = z - b.
ScalarEval biweight_scalar(double z, double b);

/// (s(z) - b)^2 with the logistic s; second derivative is the full one,
/// 2 s'^2 + 2 (s - b) s''.
ScalarEval nls_logistic_scalar(double z, double b);

struct ScalarLoss {
  std::string name;
  std::function<ScalarEval(double z, double b)> eval;
  /// sup_z |f''(z)|; K_i = curvature_bound * ||a_i||^2. Not validated for
  /// custom losses.
  double curvature_bound = 0.0;
};

enum class LossKind { biweight, nls_logistic };

const char* to_string(LossKind kind);
LossKind parse_loss(const std::string& name);
ScalarLoss make_loss(LossKind kind);

class FiniteSumProblem final : public Objective {
 public:
  FiniteSumProblem(RowMatrix A, Vector b, ScalarLoss loss);

  Index dim() const override { return A_->cols(); }
  std::size_t num_samples() const override { return static_cast<std::size_t>(A_->rows()); }

  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  std::pair<double, Vector> value_gradient(const Vector& x) const override;
  /// (1/n) sum_i f''(a_i'x) a_i a_i', norm bound K_max.
  HessianOperator hessian(const Vector& x) const override;
  Matrix dense_hessian(const Vector& x) const override;

  /// f''(a_i'x; b_i) for every row.
  Vector curvatures(const Vector& x) const;

  /// v -> sum_k weights[k] f''(a_j'x) <a_j, v> a_j over j = indices[k]. Both
  /// the exact and the sub-sampled Hessians go through this path.
  HessianOperator weighted_hessian(const Vector& x, std::vector<std::size_t> indices,
                                   std::vector<double> weights, double norm_bound) const;
  Matrix dense_weighted_hessian(const Vector& x, const std::vector<std::size_t>& indices,
                                const std::vector<double>& weights) const;

  const RowMatrix& rows() const { return *A_; }
  const Vector& targets() const { return b_; }
  const ScalarLoss& loss() const { return loss_; }
  const Vector& K() const { return K_; }
  double K_max() const { return K_max_; }
  double K_hat() const { return K_hat_; }

 private:
  std::shared_ptr<const RowMatrix> A_;
  Vector b_;
  ScalarLoss loss_;
  Vector K_;
  double K_max_ = 0.0;
  double K_hat_ = 0.0;
};

/// F(x, y) = x^4/4 - x^2/2 + y^2/2: strict saddle at the origin, minima
/// F = -1/4 at (+-1, 0).
class QuarticSaddle final : public Objective {
 public:
  Index dim() const override { return 2; }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  HessianOperator hessian(const Vector& x) const override;
  Matrix dense_hessian(const Vector& x) const override;
  /// Hessian Lipschitz constant on the segment [x, x + s].
  static double segment_lipschitz(const Vector& x, const Vector& s);
};

/// F(x) = 1/2 x'Qx + c'x for symmetric Q.
class Quadratic final : public Objective {
 public:
  Quadratic(Matrix Q, Vector c);
  Index dim() const override { return Q_.rows(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  HessianOperator hessian(const Vector& x) const override;
  Matrix dense_hessian(const Vector&) const override { return Q_; }

 private:
  Matrix Q_;
  Vector c_;
  HessianOperator H_;
};

struct SyntheticSpec {
  LossKind loss = LossKind::biweight;
  Index n = 1000;
  Index d = 50;
  std::uint64_t seed = 1;
  /// Squared-norm multiplier applied to 1% of the rows (at least one).
  double skew = 1.0;
  /// When positive, rows are rescaled so that K_max equals this value.
  double kmax = 0.0;
  double noise = 0.1;
};

/// Gaussian rows N(0, I/d), targets from a planted x* ~ N(0, I): residual
/// noise for regression, Bernoulli(s(a'x*)) labels for classification.
FiniteSumProblem generate_synthetic(const SyntheticSpec& spec);

enum class DataFormat { csv, svmlight };

DataFormat parse_format(const std::string& name);

/// CSV: d feature columns then the target, optional header line.
/// svmlight: "target idx:val ..." with 1-based indices; `dim` overrides the
/// inferred dimension (largest index) when given.
FiniteSumProblem load_dataset(const std::string& path, DataFormat format, LossKind loss,
                              std::optional<Index> dim = std::nullopt);
void write_dataset(const std::string& path, DataFormat format, const FiniteSumProblem& problem);

}  // namespace inewton
