#pragma once

// Shared domain types for the inexact-Hessian trust-region and cubic
// regularization solvers: vectors, Hessian operators, objectives,
// optimality tolerances and iteration traces.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace inewton {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

enum class ErrorCode {
  invalid_input,
  configuration,
  certificate_violation,
  numerical,
  parse,
  io,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

bool all_finite(const Vector& v);

/// Mixes a base seed with stream identifiers into an independent 64-bit seed
/// (SplitMix64 finalizer). Used everywhere a run needs per-iteration streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

/// Gradient and curvature tolerances for (eps_g, eps_H)-optimality.
struct OptimalityTolerances {
  double eps_g = 1e-5;
  double eps_H = 1e-3;

  /// Throws configuration error unless both lie in (0, 1). With
  /// `require_sqrt_relation`, also demands eps_H <= sqrt(eps_g).
  void validate(bool require_sqrt_relation = false) const;
};

enum class HessianKind { exact, subsampled, dense };

const char* to_string(HessianKind kind);

/// Index multiset and probabilities a sub-sampled operator was drawn with.
struct SampleRecord {
  std::vector<std::size_t> indices;
  std::vector<double> probabilities;
};

/// Symmetric linear operator v -> Hv with a known spectral-norm bound K_H.
/// Copies share the underlying state; the operator itself is immutable.
class HessianOperator {
 public:
  using Apply = std::function<Vector(const Vector&)>;

  HessianOperator(Index dim, double norm_bound, Apply apply,
                  HessianKind kind = HessianKind::exact);

  /// Explicit symmetric matrix; the bound defaults to its spectral norm.
  static HessianOperator dense(Matrix m);
  static HessianOperator dense(Matrix m, double norm_bound);

  Vector apply(const Vector& v) const;
  Vector operator()(const Vector& v) const { return apply(v); }

  Index dim() const noexcept;
  double norm_bound() const noexcept;
  HessianKind kind() const noexcept;

  /// Accuracy the operator was requested at (0 for exact operators).
  double tolerance() const noexcept;
  /// Scalar second-derivative evaluations spent building the operator.
  std::size_t sample_size() const noexcept;
  const SampleRecord* samples() const noexcept;

  HessianOperator with_tolerance(double eps) const;
  HessianOperator with_samples(SampleRecord record, std::size_t sample_size) const;
  HessianOperator with_sample_size(std::size_t sample_size) const;
  HessianOperator with_norm_bound(double bound) const;

  /// H + c I, with the bound grown by |c|.
  HessianOperator shifted(double c) const;

  Matrix densify() const;

 private:
  struct State;
  explicit HessianOperator(std::shared_ptr<const State> state);
  std::shared_ptr<const State> state_;
};

struct OperatorProbeReport {
  double max_symmetry_error = 0.0;  // relative
  double max_norm_ratio = 0.0;      // ||Hv|| / (K_H ||v||)
  bool symmetric = false;
  bool bounded = false;
};

/// Random-probe check of symmetry (relative tolerance `sym_tol`) and of the
/// norm bound, on `pairs` Gaussian direction pairs.
OperatorProbeReport probe_operator(const HessianOperator& H, int pairs,
                                   std::uint64_t seed, double sym_tol = 1e-10);

/// Smooth objective F with exact value, gradient and Hessian.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual Index dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual std::pair<double, Vector> value_gradient(const Vector& x) const {
    return {value(x), gradient(x)};
  }
  virtual HessianOperator hessian(const Vector& x) const = 0;
  virtual Matrix dense_hessian(const Vector& x) const { return hessian(x).densify(); }
  /// Number of summands for finite-sum objectives, 0 otherwise.
  virtual std::size_t num_samples() const { return 0; }
};

struct HessianRequest {
  const Vector& x;
  double epsilon;
  double delta;
  std::uint64_t seed;
};

/// Produces H_t satisfying ||(H_t - grad^2 F)s|| <= eps ||s|| (possibly with
/// probability 1 - delta) for the requested tolerance.
struct HessianSource {
  std::function<HessianOperator(const HessianRequest&)> build;
  /// A-priori bound on ||H_t||; 0 when unknown.
  double norm_bound = 0.0;
  /// The operator bound is norm_bound + eps for a request at accuracy eps.
  bool bound_adds_epsilon = false;
  bool exact = true;
};

HessianSource exact_hessian_source(std::shared_ptr<const Objective> objective);

struct IterationRecord {
  std::size_t t = 0;
  double F_value = 0.0;
  double grad_norm = 0.0;
  double lambda_min_estimate = 0.0;
  double radius_or_sigma = 0.0;
  double rho = 0.0;
  bool accepted = false;
  std::size_t sample_size = 0;
  double step_norm = 0.0;
  double eps_t = 0.0;
  // Not part of the trace file.
  double model_decrease = 0.0;
  bool terminal = false;
  bool cond5_met = false;
  double model_grad_norm = 0.0;
};

enum class SolveStatus { converged, max_iterations, numerical_failure, stalled };

const char* to_string(SolveStatus status);

struct SolveResult {
  Vector x;
  double F_value = 0.0;
  SolveStatus status = SolveStatus::max_iterations;
  std::vector<IterationRecord> trace;
  std::size_t successes = 0;
  std::size_t failures = 0;
  /// Hessian tolerance in force at the last iteration.
  double final_epsilon = 0.0;
  /// Sum of operator sample sizes (scalar Hessian evaluations).
  std::size_t hessian_cost = 0;
  /// Trial steps s_t, one per non-terminal record, when path recording is on.
  std::vector<Vector> steps;
  std::vector<Vector> iterates;
  std::string diagnostic;

  bool converged() const { return status == SolveStatus::converged; }
};

bool check_first_order(const Vector& grad, const OptimalityTolerances& tol);

/// Result of a negative-curvature search on H at threshold eps_H.
struct CurvatureProbeOutcome {
  bool converged = false;
  /// Smallest Rayleigh quotient seen (unit-norm direction).
  double rayleigh = 0.0;
  /// Present iff <u,Hu> <= -nu eps_H ||u||^2.
  std::optional<Vector> direction;
  std::optional<Vector> best_vector;
  double nu = 1.0;
};

using CurvatureProbe =
    std::function<CurvatureProbeOutcome(const HessianOperator&, double eps_H)>;

struct SecondOrderCheck {
  bool optimal = false;
  bool inconclusive = false;
  CurvatureProbeOutcome probe;
};

SecondOrderCheck check_second_order(const HessianOperator& H,
                                    const OptimalityTolerances& tol,
                                    const CurvatureProbe& probe);

/// rho = (F_old - F_new) / model_decrease; model_decrease must be > 0.
double acceptance_ratio(double F_old, double F_new, double model_decrease);

struct TraceCheck {
  bool ok = true;
  std::size_t checked = 0;
  std::string detail;  // first violation
};

/// Replays p_{t+1} = gamma p_t (or max(p_t / gamma, floor)) from the accepted
/// flags and requires exact equality with the recorded radius_or_sigma; while
/// the floor has not been hit, also p_t = p_0 gamma^k to 1e-12 relative.
/// `grow_on_accept` selects the trust-region direction of the update.
TraceCheck check_multiplicative_identity(const std::vector<IterationRecord>& trace, double p0,
                                         double gamma, bool grow_on_accept, double floor);

/// F_t - F_{t+1} >= eta (-m_t(s_t)) > 0 on every accepted iteration.
TraceCheck check_sufficient_decrease(const std::vector<IterationRecord>& trace, double eta);

/// Smallest eigenvalue of a symmetric matrix (dense; desk-scale checks).
double dense_lambda_min(const Matrix& m);

}  // namespace inewton
