// Acceptance run: one PASS/FAIL line per criterion. Every check recomputes its
// quantity from first principles (grid scans, brute force, dense
// eigendecompositions, finite differences) rather than trusting solver flags.
//
// Usage: inewton_acceptance [criterion numbers...]   (default: all)

#include "inewton/cubic_reg.hpp"
#include "inewton/harness.hpp"
#include "inewton/problems.hpp"
#include "inewton/sampling.hpp"
#include "inewton/subproblem.hpp"
#include "inewton/trust_region.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace inewton;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

Vector gaussian(std::mt19937_64& rng, Index d, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Vector v(d);
  for (Index i = 0; i < d; ++i) v[i] = n(rng);
  return v;
}

Matrix symmetric(std::mt19937_64& rng, Index d, double scale = 1.0) {
  const Matrix m = [&] {
    std::normal_distribution<double> n(0.0, scale);
    Matrix r(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) r(i, j) = n(rng);
    return r;
  }();
  return 0.5 * (m + m.transpose());
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Eigen::SelfAdjointEigenSolver<Matrix> eig(const Matrix& m) { return Eigen::SelfAdjointEigenSolver<Matrix>(m); }

double lambda_min(const Matrix& m) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

double spectral_norm(const Matrix& m) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
}

double tr_model(const Matrix& B, const Vector& g, const Vector& s) { return g.dot(s) + 0.5 * s.dot(B * s); }

double cubic_model(const Matrix& B, const Vector& g, double sigma, const Vector& s) {
  const double n = s.norm();
  return g.dot(s) + 0.5 * s.dot(B * s) + sigma / 3.0 * n * n * n;
}

// lhs >= rhs with a relative allowance of 1e-9.
bool geq(double lhs, double rhs) { return lhs - rhs >= -1e-9 * std::max(std::abs(lhs), std::abs(rhs)); }

// ---------------------------------------------------------------------------

Outcome criterion1() {
  std::mt19937_64 rng(1001);
  int instances = 0, eigen_cases = 0;
  std::vector<std::string> bad;
  auto note = [&](int i, const char* what) {
    if (bad.size() < 5) bad.push_back(fmt("#%d %s", i, what));
  };
  for (int i = 0; i < 200; ++i) {
    const Index d = 1 + i % 20;
    const Matrix B = symmetric(rng, d, std::exp(uniform(rng, -2, 1)));
    const Vector g = gaussian(rng, d, std::exp(uniform(rng, -3, 1)));
    const double radius = std::exp(uniform(rng, -3, 2));
    const double sigma = std::exp(uniform(rng, -3, 2));
    const HessianOperator H = HessianOperator::dense(B);
    const double normH = spectral_norm(B);
    const double gn = g.norm();
    ++instances;

    std::optional<Vector> u;
    auto es = eig(B);
    const double lmin = es.eigenvalues()(0);
    if (lmin < 0) {
      Vector v = es.eigenvectors().col(0) + gaussian(rng, d, 0.3 / std::sqrt(static_cast<double>(d)));
      if (v.dot(B * v) >= 0) v = es.eigenvectors().col(0);
      u = v / v.norm();
      ++eigen_cases;
    }
    // Realized curvature nu_hat |lambda_min| = -<u,Bu> for unit u.
    const double curv = u ? -u->dot(B * *u) : 0.0;
    const double nu_hat = u ? curv / std::abs(lmin) : 1.0;

    // Trust region.
    const TRModel tm{g, H, radius};
    const SubproblemSolution tc = tr_cauchy_point(tm);
    const double mC = tr_model(B, g, tc.step);
    if (!geq(-mC, 0.5 * gn * std::min(gn / (1.0 + normH), radius))) note(i, "TR Cauchy");
    if (tc.step.norm() > radius * (1 + 1e-12)) note(i, "TR Cauchy outside ball");
    double best = mC;
    if (u) {
      const SubproblemSolution te = tr_eigen_point(tm, *u, nu_hat);
      const double mE = tr_model(B, g, te.step);
      if (!geq(-mE, 0.5 * nu_hat * std::abs(lmin) * radius * radius)) note(i, "TR eigen");
      if (te.step.norm() > radius * (1 + 1e-12)) note(i, "TR eigen outside ball");
      best = std::min(best, mE);
    }
    const SubproblemSolution ts = solve_tr_step(tm, u);
    if (!geq(best, tr_model(B, g, ts.step))) note(i, "TR subspace dominance");
    if (ts.step.norm() > radius * (1 + 1e-12)) note(i, "TR subspace outside ball");
    if (!check_certificates(tm, ts).consistent) note(i, "TR certificate flags");

    // Cubic regularization, with K_H the spectral norm itself.
    const CubicModel cm{g, H, sigma};
    const SubproblemSolution ac = arc_cauchy_point(cm);
    const double cC = cubic_model(B, g, sigma, ac.step);
    const double sc = ac.step.norm();
    const double K = std::max(normH, 1e-300);
    const double first = sc * sc * (std::sqrt(K * K + 4 * sigma * gn) - K) / 12.0;
    const double second = gn / (2 * std::sqrt(3.0)) * std::min(gn / K, std::sqrt(gn / sigma));
    if (!geq(-cC, std::max(first, second))) note(i, "ARC Cauchy");
    double cbest = cC;
    if (u) {
      const SubproblemSolution ae = arc_eigen_point(cm, *u, nu_hat);
      const double cE = cubic_model(B, g, sigma, ae.step);
      const double se = ae.step.norm();
      const double rhs = curv / 6.0 * std::max(se * se, curv * curv / (sigma * sigma));
      if (!geq(-cE, rhs)) note(i, "ARC eigen");
      cbest = std::min(cbest, cE);
    }
    const SubproblemSolution as = solve_arc_step(cm, u, {});
    if (!geq(cbest, cubic_model(B, g, sigma, as.step))) note(i, "ARC subspace dominance");
    if (!check_certificates(cm, as).consistent) note(i, "ARC certificate flags");
  }
  Outcome o;
  o.pass = bad.empty();
  o.detail = fmt("%d instances (d<=20), %d with negative curvature", instances, eigen_cases);
  for (const auto& b : bad) o.detail += "; violation " + b;
  return o;
}

// ---------------------------------------------------------------------------

// Grid argmin over tau in [0,1] with 10^6 intervals.
double grid_argmin(const std::function<double(double)>& phi) {
  const int N = 1000000;
  double best = phi(0.0), arg = 0.0;
  for (int k = 1; k <= N; ++k) {
    const double tau = static_cast<double>(k) / N;
    const double v = phi(tau);
    if (v < best) {
      best = v;
      arg = tau;
    }
  }
  return arg;
}

// Brute-force minimum of f over the disk of radius R (or the square when
// !ball): coarse grid, boundary scan, then local refinement.
double brute_2d(const std::function<double(double, double)>& f, double R, bool ball) {
  auto inside = [&](double x, double y) { return !ball || x * x + y * y <= R * R; };
  double best = f(0, 0), bx = 0, by = 0;
  const int N = 2000;
  double h = 2 * R / N;
  for (int i = 0; i <= N; ++i) {
    for (int j = 0; j <= N; ++j) {
      const double x = -R + i * h, y = -R + j * h;
      if (!inside(x, y)) continue;
      const double v = f(x, y);
      if (v < best) best = v, bx = x, by = y;
    }
  }
  for (int round = 0; round < 4; ++round) {
    const double w = 2 * h;
    const int M = 200;
    const double hh = 2 * w / M;
    const double cx = bx, cy = by;
    for (int i = 0; i <= M; ++i) {
      for (int j = 0; j <= M; ++j) {
        const double x = cx - w + i * hh, y = cy - w + j * hh;
        if (!inside(x, y)) continue;
        const double v = f(x, y);
        if (v < best) best = v, bx = x, by = y;
      }
    }
    h = hh;
  }
  if (ball) {
    const int A = 1000000;
    double bt = 0.0;
    for (int k = 0; k < A; ++k) {
      const double t = 2 * M_PI * k / A;
      const double v = f(R * std::cos(t), R * std::sin(t));
      if (v < best) best = v, bt = t;
    }
    for (int k = -2000; k <= 2000; ++k) {
      const double t = bt + 2 * M_PI / A * k / 1000.0;
      best = std::min(best, f(R * std::cos(t), R * std::sin(t)));
    }
  }
  return best;
}

Outcome criterion2() {
  std::mt19937_64 rng(2002);
  double worst_alpha = 0.0, worst_value = 0.0;
  int scans = 0, solves = 0;
  bool direction_ok = true;
  for (int i = 0; i < 25; ++i) {
    const Index d = 2 + i % 19;
    const Matrix B = symmetric(rng, d);
    const Vector g = gaussian(rng, d);
    const double gn = g.norm();
    const double b = g.dot(B * g);
    const HessianOperator H = HessianOperator::dense(B);

    const double radius = std::exp(uniform(rng, -2, 1.5));
    const Vector sT = tr_cauchy_point({g, H, radius}).step;
    direction_ok = direction_ok && (sT + sT.norm() / gn * g).norm() <= 1e-12 * sT.norm();
    const double amaxT = radius / gn;
    const double tauT = grid_argmin([&](double tau) {
      const double a = tau * amaxT;
      return a * (-gn * gn + 0.5 * a * b);
    });
    worst_alpha = std::max(worst_alpha, std::abs(sT.norm() / gn / amaxT - tauT));

    const double sigma = std::exp(uniform(rng, -2, 1.5));
    const Vector sA = arc_cauchy_point({g, H, sigma}).step;
    direction_ok = direction_ok && (sA + sA.norm() / gn * g).norm() <= 1e-12 * sA.norm();
    const double g3 = gn * gn * gn;
    const double amaxA = std::abs(b) / (sigma * g3) + 1.0 / std::sqrt(sigma * gn);
    const double tauA = grid_argmin([&](double tau) {
      const double a = tau * amaxA;
      return a * (-gn * gn + a * (0.5 * b + sigma / 3.0 * a * g3));
    });
    worst_alpha = std::max(worst_alpha, std::abs(sA.norm() / gn / amaxA - tauA));
    scans += 2;
  }

  const std::vector<Vector> basis{Vector::Unit(2, 0), Vector::Unit(2, 1)};
  for (int i = 0; i < 12; ++i) {
    Matrix B = symmetric(rng, 2);
    Vector g = gaussian(rng, 2);
    double radius = std::exp(uniform(rng, -1, 1));
    if (i == 0) {  // hard case
      B = Matrix::Zero(2, 2);
      B.diagonal() << -1.0, 2.0;
      g = (Vector(2) << 0.0, 1.0).finished();
      radius = 2.0;
    }
    const HessianOperator H = HessianOperator::dense(B);
    const SubproblemSolution tr = tr_subspace_solve({g, H, radius}, basis);
    const double brute = brute_2d(
        [&](double x, double y) { return tr_model(B, g, (Vector(2) << x, y).finished()); }, radius, true);
    worst_value = std::max(worst_value, std::abs(tr_model(B, g, tr.step) - brute));

    const double sigma = std::exp(uniform(rng, -1, 1));
    const SubproblemSolution arc = arc_subspace_solve({g, H, sigma}, basis);
    const double K = spectral_norm(B);
    // Every minimizer has sigma/3 r^2 <= K/2 r + ||g||.
    const double R = (K / 2 + std::sqrt(K * K / 4 + 4 * sigma * g.norm() / 3)) / (2 * sigma / 3) * 1.01;
    const double cbrute = brute_2d(
        [&](double x, double y) { return cubic_model(B, g, sigma, (Vector(2) << x, y).finished()); }, R, false);
    worst_value = std::max(worst_value, std::abs(cubic_model(B, g, sigma, arc.step) - cbrute));
    solves += 2;
  }
  Outcome o;
  o.pass = worst_alpha <= 1e-6 && worst_value <= 1e-4 && direction_ok;
  o.detail = fmt("%d Cauchy grid scans, max |alpha - alpha_grid| = %.2e (<= 1e-6, alpha normalized to the scan "
                 "range); %d d=2 solves, max |m - m_brute| = %.2e (<= 1e-4)%s",
                 scans, worst_alpha, solves, worst_value, direction_ok ? "" : "; step not along -g");
  return o;
}

// ---------------------------------------------------------------------------

Outcome criterion3() {
  const std::string base =
      "problem = biweight\nn = 5000\nd = 30\nkmax = 1\nverify_trials = 1000\nverify_deltas = 0.1, 0.01\n";
  // Without replacement every grid point is guaranteed (capped sizes are the
  // full sum); with-replacement non-uniform rows are kept to uncapped sizes.
  const VerifyReport uni = verify_bounds(parse_config(
      base + "verify_modes = uniform_without_replacement\n"
             "verify_epsilons = 0.5, 0.3, 0.2, 0.1, 0.05, 0.01, 0.002, 0.001\n",
      "criterion3"));
  const VerifyReport non = verify_bounds(
      parse_config(base + "verify_modes = nonuniform\nverify_epsilons = 0.5, 0.3, 0.2, 0.1, 0.05\n", "criterion3"));

  int grid = 0, na = 0;
  double worst_ratio = 0.0;
  std::string failed_controls;
  for (const VerifyReport* r : {&uni, &non}) {
    for (const VerifyRow& row : r->rows) {
      if (row.control) {
        if (row.report.failure_rate > row.delta) {
          failed_controls += fmt(" %s eps=%g delta=%g |S|=%zu rate=%.3f;", to_string(row.mode), row.epsilon,
                                 row.delta, row.used, row.report.failure_rate);
        }
        continue;
      }
      if (row.full_sample) continue;
      ++grid;
      if (!row.guaranteed) ++na;
      worst_ratio = std::max(worst_ratio, row.report.failure_rate / row.delta);
    }
  }
  std::printf("%s(the result line of each table covers that table's controls only)\n%s", uni.text.c_str(),
              non.text.c_str());

  // Independent recount for one uncapped point: own draws, own spectral norms.
  const ExperimentConfig cfg = parse_config(base, "criterion3");
  const FiniteSumProblem fs = generate_synthetic(cfg.synthetic);
  std::mt19937_64 rng(3003);
  const Vector x = gaussian(rng, fs.dim());
  const Matrix exact = fs.dense_hessian(x);
  const SampleScheme scheme = resolve_scheme(fs, x, SampleMode::nonuniform, 0.1, 0.1);
  int recount_fail = 0;
  const int recount_trials = 200;
  for (int k = 0; k < recount_trials; ++k) {
    const SampleDraw dr = draw_sample(fs, x, scheme, derive_seed(3003, k));
    Matrix Hs = Matrix::Zero(fs.dim(), fs.dim());
    const Vector c = fs.curvatures(x);
    for (std::size_t j = 0; j < dr.indices.size(); ++j) {
      const Index r = static_cast<Index>(dr.indices[j]);
      const Vector a = fs.rows().row(r).transpose();
      Hs.noalias() += (dr.weights[j] * c[r]) * a * a.transpose();
    }
    if (spectral_norm(Hs - exact) > 0.1) ++recount_fail;
  }
  const double recount_rate = static_cast<double>(recount_fail) / recount_trials;

  Outcome o;
  o.pass = uni.bounds_hold && non.bounds_hold && !failed_controls.empty() && na == 0 && recount_rate <= 0.1;
  o.detail = fmt("%d grid points (%d without guarantee), max failure_rate/delta = %.3f; full-sample rows exact; "
                 "independent recount (nonuniform eps=0.1, |S|=%zu) rate %.3f",
                 grid, na, worst_ratio, scheme.resolved_size, recount_rate);
  o.detail += failed_controls.empty() ? "; no quartered control failed" : "; failing controls:" + failed_controls;
  return o;
}

// ---------------------------------------------------------------------------

Outcome criterion4() {
  auto F = std::make_shared<QuarticSaddle>();
  const Vector x0 = Vector::Zero(2);
  const OptimalityTolerances tol{1e-6, 1e-3};
  Outcome o;
  auto check = [&](const char* name, const SolveResult& r) {
    const double gnorm = F->gradient(r.x).norm();
    const double lmin = lambda_min(F->dense_hessian(r.x));
    const double Fv = F->value(r.x);
    const bool ok = Fv <= -0.25 + 1e-6 && gnorm <= tol.eps_g && lmin >= -tol.eps_H;
    o.pass = o.pass && ok;
    o.detail += fmt("%s%s: F=%.12f |g|=%.1e lambda_min=%.4f iters=%zu", o.detail.empty() ? "" : "; ", name, Fv,
                    gnorm, lmin, r.trace.size() - 1);
  };
  TRConfig tc;
  tc.tol = tol;
  check("TR", run_tr(*F, exact_hessian_source(F), x0, tc, 1));
  for (ArcMode mode : {ArcMode::standard, ArcMode::optimal}) {
    ARCConfig ac;
    ac.tol = tol;
    ac.mode = mode;
    check(mode == ArcMode::standard ? "ARC" : "ARC-optimal", run_arc(*F, exact_hessian_source(F), x0, ac, 1));
  }
  return o;
}

// ---------------------------------------------------------------------------

struct IdentityTally {
  std::size_t runs = 0, records = 0, accepted = 0;
  std::vector<std::string> bad;
  void note(const std::string& s) {
    if (bad.size() < 5) bad.push_back(s);
  }
};

// p_t = p0 * gamma^k exactly, with k = succ - fail (TR) or fail - succ (ARC);
// gamma = 2 makes the power exact in floating point.
void check_powers(IdentityTally& tally, const std::vector<IterationRecord>& trace, double p0, bool tr,
                  const std::string& tag) {
  long k = 0;
  for (std::size_t t = 0; t < trace.size(); ++t) {
    ++tally.records;
    if (trace[t].radius_or_sigma != std::ldexp(p0, static_cast<int>(k))) {
      tally.note(tag + fmt(" t=%zu power identity", t));
      return;
    }
    if (trace[t].terminal) break;
    k += (trace[t].accepted == tr) ? 1 : -1;
  }
}

void check_decrease(IdentityTally& tally, const std::vector<IterationRecord>& trace, double eta,
                    const std::string& tag) {
  for (std::size_t t = 0; t + 1 < trace.size(); ++t) {
    if (!trace[t].accepted) continue;
    ++tally.accepted;
    const double drop = trace[t].F_value - trace[t + 1].F_value;
    if (!(trace[t].model_decrease > 0.0) || drop < eta * trace[t].model_decrease) {
      tally.note(tag + fmt(" t=%zu decrease", t));
    }
  }
}

Outcome criterion5() {
  IdentityTally tally;
  auto Q = std::make_shared<QuarticSaddle>();
  std::mt19937_64 rng(5005);
  double worst_sigma_ratio = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Vector x0 = gaussian(rng, 2, 1.5);
    const std::string tag = fmt("quartic start %d", k);
    TRConfig tc;
    tc.tol = {1e-6, 1e-3};
    tc.delta0 = std::ldexp(1.0, static_cast<int>(uniform(rng, -4, 3)));
    tc.record_path = true;
    const SolveResult tr = run_tr(*Q, exact_hessian_source(Q), x0, tc, k);
    ++tally.runs;
    check_powers(tally, tr.trace, tc.delta0, true, tag + " TR");
    check_decrease(tally, tr.trace, tc.eta, tag + " TR");
    for (std::size_t t = 0; t < tr.steps.size(); ++t) {
      if (!tr.trace[t].accepted) continue;
      const Vector& x = tr.iterates[t];
      const double m = tr_model(Q->dense_hessian(x), Q->gradient(x), tr.steps[t]);
      if (!geq(Q->value(x) - Q->value(x + tr.steps[t]), -tc.eta * m)) tally.note(tag + " TR recomputed decrease");
    }

    for (ArcMode mode : {ArcMode::standard, ArcMode::optimal}) {
      ARCConfig ac;
      ac.tol = {1e-6, 1e-3};
      ac.mode = mode;
      ac.sigma0 = std::ldexp(1.0, static_cast<int>(uniform(rng, -4, 4)));
      ac.record_path = true;
      const SolveResult arc = run_arc(*Q, exact_hessian_source(Q), x0, ac, k);
      ++tally.runs;
      check_powers(tally, arc.trace, ac.sigma0, false, tag + " ARC");
      check_decrease(tally, arc.trace, ac.eta, tag + " ARC");
      // Path Lipschitz estimate: analytic bound per trial segment, verified
      // against Hessian difference quotients along the segment.
      double L = 0.0;
      for (std::size_t t = 0; t < arc.steps.size(); ++t) {
        const Vector& x = arc.iterates[t];
        const Vector& s = arc.steps[t];
        const double Ls = QuarticSaddle::segment_lipschitz(x, s);
        for (int j = 1; j <= 16; ++j) {
          const double a = j / 16.0;
          const double q = spectral_norm(Q->dense_hessian(x + a * s) - Q->dense_hessian(x));
          if (q > Ls * a * s.norm() * (1 + 1e-12)) tally.note(tag + " Lipschitz estimate not an upper bound");
        }
        L = std::max(L, Ls);
        if (arc.trace[t].accepted) {
          const double m = cubic_model(Q->dense_hessian(x), Q->gradient(x), arc.trace[t].radius_or_sigma, s);
          if (!geq(Q->value(x) - Q->value(x + s), -ac.eta * m)) tally.note(tag + " ARC recomputed decrease");
        }
      }
      const double ceiling = arc_sigma_ceiling(ac.sigma0, ac.gamma, L);
      for (const IterationRecord& rec : arc.trace) {
        worst_sigma_ratio = std::max(worst_sigma_ratio, rec.radius_or_sigma / ceiling);
      }
    }
  }

  // Sampled finite-sum runs follow the same identities.
  for (const char* problem : {"biweight", "nls_logistic"}) {
    for (const char* solver : {"tr", "arc"}) {
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const ExperimentConfig cfg = parse_config(fmt("problem = %s\nsolver = %s\nn = 1000\nd = 50\nx0 = random\n"
                                                      "hessian = uniform_with_replacement\neps_g = 1e-4\n"
                                                      "eps_H = 1e-2\n",
                                                      problem, solver));
        const RunSummary s = run_solver(cfg, make_problem(cfg, seed), seed);
        const bool tr = cfg.solver == SolverKind::tr;
        const std::string tag = fmt("%s %s seed %llu", problem, solver, static_cast<unsigned long long>(seed));
        ++tally.runs;
        check_powers(tally, s.result.trace, tr ? cfg.tr.delta0 : cfg.arc.sigma0, tr, tag);
        check_decrease(tally, s.result.trace, tr ? cfg.tr.eta : cfg.arc.eta, tag);
      }
    }
  }

  Outcome o;
  o.pass = tally.bad.empty() && worst_sigma_ratio <= 1.0;
  o.detail = fmt("%zu runs, %zu records, %zu accepted steps; max sigma_t / max{sigma0, 2 gamma L} = %.3f",
                 tally.runs, tally.records, tally.accepted, worst_sigma_ratio);
  for (const auto& b : tally.bad) o.detail += "; violation: " + b;
  return o;
}

// ---------------------------------------------------------------------------

Outcome criterion6() {
  int exact_runs = 0, exact_ok = 0, sampled_runs = 0, sampled_ok = 0, sampled_strict = 0;
  double delta = 0.0, max_eps = 0.0;
  std::string exact_fail;
  for (const char* problem : {"biweight", "nls_logistic"}) {
    for (const char* solver : {"tr", "arc"}) {
      for (const char* hessian : {"exact", "uniform_with_replacement"}) {
        const ExperimentConfig cfg = parse_config(fmt("problem = %s\nsolver = %s\nhessian = %s\nn = 1000\nd = 50\n"
                                                      "x0 = random\neps_g = 1e-4\neps_H = 1e-2\n",
                                                      problem, solver, hessian));
        delta = cfg.solver == SolverKind::tr ? cfg.tr.delta_total : cfg.arc.delta_total;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
          const ProblemInstance p = make_problem(cfg, seed);
          const RunSummary s = run_solver(cfg, p, seed);
          const Vector& x = s.result.x;
          const double gnorm = p.objective->gradient(x).norm();
          const double lmin = lambda_min(p.objective->dense_hessian(x));
          const bool exact = !cfg.hessian.has_value();
          const double eps = exact ? 0.0 : s.result.final_epsilon;
          const bool ok = gnorm <= 1e-4 && lmin >= -(eps + 1e-2);
          if (exact) {
            ++exact_runs;
            exact_ok += ok;
            if (!ok && exact_fail.size() < 200) {
              exact_fail += fmt(" %s/%s seed %llu (|g|=%.1e, lambda_min=%.2e, %s);", problem, solver,
                                static_cast<unsigned long long>(seed), gnorm, lmin, to_string(s.result.status));
            }
          } else {
            ++sampled_runs;
            sampled_ok += ok;
            sampled_strict += gnorm <= 1e-4 && lmin >= -1e-2;
            max_eps = std::max(max_eps, eps);
          }
        }
      }
    }
  }
  const double fraction = static_cast<double>(sampled_ok) / sampled_runs;
  Outcome o;
  o.pass = exact_ok == exact_runs && fraction >= 1 - delta;
  o.detail = fmt("exact %d/%d optimal; sampled %d/%d = %.3f (need >= %.2f), largest final eps %.3g; sampled runs "
                 "meeting the eps = 0 check: %d/%d",
                 exact_ok, exact_runs, sampled_ok, sampled_runs, fraction, 1 - delta, max_eps, sampled_strict,
                 sampled_runs);
  if (!exact_fail.empty()) o.detail += "; exact failures:" + exact_fail;
  return o;
}

// ---------------------------------------------------------------------------

// Fourth-order central difference of a vector-valued map along coordinate i.
template <class Map>
auto fd(const Map& f, const Vector& x, Index i) -> decltype(f(x)) {
  const double h = 1e-3 * std::max(1.0, std::abs(x[i]));
  auto at = [&](double c) {
    Vector y = x;
    y[i] += c * h;
    return f(y);
  };
  using R = decltype(f(x));
  return R((at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * h));
}

double rel(const Vector& a, const Vector& b) { return (a - b).norm() / a.norm(); }
double rel(const Matrix& a, const Matrix& b) { return (a - b).norm() / a.norm(); }

Outcome criterion7() {
  std::mt19937_64 rng(7007);
  double worst = 0.0;
  std::string where;
  auto track = [&](double e, const std::string& w) {
    if (e > worst) worst = e, where = w;
  };

  std::vector<std::pair<std::string, std::shared_ptr<const Objective>>> objectives;
  for (LossKind kind : {LossKind::biweight, LossKind::nls_logistic}) {
    SyntheticSpec spec;
    spec.loss = kind;
    spec.n = 200;
    spec.d = 10;
    spec.seed = 7;
    objectives.emplace_back(to_string(kind), std::make_shared<FiniteSumProblem>(generate_synthetic(spec)));
  }
  objectives.emplace_back("quartic", std::make_shared<QuarticSaddle>());
  objectives.emplace_back("quadratic", std::make_shared<Quadratic>(symmetric(rng, 6), gaussian(rng, 6)));

  for (const auto& [name, F] : objectives) {
    for (int k = 0; k < 10; ++k) {
      const Vector x = gaussian(rng, F->dim(), 1.5);
      const Vector g = F->gradient(x);
      const Matrix H = F->dense_hessian(x);
      Vector gfd(F->dim());
      Matrix Hfd(F->dim(), F->dim());
      for (Index i = 0; i < F->dim(); ++i) {
        gfd[i] = fd([&](const Vector& y) { return F->value(y); }, x, i);
        Hfd.col(i) = fd([&](const Vector& y) { return Vector(F->gradient(y)); }, x, i);
      }
      track(rel(g, gfd), name + " gradient");
      track(rel(H, Hfd), name + " Hessian");
      // operator form against its dense form
      const Vector v = gaussian(rng, F->dim());
      track(rel(Vector(H * v), F->hessian(x).apply(v)), name + " Hessian-vector product");
    }
  }

  // Scalar losses and the per-row bounds K_i = sup|f''| ||a_i||^2.
  std::size_t probes = 0, violations = 0, printed_bound_violations = 0;
  for (LossKind kind : {LossKind::biweight, LossKind::nls_logistic}) {
    const ScalarLoss loss = make_loss(kind);
    for (int k = 0; k < 1000; ++k) {
      const double z = uniform(rng, -6, 6);
      const double b = kind == LossKind::biweight ? uniform(rng, -3, 3) : (k % 2 ? 1.0 : 0.0);
      const ScalarEval e = loss.eval(z, b);
      auto d1 = [&](double t) { return loss.eval(t, b).value; };
      auto d2 = [&](double t) { return loss.eval(t, b).first; };
      auto sfd = [](const std::function<double(double)>& f, double t) {
        const double h = 1e-3;
        return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h);
      };
      const double f1 = sfd(d1, z), f2 = sfd(d2, z);
      track(std::abs(e.first - f1) / std::max(std::abs(e.first), 1e-3), std::string(loss.name) + " f'");
      track(std::abs(e.second - f2) / std::max(std::abs(e.second), 1e-3), std::string(loss.name) + " f''");
    }
    SyntheticSpec spec;
    spec.loss = kind;
    spec.n = 500;
    spec.d = 20;
    spec.skew = 10;
    const FiniteSumProblem P = generate_synthetic(spec);
    std::uniform_int_distribution<Index> pick(0, static_cast<Index>(P.num_samples()) - 1);
    for (int k = 0; k < 10000; ++k) {
      const Index i = pick(rng);
      const Vector x = gaussian(rng, spec.d, std::exp(uniform(rng, -3, 3)));
      const Vector a = P.rows().row(i).transpose();
      const double z = a.dot(x);
      const double f2 = std::abs(loss.eval(z, P.targets()[i]).second);
      ++probes;
      if (f2 * a.squaredNorm() > P.K()[i]) ++violations;
      if (kind == LossKind::biweight && f2 > 1.0 / (6 * std::sqrt(3.0))) ++printed_bound_violations;
    }
  }
  std::printf("info: bi-weight curvature exceeds the printed table constant 1/(6 sqrt 3) on %zu of 10000 probes; "
              "K_i uses sup|f''| = 2 (attained at zero residual)\n",
              printed_bound_violations);

  Outcome o;
  o.pass = worst <= 1e-6 && violations == 0;
  o.detail = fmt("max relative derivative error %.2e (%s); %zu K_i probes, %zu violations", worst, where.c_str(),
                 probes, violations);
  return o;
}

// ---------------------------------------------------------------------------

Outcome criterion8() {
  std::size_t accepted = 0, bad = 0, full_dim = 0, instances = 0;
  double worst_ratio = 0.0, worst_grad = 0.0;
  auto check_run = [&](const Objective& F, const SolveResult& r, double zeta) {
    for (std::size_t t = 0; t < r.steps.size(); ++t) {
      if (!r.trace[t].accepted) continue;
      ++accepted;
      const Vector& x = r.iterates[t];
      const Vector& s = r.steps[t];
      const Vector g = F.gradient(x);
      const double sigma = r.trace[t].radius_or_sigma;
      const Vector gm = g + F.hessian(x).apply(s) + sigma * s.norm() * s;
      const double bound = zeta * std::max(s.squaredNorm(), std::min(1.0, s.norm()) * g.norm());
      worst_ratio = std::max(worst_ratio, gm.norm() / bound);
      if (!geq(bound, gm.norm())) ++bad;
    }
  };

  auto Q = std::make_shared<QuarticSaddle>();
  std::mt19937_64 rng(8008);
  ARCConfig ac;
  ac.mode = ArcMode::optimal;
  ac.tol = {1e-6, 1e-3};
  ac.record_path = true;
  for (int k = 0; k < 30; ++k) {
    check_run(*Q, run_arc(*Q, exact_hessian_source(Q), gaussian(rng, 2, 2.0), ac, k), ac.zeta);
  }
  for (const char* problem : {"biweight", "nls_logistic"}) {
    const ExperimentConfig cfg = parse_config(
        fmt("problem = %s\nsolver = arc\narc_mode = optimal\nn = 1000\nd = 50\nx0 = random\neps_g = 1e-4\n"
            "eps_H = 1e-2\n",
            problem));
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const ProblemInstance p = make_problem(cfg, seed);
      ARCConfig c = cfg.arc;
      c.record_path = true;
      check_run(*p.objective, run_arc(*p.objective, exact_hessian_source(p.objective), p.x0, c, seed), c.zeta);
    }
  }

  // d = 2: a tiny zeta forces growth to the full space, where the solve is exact.
  for (int k = 0; k < 50; ++k) {
    const Matrix B = symmetric(rng, 2);
    const Vector g = gaussian(rng, 2);
    const double sigma = std::exp(uniform(rng, -2, 2));
    const CubicModel m{g, HessianOperator::dense(B), sigma};
    const SubproblemSolution sol = arc_progressive_solve(m, {arc_cauchy_point(m).step, std::nullopt}, 1e-12, 2);
    ++instances;
    const Vector gm = g + B * sol.step + sigma * sol.step.norm() * sol.step;
    worst_grad = std::max(worst_grad, gm.norm());
    if (sol.subspace_dim == 2) ++full_dim;
  }
  Outcome o;
  o.pass = bad == 0 && accepted > 0 && full_dim == instances && worst_grad <= 1e-8;
  o.detail = fmt("%zu accepted optimal-mode steps, %zu violations, max ||grad m|| / bound = %.3f; d=2: %zu/%zu at "
                 "full dimension, max ||grad m(s)|| = %.1e",
                 accepted, bad, worst_ratio, full_dim, instances, worst_grad);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  struct Entry {
    int id;
    Outcome (*run)();
    double budget_seconds;  // 0: no runtime limit
  };
  const std::vector<Entry> entries{{1, criterion1, 10}, {2, criterion2, 60}, {3, criterion3, 300},
                                   {4, criterion4, 5},  {5, criterion5, 0},  {6, criterion6, 600},
                                   {7, criterion7, 0},  {8, criterion8, 0}};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  bool all = true;
  std::vector<std::string> lines;
  for (const Entry& e : entries) {
    if (!selected.empty() && !selected.count(e.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = e.run();
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail = std::string("exception: ") + ex.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (e.budget_seconds > 0 && secs > e.budget_seconds) {
      o.pass = false;
      o.detail += fmt("; runtime %.1f s over the %.0f s budget", secs, e.budget_seconds);
    }
    all = all && o.pass;
    const std::string line =
        fmt("criterion %d: %s (%.1f s) ", e.id, o.pass ? "PASS" : "FAIL", secs) + o.detail;
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    lines.push_back(line);
  }
  std::printf("\nsummary:\n");
  for (const auto& l : lines) std::printf("%s\n", l.substr(0, l.find(')') + 1).c_str());
  return all ? 0 : 1;
}
