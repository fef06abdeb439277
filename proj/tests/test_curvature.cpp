#include "doctest.h"
#include "test_util.hpp"

#include "inewton/curvature.hpp"

#include <cmath>

using namespace inewton;

TEST_CASE("lanczos budget formula") {
  // ceil(log(d/delta) sqrt(K/kappa))
  CHECK(lanczos_budget(100, 4.0, 0.25, 0.01) == static_cast<int>(std::ceil(std::log(1e4) * 4.0)));
  CHECK(lanczos_budget(2, 1e-12, 0.5, 0.5) == 1);
  CHECK_THROWS_AS(lanczos_budget(10, 1.0, 0.0, 0.1), Error);
  CHECK_THROWS_AS(lanczos_budget(10, 1.0, 0.5, 1.0), Error);
}

TEST_CASE("lanczos matches the dense bottom eigenvalue") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 5 + trial;
    const Matrix m = testutil::symmetric(rng, d);
    const HessianOperator H = HessianOperator::dense(m);
    const CurvatureResult r = lanczos_extreme(H, 0.25, 0.01, static_cast<int>(d), 100 + trial);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    CHECK(r.rayleigh == doctest::Approx(es.eigenvalues()[0]).epsilon(1e-8));
    CHECK(r.direction.norm() == doctest::Approx(1.0));
    CHECK(r.direction.dot(m * r.direction) == doctest::Approx(r.rayleigh).epsilon(1e-10));
  }
}

TEST_CASE("negative curvature direction certificate") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const Index d = 8;
    Matrix m = testutil::symmetric(rng, d);
    const double lmin = dense_lambda_min(m);
    const HessianOperator H = HessianOperator::dense(m);
    const double eps_H = 0.05;
    const double nu = std::max(0.9, min_valid_nu(H.norm_bound(), eps_H));
    const auto dir = negative_curvature_direction(H, eps_H, nu, 0.01, 7 + trial);
    if (lmin < -eps_H) {
      REQUIRE(dir.has_value());
      CHECK(dir->direction.dot(m * dir->direction) <= -nu * eps_H * (1 + 1e-12));
    }
    if (dir) CHECK(dir->rayleigh <= -nu * eps_H);
  }
}

TEST_CASE("no direction on positive definite operators") {
  Matrix m = Matrix::Identity(6, 6);
  m(0, 0) = 1e-4;
  const HessianOperator H = HessianOperator::dense(m);
  CHECK_FALSE(negative_curvature_direction(H, 1e-3, 1.0, 0.1, 1).has_value());

  const CurvatureProbe probe = make_lanczos_probe(0.9, 0.1, 3);
  const CurvatureProbeOutcome out = probe(H, 1e-3);
  CHECK_FALSE(out.direction.has_value());
  CHECK(out.converged);
  CHECK(out.rayleigh == doctest::Approx(1e-4).epsilon(1e-6));
}

TEST_CASE("nu validity") {
  CHECK(min_valid_nu(1.0, 1.0) == doctest::Approx(2.0 / 3.0));
  const HessianOperator H = HessianOperator::dense(Matrix::Identity(3, 3));
  CHECK_THROWS_AS(negative_curvature_direction(H, 1.0, 0.5, 0.1, 1), Error);
  CHECK_THROWS_AS(negative_curvature_direction(H, 1.0, 1.5, 0.1, 1), Error);
  CHECK_NOTHROW(negative_curvature_direction(H, 1.0, 0.7, 0.1, 1));
}

TEST_CASE("probe raises nu to the admissible floor") {
  const HessianOperator H = HessianOperator::dense(Matrix::Identity(3, 3) * 10.0);
  const CurvatureProbeOutcome out = make_lanczos_probe(0.5, 0.1, 1)(H, 1e-2);
  CHECK(out.nu == doctest::Approx(min_valid_nu(10.0, 1e-2)));
}

TEST_CASE("lanczos is deterministic per seed") {
  std::mt19937_64 rng(13);
  const Matrix m = testutil::symmetric(rng, 30);
  const HessianOperator H = HessianOperator::dense(m);
  const CurvatureResult a = lanczos_extreme(H, 0.4, 0.1, 10, 99);
  const CurvatureResult b = lanczos_extreme(H, 0.4, 0.1, 10, 99);
  CHECK(a.rayleigh == b.rayleigh);
  CHECK(a.direction == b.direction);
  CHECK(a.iterations_used <= 10);
}
