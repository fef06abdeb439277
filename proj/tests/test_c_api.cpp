// Exercises the shared library through its C header only.
#include "doctest.h"

#include "inewton/inewton.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

namespace {

struct Config {
  inw_config* p = nullptr;
  ~Config() { inw_config_free(p); }
};

struct Result {
  inw_result* p = nullptr;
  ~Result() { inw_result_free(p); }
};

struct Report {
  inw_report* p = nullptr;
  ~Report() { inw_report_free(p); }
};

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(inw_version()) > 0);
  CHECK(std::string(inw_status_name(INW_OK)) == "ok");
  CHECK(std::string(inw_status_name(INW_ERR_CONFIG)) == "configuration error");
  CHECK(std::string(inw_status_name(static_cast<inw_status>(99))) == "unknown status");
}

TEST_CASE("argument checks") {
  inw_config* cfg = nullptr;
  CHECK(inw_config_parse(nullptr, &cfg) == INW_ERR_INVALID_ARGUMENT);
  CHECK(inw_config_parse("problem = quartic\n", nullptr) == INW_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(inw_last_error()) > 0);
  inw_result* res = nullptr;
  CHECK(inw_solve(nullptr, &res) == INW_ERR_INVALID_ARGUMENT);
  CHECK(res == nullptr);
  inw_config_free(nullptr);
  inw_result_free(nullptr);
  inw_report_free(nullptr);
}

TEST_CASE("config errors") {
  Config c;
  CHECK(inw_config_parse("gama = 2\n", &c.p) == INW_ERR_CONFIG);
  CHECK(c.p == nullptr);
  CHECK(std::string(inw_last_error()).find("unknown key 'gama'") != std::string::npos);
  CHECK(inw_config_load("no/such/file.cfg", &c.p) == INW_ERR_IO);
  REQUIRE(inw_config_parse("problem = quartic\n", &c.p) == INW_OK);
  CHECK(inw_config_set(c.p, "eta", "two") == INW_ERR_CONFIG);
  CHECK(std::string(inw_last_error()).find("'eta'") != std::string::npos);
  CHECK(inw_config_set(c.p, "gama", "2") == INW_ERR_CONFIG);
  CHECK(inw_config_set(c.p, "eta", "0.2") == INW_OK);
  CHECK(inw_last_error()[0] == '\0');
}

TEST_CASE("solve the quartic") {
  Config c;
  REQUIRE(inw_config_parse("problem = quartic\nsolver = arc\narc_mode = optimal\n", &c.p) == INW_OK);
  Result r;
  REQUIRE(inw_solve(c.p, &r.p) == INW_OK);
  CHECK(inw_result_status(r.p) == INW_SOLVE_CONVERGED);
  CHECK(inw_result_converged(r.p) == 1);
  CHECK(inw_result_value(r.p) == doctest::Approx(-0.25));
  CHECK(inw_result_lambda_min(r.p) > 0.0);
  CHECK(inw_result_dim(r.p) == 2);
  std::vector<double> x(2);
  REQUIRE(inw_result_x(r.p, x.data(), x.size()) == INW_OK);
  CHECK(std::abs(std::abs(x[0]) - 1.0) < 1e-6);
  CHECK(inw_result_x(r.p, x.data(), 3) == INW_ERR_INVALID_ARGUMENT);

  const size_t n = inw_result_trace_length(r.p);
  REQUIRE(n >= 2);
  inw_record first{}, last{};
  REQUIRE(inw_result_record(r.p, 0, &first) == INW_OK);
  REQUIRE(inw_result_record(r.p, n - 1, &last) == INW_OK);
  CHECK(first.t == 0);
  CHECK(first.F == 0.0);
  CHECK(std::isnan(last.rho));
  CHECK(inw_result_record(r.p, n, &last) == INW_ERR_INVALID_ARGUMENT);
  CHECK(inw_result_successes(r.p) + inw_result_failures(r.p) == n - 1);

  const std::string csv = inw_result_trace_csv(r.p);
  CHECK(csv.rfind("t,F,grad_norm,", 0) == 0);
  CHECK(csv.find("# status=converged") != std::string::npos);
  CHECK(std::string(inw_result_diagnostic(r.p)).empty());

  const char* path = "inewton_test_capi_trace.csv";
  REQUIRE(inw_result_write_trace(r.p, path) == INW_OK);
  std::FILE* f = std::fopen(path, "rb");
  REQUIRE(f != nullptr);
  std::string back;
  char buf[4096];
  size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) back.append(buf, got);
  std::fclose(f);
  std::remove(path);
  CHECK(back == csv);
  CHECK(inw_result_write_trace(r.p, "no/such/dir/x.csv") == INW_ERR_IO);
}

TEST_CASE("non-converged run is not an error") {
  Config c;
  REQUIRE(inw_config_parse("problem = quartic\nmax_iters = 1\neps_g = 1e-12\nx0 = 0.3, 0.2\n", &c.p) ==
          INW_OK);
  Result r;
  REQUIRE(inw_solve(c.p, &r.p) == INW_OK);
  CHECK(inw_result_status(r.p) == INW_SOLVE_MAX_ITERATIONS);
  CHECK(inw_result_converged(r.p) == 0);
}

TEST_CASE("sampled problems need a finite sum") {
  Config c;
  REQUIRE(inw_config_parse("problem = quartic\nhessian = uniform\n", &c.p) == INW_OK);
  Result r;
  CHECK(inw_solve(c.p, &r.p) == INW_ERR_CONFIG);
  CHECK(r.p == nullptr);
}

TEST_CASE("reports") {
  Config c;
  REQUIRE(inw_config_parse("problem = biweight\nn = 200\nd = 4\nkmax = 1\nverify_epsilons = 0.5\n"
                           "verify_deltas = 0.1\nverify_trials = 20\nverify_modes = uniform\n"
                           "verify_control = false\nhessian = uniform_with_replacement\nx0 = random\n"
                           "eps_g = 1e-5\n",
                           &c.p) == INW_OK);
  Report v;
  REQUIRE(inw_verify_sampling(c.p, &v.p) == INW_OK);
  CHECK(inw_report_passed(v.p) == 1);
  CHECK(std::strlen(inw_report_text(v.p)) > 0);
  Report cmp;
  REQUIRE(inw_compare(c.p, 2, &cmp.p) == INW_OK);
  CHECK(std::string(inw_report_text(cmp.p)).find("cost_ratio") != std::string::npos);
}
