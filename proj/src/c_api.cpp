#include "inewton/inewton.h"

#include "inewton/harness.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <new>
#include <string>

struct inw_config {
  inewton::ExperimentConfig config;
};

struct inw_result {
  inewton::ExperimentConfig config;
  inewton::RunSummary summary;
  std::string trace_csv;
};

struct inw_report {
  std::string text;
  bool passed = false;
};

namespace {

thread_local std::string last_error;

inw_status code_for(inewton::ErrorCode code) {
  using inewton::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_input: return INW_ERR_INVALID_ARGUMENT;
    case ErrorCode::configuration: return INW_ERR_CONFIG;
    case ErrorCode::parse: return INW_ERR_PARSE;
    case ErrorCode::io: return INW_ERR_IO;
    case ErrorCode::numerical: return INW_ERR_NUMERICAL;
    case ErrorCode::certificate_violation: return INW_ERR_CERTIFICATE;
    case ErrorCode::internal: return INW_ERR_INTERNAL;
  }
  return INW_ERR_INTERNAL;
}

template <class F>
inw_status guarded(F&& body) {
  last_error.clear();
  try {
    body();
    return INW_OK;
  } catch (const inewton::Error& e) {
    last_error = e.what();
    return code_for(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return INW_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return INW_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return INW_ERR_INTERNAL;
  }
}

inw_status null_argument(const char* what) {
  last_error = std::string("null argument: ") + what;
  return INW_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* inw_version(void) { return "0.1.0"; }

const char* inw_last_error(void) { return last_error.c_str(); }

const char* inw_status_name(inw_status status) {
  switch (status) {
    case INW_OK: return "ok";
    case INW_ERR_INVALID_ARGUMENT: return "invalid argument";
    case INW_ERR_CONFIG: return "configuration error";
    case INW_ERR_PARSE: return "parse error";
    case INW_ERR_IO: return "i/o error";
    case INW_ERR_NUMERICAL: return "numerical error";
    case INW_ERR_CERTIFICATE: return "certificate violation";
    case INW_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

inw_status inw_config_load(const char* path, inw_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new inw_config{inewton::load_config(path)}; });
}

inw_status inw_config_parse(const char* text, inw_config** out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new inw_config{inewton::parse_config(text)}; });
}

inw_status inw_config_set(inw_config* config, const char* key, const char* value) {
  if (!config) return null_argument("config");
  if (!key) return null_argument("key");
  if (!value) return null_argument("value");
  return guarded([&] {
    // Apply to a copy so a rejected value leaves the handle untouched.
    inewton::ExperimentConfig next = config->config;
    inewton::set_config_value(next, key, value);
    config->config = std::move(next);
  });
}

void inw_config_free(inw_config* config) { delete config; }

inw_status inw_solve(const inw_config* config, inw_result** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto* r = new inw_result{config->config, {}, {}};
    try {
      inewton::ExperimentConfig no_write = config->config;
      no_write.out_path.clear();
      r->summary = inewton::run_experiment(no_write);
      r->trace_csv = inewton::format_trace(r->config, r->summary);
      if (!r->config.out_path.empty()) {
        std::ofstream f(r->config.out_path, std::ios::binary | std::ios::trunc);
        if (!f || !(f << r->trace_csv)) {
          inewton::fail(inewton::ErrorCode::io, "cannot write trace file '" + r->config.out_path + "'");
        }
      }
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

inw_solve_status inw_result_status(const inw_result* result) {
  if (!result) return INW_SOLVE_NUMERICAL_FAILURE;
  switch (result->summary.result.status) {
    case inewton::SolveStatus::converged: return INW_SOLVE_CONVERGED;
    case inewton::SolveStatus::max_iterations: return INW_SOLVE_MAX_ITERATIONS;
    case inewton::SolveStatus::numerical_failure: return INW_SOLVE_NUMERICAL_FAILURE;
    case inewton::SolveStatus::stalled: return INW_SOLVE_STALLED;
  }
  return INW_SOLVE_NUMERICAL_FAILURE;
}

int inw_result_converged(const inw_result* result) {
  return result && result->summary.result.converged() ? 1 : 0;
}

size_t inw_result_successes(const inw_result* result) {
  return result ? result->summary.result.successes : 0;
}

size_t inw_result_failures(const inw_result* result) {
  return result ? result->summary.result.failures : 0;
}

double inw_result_value(const inw_result* result) {
  return result ? result->summary.result.F_value : std::numeric_limits<double>::quiet_NaN();
}

double inw_result_grad_norm(const inw_result* result) {
  return result ? result->summary.final_grad_norm : std::numeric_limits<double>::quiet_NaN();
}

double inw_result_lambda_min(const inw_result* result) {
  if (!result || !result->summary.dense_lambda_min) return std::numeric_limits<double>::quiet_NaN();
  return *result->summary.dense_lambda_min;
}

double inw_result_final_epsilon(const inw_result* result) {
  return result ? result->summary.result.final_epsilon : std::numeric_limits<double>::quiet_NaN();
}

size_t inw_result_hessian_cost(const inw_result* result) {
  return result ? result->summary.result.hessian_cost : 0;
}

size_t inw_result_dim(const inw_result* result) {
  return result ? static_cast<size_t>(result->summary.result.x.size()) : 0;
}

inw_status inw_result_x(const inw_result* result, double* out, size_t len) {
  if (!result) return null_argument("result");
  if (!out) return null_argument("out");
  const auto& x = result->summary.result.x;
  if (len != static_cast<size_t>(x.size())) {
    last_error = "buffer length " + std::to_string(len) + " does not match dimension " +
                 std::to_string(x.size());
    return INW_ERR_INVALID_ARGUMENT;
  }
  for (size_t i = 0; i < len; ++i) out[i] = x[static_cast<Eigen::Index>(i)];
  return INW_OK;
}

size_t inw_result_trace_length(const inw_result* result) {
  return result ? result->summary.result.trace.size() : 0;
}

inw_status inw_result_record(const inw_result* result, size_t index, inw_record* out) {
  if (!result) return null_argument("result");
  if (!out) return null_argument("out");
  const auto& trace = result->summary.result.trace;
  if (index >= trace.size()) {
    last_error = "record index " + std::to_string(index) + " out of range";
    return INW_ERR_INVALID_ARGUMENT;
  }
  const inewton::IterationRecord& r = trace[index];
  *out = inw_record{r.t, r.F_value, r.grad_norm, r.lambda_min_estimate, r.radius_or_sigma,
                    r.rho, r.accepted ? 1 : 0, r.sample_size, r.step_norm, r.eps_t};
  return INW_OK;
}

const char* inw_result_trace_csv(const inw_result* result) {
  return result ? result->trace_csv.c_str() : "";
}

const char* inw_result_diagnostic(const inw_result* result) {
  return result ? result->summary.result.diagnostic.c_str() : "";
}

inw_status inw_result_write_trace(const inw_result* result, const char* path) {
  if (!result) return null_argument("result");
  if (!path) return null_argument("path");
  return guarded([&] {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !(f << result->trace_csv)) {
      inewton::fail(inewton::ErrorCode::io, std::string("cannot write trace file '") + path + "'");
    }
  });
}

void inw_result_free(inw_result* result) { delete result; }

inw_status inw_verify_sampling(const inw_config* config, inw_report** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const inewton::VerifyReport rep = inewton::verify_bounds(config->config);
    *out = new inw_report{rep.text, rep.passed};
  });
}

inw_status inw_compare(const inw_config* config, int trials, inw_report** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const int k = trials > 0 ? trials : config->config.trials;
    const inewton::CompareReport rep = inewton::compare_exact_vs_sampled(config->config, k);
    *out = new inw_report{rep.text, rep.passed};
  });
}

const char* inw_report_text(const inw_report* report) { return report ? report->text.c_str() : ""; }

int inw_report_passed(const inw_report* report) { return report && report->passed ? 1 : 0; }

void inw_report_free(inw_report* report) { delete report; }

}  // extern "C"
