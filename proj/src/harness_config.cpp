#include "inewton/harness.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace inewton {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
  fail(ErrorCode::configuration, "invalid value '" + value + "' for key '" + key + "': " + why);
}

double to_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.empty()) bad_value(key, value, "expected a number");
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x)) {
    bad_value(key, value, "expected a finite number");
  }
  return x;
}

long long to_integer(const std::string& key, const std::string& value, long long lo) {
  const std::string v = trim(value);
  if (v.empty()) bad_value(key, value, "expected an integer");
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || errno == ERANGE) bad_value(key, value, "expected an integer");
  if (x < lo) bad_value(key, value, "must be at least " + std::to_string(lo));
  return x;
}

std::uint64_t to_seed(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.empty() || v[0] == '-') bad_value(key, value, "expected a nonnegative integer");
  errno = 0;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || errno == ERANGE) {
    bad_value(key, value, "expected a nonnegative integer");
  }
  return x;
}

bool to_bool(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, value, "expected true or false");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) out.push_back(to_double(key, item));
  if (out.empty()) bad_value(key, value, "expected a comma-separated list");
  return out;
}

template <class F>
auto rethrow_as(const std::string& key, const std::string& value, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    bad_value(key, value, e.what());
  }
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

struct KeySpec {
  std::string name;
  std::string help;
  Setter set;
};

template <class Fn>
Setter both_solvers(Fn fn) {
  return [fn](ExperimentConfig& c, const std::string& k, const std::string& v) {
    fn(c.tr, c.arc, k, v);
  };
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      {"problem", "quartic | quadratic | biweight | nls_logistic",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "quartic") c.problem = ProblemKind::quartic;
         else if (v == "quadratic") c.problem = ProblemKind::quadratic;
         else if (v == "biweight") c.problem = ProblemKind::biweight;
         else if (v == "nls_logistic") c.problem = ProblemKind::nls_logistic;
         else bad_value(k, v, "expected quartic, quadratic, biweight or nls_logistic");
         if (c.problem == ProblemKind::biweight) c.synthetic.loss = LossKind::biweight;
         if (c.problem == ProblemKind::nls_logistic) c.synthetic.loss = LossKind::nls_logistic;
       }},
      {"data", "dataset path; synthetic data is generated when absent",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.data_path = v; }},
      {"data_format", "csv | svmlight",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.data_format = rethrow_as(k, v, [&] { return parse_format(v); });
       }},
      {"data_dim", "svmlight feature dimension override",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.data_dim = static_cast<Index>(to_integer(k, v, 1));
       }},
      {"n", "synthetic rows",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.synthetic.n = static_cast<Index>(to_integer(k, v, 1));
       }},
      {"d", "synthetic dimension",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.synthetic.d = static_cast<Index>(to_integer(k, v, 1));
       }},
      {"skew", "squared-norm multiplier for 1% of synthetic rows",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.synthetic.skew = to_double(k, v);
         if (!(c.synthetic.skew >= 1.0)) bad_value(k, v, "must be at least 1");
       }},
      {"kmax", "rescale synthetic rows so that K_max equals this (0 keeps the raw scale)",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.synthetic.kmax = to_double(k, v);
         if (c.synthetic.kmax < 0.0) bad_value(k, v, "must be nonnegative");
       }},
      {"noise", "synthetic regression noise level",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.synthetic.noise = to_double(k, v);
         if (c.synthetic.noise < 0.0) bad_value(k, v, "must be nonnegative");
       }},
      {"data_seed", "synthetic generator seed",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.synthetic.seed = to_seed(k, v);
       }},
      {"quadratic_diag", "diagonal of Q for the quadratic problem (comma list)",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.quadratic_diag = to_doubles(k, v);
       }},
      {"quadratic_linear", "linear term c of the quadratic problem (comma list)",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.quadratic_linear = to_doubles(k, v);
       }},
      {"x0", "zeros | random | comma list of coordinates",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "zeros" || v == "random") {
           c.x0_kind = v;
           c.x0_values.clear();
         } else {
           c.x0_kind = "values";
           c.x0_values = to_doubles(k, v);
         }
       }},
      {"x0_scale", "standard deviation of a random x0",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.x0_scale = to_double(k, v);
         if (!(c.x0_scale > 0.0)) bad_value(k, v, "must be positive");
       }},
      {"solver", "tr | arc",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "tr") c.solver = SolverKind::tr;
         else if (v == "arc") c.solver = SolverKind::arc;
         else bad_value(k, v, "expected tr or arc");
       }},
      {"arc_mode", "standard | optimal",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "standard") c.arc.mode = ArcMode::standard;
         else if (v == "optimal") c.arc.mode = ArcMode::optimal;
         else bad_value(k, v, "expected standard or optimal");
       }},
      {"hessian",
       "exact | uniform | uniform_without_replacement | uniform_with_replacement | nonuniform | "
       "intrinsic | nonuniform_intrinsic",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "exact") {
           c.hessian.reset();
         } else {
           c.hessian = rethrow_as(k, v, [&] { return parse_sample_mode(v); });
         }
       }},
      {"sample_cap", "cap with-replacement sample sizes at n",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.sample_cap = to_bool(k, v); }},
      {"sample_epsilon", "fixed accuracy for sample sizes instead of the solver's eps_t",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.sample_epsilon = to_double(k, v);
         if (!(*c.sample_epsilon > 0.0)) bad_value(k, v, "must be positive");
       }},
      {"sample_size", "fixed |S|, bypassing the bounds",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.sample_size = static_cast<std::size_t>(to_integer(k, v, 1));
       }},
      {"delta", "overall failure probability",
       both_solvers([](TRConfig& tr, ARCConfig& arc, const std::string& k, const std::string& v) {
         tr.delta_total = arc.delta_total = to_double(k, v);
       })},
      {"eps_g", "gradient tolerance",
       both_solvers([](TRConfig& tr, ARCConfig& arc, const std::string& k, const std::string& v) {
         tr.tol.eps_g = arc.tol.eps_g = to_double(k, v);
       })},
      {"eps_H", "curvature tolerance",
       both_solvers([](TRConfig& tr, ARCConfig& arc, const std::string& k, const std::string& v) {
         tr.tol.eps_H = arc.tol.eps_H = to_double(k, v);
       })},
      {"eta", "acceptance threshold",
       both_solvers([](TRConfig& tr, ARCConfig& arc, const std::string& k, const std::string& v) {
         tr.eta = arc.eta = to_double(k, v);
       })},
      {"gamma", "radius / regularization update factor",
       both_solvers([](TRConfig& tr, ARCConfig& arc, const std::string& k, const std::string& v) {
         tr.gamma = arc.gamma = to_double(k, v);
       })},
      {"nu", "curvature-probe quality parameter",
       both_solvers([](TRConfig& tr, ARCConfig& arc, const std::string& k, const std::string& v) {
         tr.nu = arc.nu = to_double(k, v);
       })},
      {"max_iters", "iteration budget",
       both_solvers([](TRConfig& tr, ARCConfig& arc, const std::string& k, const std::string& v) {
         tr.max_iters = arc.max_iters = static_cast<int>(to_integer(k, v, 0));
       })},
      {"reuse_hessian", "keep H after a rejected step when its accuracy suffices",
       both_solvers([](TRConfig& tr, ARCConfig& arc, const std::string& k, const std::string& v) {
         tr.reuse_hessian = arc.reuse_hessian = to_bool(k, v);
       })},
      {"lanczos_max_matvecs", "Lanczos budget (0 = automatic)",
       both_solvers([](TRConfig& tr, ARCConfig& arc, const std::string& k, const std::string& v) {
         tr.lanczos_max_matvecs = arc.lanczos_max_matvecs = static_cast<int>(to_integer(k, v, 0));
       })},
      {"delta0", "initial trust-region radius",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.tr.delta0 = to_double(k, v); }},
      {"alpha", "trust-region split of eps_H between operator and probe",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.tr.alpha = to_double(k, v); }},
      {"theory_strict", "require eps_H <= sqrt(eps_g)",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.tr.theory_strict = to_bool(k, v);
       }},
      {"sigma0", "initial cubic regularization",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.arc.sigma0 = to_double(k, v); }},
      {"sigma_min", "lower guard on sigma",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.arc.sigma_min = to_double(k, v);
       }},
      {"zeta", "step-gradient parameter of the optimal mode, in (0, 1/2)",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.arc.zeta = to_double(k, v); }},
      {"L_estimate", "Hessian Lipschitz constant (estimated at x0 when absent)",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.arc.L_estimate = to_double(k, v);
       }},
      {"max_subspace_dim", "largest Krylov dimension of the progressive cubic solve",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.arc.max_subspace_dim = static_cast<int>(to_integer(k, v, 1));
       }},
      {"seed", "solver seed",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.seed = to_seed(k, v); }},
      {"out", "trace CSV path",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.out_path = v; }},
      {"trials", "number of seeds for compare",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.trials = static_cast<int>(to_integer(k, v, 1));
       }},
      {"verify_epsilons", "accuracy grid for verify-sampling (comma list)",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.verify_epsilons = to_doubles(k, v);
         for (double e : c.verify_epsilons) {
           if (!(e > 0.0)) bad_value(k, v, "entries must be positive");
         }
       }},
      {"verify_deltas", "failure-probability grid for verify-sampling (comma list)",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.verify_deltas = to_doubles(k, v);
         for (double d : c.verify_deltas) {
           if (!(d > 0.0 && d < 1.0)) bad_value(k, v, "entries must lie in (0,1)");
         }
       }},
      {"verify_modes", "sampling modes for verify-sampling (comma list)",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.verify_modes.clear();
         for (const auto& item : split_list(v)) {
           c.verify_modes.push_back(rethrow_as(k, v, [&] { return parse_sample_mode(item); }));
         }
         if (c.verify_modes.empty()) bad_value(k, v, "expected at least one mode");
       }},
      {"verify_trials", "draws per grid point",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.verify_trials = static_cast<int>(to_integer(k, v, 1));
       }},
      {"verify_point", "zeros | random: where the Hessian is sampled",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v != "zeros" && v != "random") bad_value(k, v, "expected zeros or random");
         c.verify_point = v;
       }},
      {"verify_control", "add quartered-|S| negative-control rows",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.verify_control = to_bool(k, v);
       }},
      {"verify_max_dim", "largest d accepted by verify-sampling",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.verify_max_dim = static_cast<Index>(to_integer(k, v, 1));
       }},
  };
  return table;
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& config_keys() {
  static const std::vector<std::pair<std::string, std::string>> keys = [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& spec : key_table()) out.emplace_back(spec.name, spec.help);
    return out;
  }();
  return keys;
}

void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
  for (const auto& spec : key_table()) {
    if (spec.name == key) {
      spec.set(config, key, trim(value));
      config.keys.push_back(key);
      return;
    }
  }
  fail(ErrorCode::configuration, "unknown key '" + key + "'");
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto where = origin + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::configuration, where + "expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(ErrorCode::configuration, where + "missing key before '='");
    if (!seen.insert(key).second) fail(ErrorCode::configuration, where + "duplicate key '" + key + "'");
    try {
      set_config_value(config, key, value);
    } catch (const Error& e) {
      fail(ErrorCode::configuration, where + e.what());
    }
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace inewton
