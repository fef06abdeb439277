#include "inewton/problems.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string_view>

namespace inewton {

DataFormat parse_format(const std::string& name) {
  if (name == "csv") return DataFormat::csv;
  if (name == "svmlight") return DataFormat::svmlight;
  fail(ErrorCode::configuration, "unknown data format '" + name + "'");
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << path << ":" << line << ": " << what;
  fail(ErrorCode::parse, os.str());
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  std::string tmp(s);
  char* end = nullptr;
  errno = 0;
  out = std::strtod(tmp.c_str(), &end);
  return end == tmp.c_str() + tmp.size() && errno != ERANGE && std::isfinite(out);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t j = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > j) parts.push_back(s.substr(j, i - j));
  }
  return parts;
}

struct Rows {
  std::vector<std::vector<double>> features;
  std::vector<double> targets;
};

Rows read_csv(std::istream& in, const std::string& path) {
  Rows rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view t = trim(line);
    if (t.empty()) continue;
    const auto fields = split(t, ',');
    std::vector<double> vals(fields.size());
    bool numeric = true;
    for (std::size_t k = 0; k < fields.size() && numeric; ++k) numeric = parse_double(fields[k], vals[k]);
    if (!numeric) {
      if (width == 0 && rows.targets.empty() && lineno == 1) {
        width = fields.size();  // header
        continue;
      }
      parse_fail(path, lineno, "non-numeric field");
    }
    if (fields.size() < 2) parse_fail(path, lineno, "need at least one feature and a target");
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      std::ostringstream os;
      os << "expected " << width << " fields, found " << fields.size();
      parse_fail(path, lineno, os.str());
    }
    rows.targets.push_back(vals.back());
    vals.pop_back();
    rows.features.push_back(std::move(vals));
  }
  return rows;
}

struct SparseRows {
  std::vector<std::vector<std::pair<std::size_t, double>>> entries;
  std::vector<double> targets;
  std::size_t max_index = 0;
};

SparseRows read_svmlight(std::istream& in, const std::string& path) {
  SparseRows rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view t = trim(line);
    if (const auto hash = t.find('#'); hash != std::string_view::npos) t = trim(t.substr(0, hash));
    if (t.empty()) continue;
    const auto tokens = split_ws(t);
    double target = 0.0;
    if (!parse_double(tokens[0], target)) parse_fail(path, lineno, "bad target");
    std::vector<std::pair<std::size_t, double>> row;
    std::size_t prev = 0;
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      const auto colon = tokens[k].find(':');
      if (colon == std::string_view::npos) parse_fail(path, lineno, "expected idx:val");
      const std::string_view is = tokens[k].substr(0, colon);
      std::size_t idx = 0;
      const auto [p, ec] = std::from_chars(is.data(), is.data() + is.size(), idx);
      if (ec != std::errc() || p != is.data() + is.size() || idx == 0) {
        parse_fail(path, lineno, "bad feature index (indices are 1-based)");
      }
      if (idx <= prev) parse_fail(path, lineno, "feature indices must increase");
      prev = idx;
      double v = 0.0;
      if (!parse_double(tokens[k].substr(colon + 1), v)) parse_fail(path, lineno, "bad feature value");
      row.emplace_back(idx, v);
      rows.max_index = std::max(rows.max_index, idx);
    }
    rows.targets.push_back(target);
    rows.entries.push_back(std::move(row));
  }
  return rows;
}

void check_targets(const Vector& b, LossKind loss, const std::string& path) {
  if (loss != LossKind::nls_logistic) return;
  for (Index i = 0; i < b.size(); ++i) {
    if (b[i] != 0.0 && b[i] != 1.0) {
      std::ostringstream os;
      os << path << ": classification targets must be 0 or 1 (sample " << i + 1 << ")";
      fail(ErrorCode::parse, os.str());
    }
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

FiniteSumProblem load_dataset(const std::string& path, DataFormat format, LossKind loss,
                              std::optional<Index> dim) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open '" + path + "'");
  RowMatrix A;
  Vector b;
  if (format == DataFormat::csv) {
    const Rows rows = read_csv(in, path);
    if (rows.targets.empty()) fail(ErrorCode::parse, path + ": no samples");
    const auto n = static_cast<Index>(rows.targets.size());
    const auto d = static_cast<Index>(rows.features.front().size());
    if (dim && *dim != d) fail(ErrorCode::parse, path + ": feature count does not match the requested dimension");
    A.resize(n, d);
    b.resize(n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < d; ++j) A(i, j) = rows.features[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      b[i] = rows.targets[static_cast<std::size_t>(i)];
    }
  } else {
    const SparseRows rows = read_svmlight(in, path);
    if (rows.targets.empty()) fail(ErrorCode::parse, path + ": no samples");
    const auto n = static_cast<Index>(rows.targets.size());
    Index d = static_cast<Index>(rows.max_index);
    if (dim) {
      if (*dim < d) fail(ErrorCode::parse, path + ": feature index exceeds the requested dimension");
      d = *dim;
    }
    if (d == 0) fail(ErrorCode::parse, path + ": no features");
    A = RowMatrix::Zero(n, d);
    b.resize(n);
    for (Index i = 0; i < n; ++i) {
      for (const auto& [idx, v] : rows.entries[static_cast<std::size_t>(i)]) {
        A(i, static_cast<Index>(idx) - 1) = v;
      }
      b[i] = rows.targets[static_cast<std::size_t>(i)];
    }
  }
  check_targets(b, loss, path);
  return FiniteSumProblem(std::move(A), std::move(b), make_loss(loss));
}

void write_dataset(const std::string& path, DataFormat format, const FiniteSumProblem& problem) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write '" + path + "'");
  const RowMatrix& A = problem.rows();
  const Vector& b = problem.targets();
  for (Index i = 0; i < A.rows(); ++i) {
    std::string line;
    if (format == DataFormat::csv) {
      for (Index j = 0; j < A.cols(); ++j) {
        line += format_double(A(i, j));
        line += ',';
      }
      line += format_double(b[i]);
    } else {
      line = format_double(b[i]);
      for (Index j = 0; j < A.cols(); ++j) {
        if (A(i, j) == 0.0) continue;
        line += ' ';
        line += std::to_string(j + 1);
        line += ':';
        line += format_double(A(i, j));
      }
    }
    line += '\n';
    out << line;
  }
  if (!out) fail(ErrorCode::io, "write to '" + path + "' failed");
}

}  // namespace inewton
