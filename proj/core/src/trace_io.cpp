#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "usde/simulation.hpp"

namespace usde {

namespace {

void append_group(std::string& header, const char* name, int n) {
  for (int i = 1; i <= n; ++i) {
    header += ',';
    header += name;
    header += '_';
    header += std::to_string(i);
  }
}

void append_num(std::string& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  out += buf;
}

void append_vec(std::string& out, const JointVec& v) {
  for (int i = 0; i < v.size(); ++i) {
    out += ',';
    append_num(out, v[i]);
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string trace_to_csv(const Trace& trace) {
  const int n = trace.dof;
  const bool has_khat = trace.variant == ControllerVariant::Ag;
  const bool has_sigma = trace.variant == ControllerVariant::St;

  std::string out = "t";
  append_group(out, "q", n);
  append_group(out, "qd", n);
  append_group(out, "q_des", n);
  append_group(out, "e", n);
  append_group(out, "S", n);
  append_group(out, "tau_cmd", n);
  append_group(out, "tau_applied", n);
  append_group(out, "d_hat", n);
  append_group(out, "d_true", n);
  append_group(out, "d_ref", n);
  if (has_khat) append_group(out, "k_hat", n);
  if (has_sigma) append_group(out, "st_sigma", n);
  out += ",v1\n";

  for (const TraceRecord& r : trace.records) {
    append_num(out, r.t);
    append_vec(out, r.q);
    append_vec(out, r.qd);
    append_vec(out, r.q_des);
    append_vec(out, r.e);
    append_vec(out, r.S);
    append_vec(out, r.tau_cmd);
    append_vec(out, r.tau_applied);
    append_vec(out, r.d_hat);
    append_vec(out, r.d_true);
    append_vec(out, r.d_ref);
    if (has_khat) append_vec(out, r.K_hat);
    if (has_sigma) append_vec(out, r.Sigma);
    out += ',';
    append_num(out, r.v1);
    out += '\n';
  }
  return out;
}

void write_trace_csv(const std::string& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  out << trace_to_csv(trace);
}

Trace parse_trace_csv_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("trace csv: empty input");
  }
  const std::vector<std::string> cols = split(line, ',');
  if (cols.empty() || cols.front() != "t") {
    throw std::runtime_error("trace csv: malformed header");
  }

  auto group_count = [&cols](const std::string& name) {
    int count = 0;
    const std::string prefix = name + "_";
    for (const auto& c : cols) {
      if (c.rfind(prefix, 0) == 0 &&
          c.find_first_not_of("0123456789", prefix.size()) == std::string::npos) {
        ++count;
      }
    }
    return count;
  };

  Trace trace;
  trace.dof = group_count("q");
  const int n = trace.dof;
  if (n == 0) throw std::runtime_error("trace csv: no q_* columns");
  const bool has_khat = group_count("k_hat") == n;
  const bool has_sigma = group_count("st_sigma") == n;
  trace.variant = has_khat ? ControllerVariant::Ag
                           : (has_sigma ? ControllerVariant::St
                                        : ControllerVariant::Fg);

  const size_t expected =
      1 + static_cast<size_t>(n) * (10 + (has_khat ? 1 : 0) + (has_sigma ? 1 : 0)) + 1;
  if (cols.size() != expected) {
    throw std::runtime_error("trace csv: unexpected column count");
  }

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> xs = split(line, ',');
    if (xs.size() != expected) {
      throw std::runtime_error("trace csv: row width mismatch");
    }
    size_t ix = 0;
    auto num = [&]() { return std::strtod(xs[ix++].c_str(), nullptr); };
    auto vec = [&]() {
      JointVec v(n);
      for (int i = 0; i < n; ++i) v[i] = num();
      return v;
    };
    TraceRecord r;
    r.t = num();
    r.q = vec();
    r.qd = vec();
    r.q_des = vec();
    r.e = vec();
    r.S = vec();
    r.tau_cmd = vec();
    r.tau_applied = vec();
    r.d_hat = vec();
    r.d_true = vec();
    r.d_ref = vec();
    if (has_khat) r.K_hat = vec();
    if (has_sigma) r.Sigma = vec();
    r.v1 = num();
    trace.records.push_back(std::move(r));
  }
  if (trace.records.size() >= 2) {
    trace.control_dt = trace.records[1].t - trace.records[0].t;
  }
  return trace;
}

Trace read_trace_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open trace csv: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace_csv_string(ss.str());
}

}  // namespace usde
