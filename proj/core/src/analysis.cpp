#include "usde/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>

namespace usde {

namespace {

std::vector<double> error_norms(const Trace& trace, double t0, double t1) {
  std::vector<double> ns;
  for (const auto& r : trace.records) {
    if (r.t >= t0 - 1e-12 && r.t <= t1 + 1e-12) {
      ns.push_back(r.e.norm());
    }
  }
  return ns;
}

}  // namespace

ErrorMetrics compute_metrics(const Trace& trace, double t0, double t1) {
  std::vector<double> ns = error_norms(trace, t0, t1);
  if (ns.empty()) {
    throw std::invalid_argument("compute_metrics: empty window");
  }
  ErrorMetrics m;
  m.t0 = t0;
  m.t1 = t1;
  m.samples = static_cast<int>(ns.size());
  double sum = 0.0, sumsq = 0.0;
  for (const double x : ns) {
    sum += x;
    sumsq += x * x;
  }
  m.mean = sum / ns.size();
  m.rms = std::sqrt(sumsq / ns.size());
  std::sort(ns.begin(), ns.end());
  const size_t k = ns.size() / 2;
  m.median = (ns.size() % 2 == 1) ? ns[k] : 0.5 * (ns[k - 1] + ns[k]);
  return m;
}

std::vector<ErrorMetrics> compute_phase_metrics(const Trace& trace) {
  std::vector<ErrorMetrics> out;
  const auto& ts = trace.phase_times;
  for (size_t i = 0; i + 1 < ts.size(); ++i) {
    out.push_back(compute_metrics(trace, ts[i], ts[i + 1] - trace.control_dt));
  }
  return out;
}

double chattering_index(const Trace& trace) {
  if (trace.records.size() < 2) return 0.0;
  double sumsq = 0.0;
  for (size_t i = 1; i < trace.records.size(); ++i) {
    sumsq += (trace.records[i].tau_cmd - trace.records[i - 1].tau_cmd)
                 .squaredNorm();
  }
  return std::sqrt(sumsq / (trace.records.size() - 1));
}

double lyapunov_v1(const TraceRecord& rec, const ManipulatorModel& nominal) {
  const JointMat M = nominal.mass_matrix(rec.q);
  const JointVec derr = rec.d_true - rec.d_hat;
  return 0.5 * rec.S.dot(M * rec.S) + 0.5 * derr.squaredNorm();
}

double lyapunov_v2(const TraceRecord& rec, const ManipulatorModel& nominal,
                   const ControllerConfig& cfg) {
  double v = lyapunov_v1(rec, nominal);
  if (rec.K_hat.size() == cfg.K.size()) {
    for (int i = 0; i < cfg.K.size(); ++i) {
      const double kt = cfg.K[i] - rec.K_hat[i];
      v += 0.5 * kt * kt / cfg.pi[i];
    }
  }
  return v;
}

double lyapunov_v3(const TraceRecord& rec, const ManipulatorModel& nominal,
                   const ControllerConfig& cfg) {
  const int n = static_cast<int>(rec.S.size());
  const JointMat M = nominal.mass_matrix(rec.q);
  const JointVec dtilde = rec.d_true - rec.d_hat;
  const JointVec Sigma =
      rec.Sigma.size() == n ? rec.Sigma : JointVec::Zero(n);
  const JointVec sigma_prime = M.llt().solve(Sigma - dtilde);

  double v = 0.5 * dtilde.squaredNorm();
  for (int i = 0; i < n; ++i) {
    const STGainCertificate c =
        st_gain_certificate(cfg.T1[i], cfg.T2[i], 0.0, 0.0);
    Eigen::Vector2d X(std::sqrt(std::abs(rec.S[i])) * signum(rec.S[i]),
                      sigma_prime[i]);
    v += X.dot(c.P * X);
  }
  return v;
}

V1CheckResult check_v1_decrease(const Trace& trace,
                                const ManipulatorModel& nominal,
                                const ControllerConfig& cfg, double t_start) {
  if (trace.records.size() < 3) {
    throw std::invalid_argument("check_v1_decrease: trace too short");
  }
  V1CheckResult res;
  res.gamma1 = cfg.K.minCoeff();
  if (!(cfg.filter_k < res.gamma1)) {
    throw std::invalid_argument(
        "check_v1_decrease: requires filter k < min_i K_i");
  }

  const double dt = trace.control_dt;
  double vmax = 0.0;
  for (const auto& r : trace.records) vmax = std::max(vmax, std::abs(r.v1));
  res.eps = 1e-3 * vmax;

  Eigen::SelfAdjointEigenSolver<JointMat> es;
  for (size_t i = 1; i + 1 < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    if (r.t < t_start) continue;
    es.compute(nominal.mass_matrix(r.q), Eigen::EigenvaluesOnly);
    res.lambda_max_M = std::max(res.lambda_max_M, es.eigenvalues().maxCoeff());
    const double ddot = (trace.records[i + 1].d_true - trace.records[i - 1].d_true)
                            .norm() / (2.0 * dt);
    res.d0 = std::max(res.d0, ddot);
  }

  res.alpha1 = std::min(res.gamma1 / res.lambda_max_M,
                        1.0 / cfg.filter_k - 1.0 / res.gamma1);
  res.beta1 = 0.5 * cfg.filter_k * res.d0 * res.d0;

  for (size_t i = 1; i + 1 < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    if (r.t < t_start) continue;
    const double vdot =
        (trace.records[i + 1].v1 - trace.records[i - 1].v1) / (2.0 * dt);
    ++res.checked;
    if (vdot > -res.alpha1 * r.v1 + res.beta1 + res.eps) ++res.violations;
  }
  res.fraction_ok =
      res.checked == 0 ? 0.0
                       : 1.0 - static_cast<double>(res.violations) / res.checked;
  return res;
}

STGainCertificate st_gain_certificate(double T1, double T2, double delta1,
                                      double delta2) {
  if (!(T1 > 0.0) || !(T2 > 0.0) || delta1 < 0.0 || delta2 < 0.0) {
    throw std::invalid_argument(
        "st_gain_certificate: gains must be positive, bounds non-negative");
  }
  STGainCertificate c;
  c.T1 = T1;
  c.T2 = T2;
  c.delta1 = delta1;
  c.delta2 = delta2;
  c.P << 0.5 * (4.0 * T2 + T1 * T1), -0.5 * T1, -0.5 * T1, 1.0;
  const double q11 =
      2.0 * T2 + T1 * T1 - (4.0 * T2 / T1 + T1) * delta1 - 2.0 * delta2;
  const double q12 = -(T1 + 2.0 * delta1 + 2.0 * delta2 / T1);
  c.Q << 0.5 * T1 * q11, 0.5 * T1 * q12, 0.5 * T1 * q12, 0.5 * T1;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> ep(c.P);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eq(c.Q);
  const double lp_min = ep.eigenvalues().minCoeff();
  const double lp_max = ep.eigenvalues().maxCoeff();
  const double lq_min = eq.eigenvalues().minCoeff();
  c.pd_ok = lp_min > 1e-9 && lq_min > 1e-9;
  c.gamma = std::sqrt(std::max(lp_min, 0.0)) * lq_min / lp_max;
  return c;
}

double finite_time_bound(double V3_initial, double alpha3, double theta0) {
  if (V3_initial < 0.0) {
    throw std::invalid_argument("finite_time_bound: V3_initial must be >= 0");
  }
  if (!(alpha3 > 0.0)) {
    throw std::invalid_argument(
        "finite_time_bound: alpha3 <= 0 (gains fail the certificate)");
  }
  if (!(theta0 > 0.0 && theta0 < 1.0)) {
    throw std::invalid_argument("finite_time_bound: theta0 must be in (0,1)");
  }
  return 2.0 * std::sqrt(V3_initial) / (theta0 * alpha3);
}

double alpha3_from(const std::vector<STGainCertificate>& certs, double k) {
  check_positive(k, "filter constant k");
  double a = std::sqrt(2.0) / (2.0 * k);
  for (const auto& c : certs) a = std::min(a, c.gamma);
  return a;
}

StPerturbationBounds measure_st_bounds(const Trace& trace,
                                       const ManipulatorModel& nominal,
                                       const ControllerConfig& cfg,
                                       double safety) {
  const int n = trace.dof;
  StPerturbationBounds b;
  b.delta1 = JointVec::Zero(n);
  b.delta2 = JointVec::Zero(n);
  if (trace.records.size() < 3) return b;

  const double dt = trace.control_dt;
  std::vector<JointVec> int_rho2(trace.records.size());
  for (size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    const JointMat M = nominal.mass_matrix(r.q);
    const JointVec dtilde = r.d_true - r.d_hat;
    const JointVec Sigma = r.Sigma.size() == n ? r.Sigma : JointVec::Zero(n);

    JointVec sw(n);
    for (int j = 0; j < n; ++j) {
      sw[j] = cfg.T1[j] * std::sqrt(std::abs(r.S[j])) * signum(r.S[j]);
    }
    const JointVec rho1 = M.llt().solve((M - JointMat::Identity(n, n)) * sw);
    for (int j = 0; j < n; ++j) {
      const double root = std::sqrt(std::abs(r.S[j]));
      if (root > 1e-4) {
        b.delta1[j] = std::max(b.delta1[j], std::abs(rho1[j]) / root);
      }
    }
    int_rho2[i] = M.llt().solve((JointMat::Identity(n, n) - M) * Sigma - dtilde);
  }
  for (size_t i = 1; i + 1 < trace.records.size(); ++i) {
    const JointVec rho2 = (int_rho2[i + 1] - int_rho2[i - 1]) / (2.0 * dt);
    for (int j = 0; j < n; ++j) {
      b.delta2[j] = std::max(b.delta2[j], std::abs(rho2[j]));
    }
  }
  b.delta1 *= safety;
  b.delta2 *= safety;
  return b;
}

ScalarStResult scalar_st_experiment(double T1, double T2, double S0,
                                    double rho1_amp, double rho2_amp,
                                    double filter_k, double theta0,
                                    double band, double dt, double t_max) {
  ScalarStResult res;
  res.T1 = T1;
  res.T2 = T2;

  double S = S0;
  double Sp = 0.0;
  const int n_steps = static_cast<int>(t_max / dt);
  double last_outside = -1.0;
  bool ever_inside = false;

  for (int i = 0; i < n_steps; ++i) {
    const double t = i * dt;
    const double root = std::sqrt(std::abs(S));
    const double rho1 = rho1_amp * root * std::sin(7.3 * t);
    const double rho2 = rho2_amp * std::sin(3.1 * t + 0.5);
    if (root > 1e-6) {
      res.delta1 = std::max(res.delta1, std::abs(rho1) / root);
    }
    res.delta2 = std::max(res.delta2, std::abs(rho2));

    if (std::abs(S) > band) {
      last_outside = t;
    } else {
      ever_inside = true;
    }

    const double Sdot = -T1 * root * signum(S) + Sp + rho1;
    const double Spdot = -T2 * signum(S) + rho2;
    S += dt * Sdot;
    Sp += dt * Spdot;
  }

  const STGainCertificate cert =
      st_gain_certificate(T1, T2, res.delta1, res.delta2);
  res.certified = cert.pd_ok && cert.gamma > 0.0;
  res.gamma = cert.gamma;

  const Eigen::Vector2d X0(std::sqrt(std::abs(S0)) * signum(S0), 0.0);
  res.V0 = X0.dot(cert.P * X0);
  if (res.certified) {
    const double alpha3 = std::min(cert.gamma, std::sqrt(2.0) / (2.0 * filter_k));
    res.t_f = finite_time_bound(res.V0, alpha3, theta0);
  }
  res.entry_time = last_outside + dt;
  res.stayed = ever_inside && res.entry_time < t_max;
  return res;
}

AgFeasibility ag_constants_search(double gamma1, double k, double lambda_max_M,
                                  const JointVec& pi, const JointVec& sigma) {
  AgFeasibility best;
  const double g1_slot = 1.0 / k - 1.0 / gamma1;
  for (double f2 = 0.05; f2 < 0.96; f2 += 0.05) {
    const double g2 = f2 * gamma1;
    for (const double g3 : {0.1, 1.0, 10.0, 100.0, 1e3, 1e4}) {
      for (const double g4 : {0.75, 1.0, 2.0, 5.0, 10.0, 100.0}) {
        double E = std::numeric_limits<double>::infinity();
        double piE = std::numeric_limits<double>::infinity();
        for (int i = 0; i < sigma.size(); ++i) {
          const double e_i = (2.0 * g4 - 1.0) * sigma[i] / g4 -
                             1.0 / (pi[i] * g3) - 1.0 / g2;
          E = std::min(E, e_i);
          piE = std::min(piE, pi[i] * e_i);
        }
        if (E <= 0.0) continue;
        const double alpha2 =
            std::min({(gamma1 - g2) / lambda_max_M, g1_slot, piE});
        if (!best.feasible || alpha2 > best.alpha2) {
          best = {true, g2, g3, g4, E, alpha2};
        }
      }
    }
  }
  return best;
}

const VariantResult* ComparisonReport::find(ControllerVariant v) const {
  for (const auto& r : results) {
    if (r.variant == v) return &r;
  }
  return nullptr;
}

ComparisonReport compare_controllers(
    const Scenario& scenario, const ControllerConfig& config,
    const std::vector<ControllerVariant>& variants, double window_t0,
    double window_t1, int jobs) {
  ComparisonReport rep;
  rep.window_t0 = window_t0;
  rep.window_t1 = window_t1;
  if (scenario.payload.mass > 0.0) {
    rep.pre_t0 = std::max(0.0, scenario.payload.attach_time - 5.0);
    rep.pre_t1 = std::max(rep.pre_t0, scenario.payload.attach_time - 1.0);
    rep.post_t0 = scenario.payload.attach_time + 2.5;
    rep.post_t1 = std::min(scenario.payload.detach_time, scenario.duration);
  }

  rep.results.resize(variants.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= variants.size()) break;
      VariantResult r;
      r.variant = variants[i];
      r.trace = run_scenario(scenario, variants[i], config);
      r.diverged = r.trace.diverged;
      if (!r.diverged && !r.trace.records.empty()) {
        r.window = compute_metrics(r.trace, window_t0, window_t1);
        r.phases = compute_phase_metrics(r.trace);
        r.chattering = chattering_index(r.trace);
        if (scenario.payload.mass > 0.0) {
          r.pre_mean = compute_metrics(r.trace, rep.pre_t0, rep.pre_t1).mean;
          r.post_mean = compute_metrics(r.trace, rep.post_t0, rep.post_t1).mean;
        }
      }
      rep.results[i] = std::move(r);
    }
  };

  const int n_workers = std::max(1, std::min<int>(jobs, variants.size()));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::future<void>> futs;
    for (int i = 0; i < n_workers; ++i) {
      futs.push_back(std::async(std::launch::async, worker));
    }
    for (auto& f : futs) f.get();
  }
  return rep;
}

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

}  // namespace

void write_metrics_csv(const std::string& path, const ComparisonReport& rep) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "variant,window,t0,t1,samples,mean_e,median_e,rms_e,chattering,"
         "diverged\n";
  for (const auto& r : rep.results) {
    if (r.diverged) {
      out << to_string(r.variant) << ",report,,,,,,,,1\n";
      continue;
    }
    auto row = [&](const std::string& name, const ErrorMetrics& m) {
      out << to_string(r.variant) << ',' << name << ',' << fmt(m.t0) << ','
          << fmt(m.t1) << ',' << m.samples << ',' << fmt(m.mean) << ','
          << fmt(m.median) << ',' << fmt(m.rms) << ',' << fmt(r.chattering)
          << ",0\n";
    };
    row("report", r.window);
    for (size_t p = 0; p < r.phases.size(); ++p) {
      row("phase" + std::to_string(p + 1), r.phases[p]);
    }
  }
}

void write_report_markdown(const std::string& path,
                           const ComparisonReport& rep) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);

  out << "# Controller comparison\n\n";
  out << "Window: [" << fmt(rep.window_t0) << ", " << fmt(rep.window_t1)
      << "] s\n\n";
  out << "| controller | mean ||e|| | median ||e|| | RMS ||e|| | chattering "
         "(RMS dtau) | status |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const auto& r : rep.results) {
    out << "| " << to_string(r.variant) << " | ";
    if (r.diverged) {
      out << "- | - | - | - | DIVERGED |\n";
    } else {
      out << fmt(r.window.mean) << " | " << fmt(r.window.median) << " | "
          << fmt(r.window.rms) << " | " << fmt(r.chattering) << " | ok |\n";
    }
  }

  // Ranking by RMS error (diverged runs excluded).
  std::vector<const VariantResult*> ranked;
  for (const auto& r : rep.results) {
    if (!r.diverged) ranked.push_back(&r);
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const VariantResult* a, const VariantResult* b) {
              return a->window.rms < b->window.rms;
            });
  out << "\n## Accuracy ranking (RMS, best first)\n\n";
  for (size_t i = 0; i < ranked.size(); ++i) {
    out << i + 1 << ". " << to_string(ranked[i]->variant) << " (rms "
        << fmt(ranked[i]->window.rms) << ")\n";
  }

  if (ranked.size() == 4) {
    auto rms = [&](ControllerVariant v) { return rep.find(v)->window.rms; };
    const bool ordering =
        rms(ControllerVariant::Ctc) > rms(ControllerVariant::Fg) &&
        rms(ControllerVariant::Fg) > rms(ControllerVariant::Ag) &&
        rms(ControllerVariant::Ag) > rms(ControllerVariant::St);
    double max_other = 0.0;
    for (const auto& r : rep.results) {
      if (r.variant != ControllerVariant::St) {
        max_other = std::max(max_other, r.chattering);
      }
    }
    const bool chat = rep.find(ControllerVariant::St)->chattering > max_other;
    out << "\nRMS ordering ctc > fg > ag > st: " << (ordering ? "PASS" : "FAIL")
        << "\n";
    out << "Chattering strictly largest for st: " << (chat ? "PASS" : "FAIL")
        << "\n";
  }

  if (rep.post_t1 > rep.post_t0) {
    out << "\n## Payload robustness (mean ||e||, pre ["
        << fmt(rep.pre_t0) << ", " << fmt(rep.pre_t1) << "] vs post ["
        << fmt(rep.post_t0) << ", " << fmt(rep.post_t1) << "])\n\n";
    out << "| controller | pre | post | ratio |\n|---|---|---|---|\n";
    for (const auto& r : rep.results) {
      if (r.diverged) continue;
      out << "| " << to_string(r.variant) << " | " << fmt(r.pre_mean) << " | "
          << fmt(r.post_mean) << " | "
          << fmt(r.pre_mean > 0 ? r.post_mean / r.pre_mean : 0.0) << " |\n";
    }
  }

  out << "\n## Per-phase RMS ||e||\n\n";
  out << "| controller |";
  if (!rep.results.empty() && !rep.results.front().phases.empty()) {
    for (size_t p = 0; p < rep.results.front().phases.size(); ++p) {
      out << " phase" << p + 1 << " |";
    }
  }
  out << "\n|---|";
  if (!rep.results.empty()) {
    for (size_t p = 0; p < rep.results.front().phases.size(); ++p) out << "---|";
  }
  out << "\n";
  for (const auto& r : rep.results) {
    if (r.diverged) continue;
    out << "| " << to_string(r.variant) << " |";
    for (const auto& m : r.phases) out << ' ' << fmt(m.rms) << " |";
    out << "\n";
  }
}

void write_long_csv(const std::string& path, const Trace& trace, int stride) {
  if (stride < 1) stride = 1;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "t,series,joint,value\n";
  auto emit = [&](double t, const char* series, const JointVec& v) {
    for (int i = 0; i < v.size(); ++i) {
      out << fmt(t) << ',' << series << ',' << i + 1 << ',' << fmt(v[i])
          << '\n';
    }
  };
  for (size_t n = 0; n < trace.records.size(); n += stride) {
    const auto& r = trace.records[n];
    emit(r.t, "q", r.q);
    emit(r.t, "qd", r.qd);
    emit(r.t, "q_des", r.q_des);
    emit(r.t, "e", r.e);
    emit(r.t, "S", r.S);
    emit(r.t, "tau_cmd", r.tau_cmd);
    emit(r.t, "tau_applied", r.tau_applied);
    emit(r.t, "d_hat", r.d_hat);
    emit(r.t, "d_true", r.d_true);
    emit(r.t, "d_ref", r.d_ref);
    if (r.K_hat.size() > 0) emit(r.t, "k_hat", r.K_hat);
    if (r.Sigma.size() > 0) emit(r.t, "st_sigma", r.Sigma);
    out << fmt(r.t) << ",v1,0," << fmt(r.v1) << '\n';
  }
}

}  // namespace usde
