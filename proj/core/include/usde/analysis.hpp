#ifndef USDE_ANALYSIS_HPP_
#define USDE_ANALYSIS_HPP_

#include <string>
#include <vector>

#include "usde/simulation.hpp"

namespace usde {

/// Mean / median / RMS of ||e(t)||_2 over a time window. The median of an
/// even count is the average of the two central values.
struct ErrorMetrics {
  double t0 = 0.0, t1 = 0.0;
  int samples = 0;
  double mean = 0.0, median = 0.0, rms = 0.0;
};

ErrorMetrics compute_metrics(const Trace& trace, double t0, double t1);

/// Per-phase breakdown at the scenario's phase boundaries.
std::vector<ErrorMetrics> compute_phase_metrics(const Trace& trace);

/// RMS of the per-step command change ||tau_cmd[n] - tau_cmd[n-1]||_2.
double chattering_index(const Trace& trace);

/// Lyapunov monitors evaluated along logged trajectories.
/// V1 = 1/2 S^T M S + 1/2 dtilde^T dtilde.
double lyapunov_v1(const TraceRecord& rec, const ManipulatorModel& nominal);
/// V2 = V1 + 1/2 sum (1/pi_i) (K_ref_i - K_hat_i)^2; diagnostic only, the
/// reference gain is the configured fixed gain.
double lyapunov_v2(const TraceRecord& rec, const ManipulatorModel& nominal,
                   const ControllerConfig& cfg);
/// V3 = sum_i X_i^T P_i X_i + 1/2 dtilde^T dtilde with
/// X_i = [|S_i|^{1/2} sign(S_i), Sigma'_i] and Sigma' = M^{-1}(Sigma - dtilde).
double lyapunov_v3(const TraceRecord& rec, const ManipulatorModel& nominal,
                   const ControllerConfig& cfg);

/// Decrease check of V1 along a run: discrete Vdot (central differences)
/// against -alpha1 V1 + beta1 + eps at every post-transient step, with
/// alpha1 = min{gamma1/lamMax(M), 1/k - 1/gamma1}, gamma1 = min_i K_i,
/// beta1 = (k/2) d0^2 and d0 the measured sup ||ddot_true|| over the
/// checked window. Requires k < gamma1.
struct V1CheckResult {
  double gamma1 = 0.0, alpha1 = 0.0, beta1 = 0.0;
  double d0 = 0.0, lambda_max_M = 0.0, eps = 0.0;
  int checked = 0, violations = 0;
  double fraction_ok = 0.0;
};

V1CheckResult check_v1_decrease(const Trace& trace,
                                const ManipulatorModel& nominal,
                                const ControllerConfig& cfg, double t_start);

/// Super-twisting gain certificate for one joint,
///   P = 1/2 [4 T2 + T1^2, -T1; -T1, 2],
///   Q = T1/2 [2 T2 + T1^2 - (4 T2/T1 + T1) d1 - 2 d2, s; s, 1],
///   s = -(T1 + 2 d1 + 2 d2/T1)  (symmetric completion),
///   gamma = sqrt(lamMin(P)) lamMin(Q) / lamMax(P).
/// pd_ok requires both matrices positive definite (lamMin > 1e-9).
struct STGainCertificate {
  double T1 = 0.0, T2 = 0.0, delta1 = 0.0, delta2 = 0.0;
  Eigen::Matrix2d P, Q;
  double gamma = 0.0;
  bool pd_ok = false;
};

STGainCertificate st_gain_certificate(double T1, double T2, double delta1,
                                      double delta2);

/// t_f = 2 sqrt(V3(0)) / (theta0 alpha3); alpha3 = min{gamma_i, sqrt(2)/(2k)}.
double finite_time_bound(double V3_initial, double alpha3, double theta0);
double alpha3_from(const std::vector<STGainCertificate>& certs, double k);

/// Perturbation bounds (delta1_i, delta2_i) measured from a pilot run's
/// rho terms with a safety factor:
///   rho1 = M^{-1} (M - I) T1 |S|^{1/2} sign(S),
///   int rho2 = M^{-1} ((I - M) Sigma - dtilde).
struct StPerturbationBounds {
  JointVec delta1, delta2;
};

StPerturbationBounds measure_st_bounds(const Trace& trace,
                                       const ManipulatorModel& nominal,
                                       const ControllerConfig& cfg,
                                       double safety = 2.0);

/// Scalar super-twisting loop driven by bounded synthetic perturbations;
/// used to confront the finite-time bound with measured behaviour.
///   Sdot = -T1 |S|^{1/2} sign(S) + Sigma' + rho1(t),
///   Sigma'dot = -T2 sign(S) + rho2(t).
struct ScalarStResult {
  double T1 = 0.0, T2 = 0.0;
  double delta1 = 0.0, delta2 = 0.0;  // measured sup bounds
  bool certified = false;
  double gamma = 0.0;
  double V0 = 0.0;
  double t_f = 0.0;        // analytic bound
  double entry_time = 0.0; // measured entry into the residual band
  bool stayed = false;     // remained in the band afterwards
};

ScalarStResult scalar_st_experiment(double T1, double T2, double S0,
                                    double rho1_amp, double rho2_amp,
                                    double filter_k, double theta0,
                                    double band, double dt, double t_max);

/// Feasibility search for the adaptive-gain stability constants: find
/// gamma2 < gamma1 and gamma3, gamma4 > 0 with
///   E = min_i [ (2 gamma4 - 1) sigma_i / gamma4 - 1/(pi_i gamma3) - 1/gamma2 ] > 0.
/// Reports infeasibility instead of asserting existence.
struct AgFeasibility {
  bool feasible = false;
  double gamma2 = 0.0, gamma3 = 0.0, gamma4 = 0.0;
  double E = 0.0, alpha2 = 0.0;
};

AgFeasibility ag_constants_search(double gamma1, double k, double lambda_max_M,
                                  const JointVec& pi, const JointVec& sigma);

/// Four-way (or subset) comparison on one scenario.
struct VariantResult {
  ControllerVariant variant = ControllerVariant::Fg;
  bool diverged = false;
  ErrorMetrics window;                    // metrics over the report window
  std::vector<ErrorMetrics> phases;       // per trajectory phase
  double chattering = 0.0;
  double pre_mean = 0.0, post_mean = 0.0; // payload robustness windows
  Trace trace;
};

struct ComparisonReport {
  double window_t0 = 0.0, window_t1 = 0.0;
  double pre_t0 = 0.0, pre_t1 = 0.0, post_t0 = 0.0, post_t1 = 0.0;
  std::vector<VariantResult> results;

  const VariantResult* find(ControllerVariant v) const;
};

ComparisonReport compare_controllers(const Scenario& scenario,
                                     const ControllerConfig& config,
                                     const std::vector<ControllerVariant>& variants,
                                     double window_t0, double window_t1,
                                     int jobs = 1);

/// Report emitters: metrics table CSV, Markdown summary, and a plot-ready
/// long-format CSV (t, series, joint, value); `stride` decimates rows.
void write_metrics_csv(const std::string& path, const ComparisonReport& rep);
void write_report_markdown(const std::string& path, const ComparisonReport& rep);
void write_long_csv(const std::string& path, const Trace& trace, int stride = 10);

}  // namespace usde

#endif  // USDE_ANALYSIS_HPP_
