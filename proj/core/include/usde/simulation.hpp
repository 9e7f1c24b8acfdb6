#ifndef USDE_SIMULATION_HPP_
#define USDE_SIMULATION_HPP_

#include <string>
#include <vector>

#include "usde/scenario.hpp"

namespace usde {

/// One control step's log. d_true is the lumped disturbance referenced to
/// the nominal model, M_nom qdd + C_nom qd + g_nom - tau, evaluated with
/// the plant's actual acceleration at the step start (right limit under
/// the newly applied torque). d_ref is d_true passed through the exact
/// discrete first-order lag with the estimator's filter constant,
/// accumulated at physics-substep resolution; it is the reference the
/// estimate d_hat is expected to track.
struct TraceRecord {
  double t = 0.0;
  JointVec q, qd, q_des, e, S;
  JointVec tau_cmd;      ///< raw controller output
  JointVec tau_applied;  ///< after saturation; held over the period
  JointVec d_hat, d_true, d_ref;
  JointVec K_hat;  ///< adaptive variant only (empty otherwise)
  JointVec Sigma;  ///< super-twisting variant only (empty otherwise)
  double v1 = 0.0; ///< 1/2 S^T M S + 1/2 |d_true - d_hat|^2
};

struct Trace {
  ControllerVariant variant = ControllerVariant::Fg;
  int dof = 0;
  double control_dt = 0.0;
  bool diverged = false;
  std::vector<double> phase_times;
  std::vector<TraceRecord> records;
};

/// Fixed-step closed loop: at every control period the controller reads
/// (q, qd), updates the estimator (skipped for the no-estimator variant,
/// where d_hat = 0) and commands a torque that is held (zero-order hold)
/// while the true plant integrates with RK4 over physics_substeps
/// sub-intervals. Friction, scripted external torque, parameter mismatch
/// and the payload act only on the plant and therefore make up d_true.
/// A non-finite state terminates the run and marks the trace diverged.
Trace run_scenario(const Scenario& scenario, ControllerVariant variant,
                   const ControllerConfig& config);

/// CSV trace I/O. One row per control step, header names every column,
/// floats with 9 significant digits. Identical seeds give byte-identical
/// files.
void write_trace_csv(const std::string& path, const Trace& trace);
std::string trace_to_csv(const Trace& trace);
Trace parse_trace_csv_string(const std::string& text);
Trace read_trace_csv(const std::string& path);

}  // namespace usde

#endif  // USDE_SIMULATION_HPP_
