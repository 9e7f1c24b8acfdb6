#ifndef USDE_CONTROLLERS_HPP_
#define USDE_CONTROLLERS_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "usde/model.hpp"
#include "usde/trajectory.hpp"
#include "usde/types.hpp"

namespace usde {

enum class ControllerVariant { Ctc, Fg, Ag, St };

const char* to_string(ControllerVariant v);
std::optional<ControllerVariant> variant_from_string(std::string_view s);

/// Gains shared by all four control laws. Vectors hold the diagonal
/// entries of the corresponding gain matrices.
struct ControllerConfig {
  JointVec eta;        ///< sliding-variable slope, diag > 0
  JointVec K;          ///< fixed feedback gain, diag > 0
  JointVec K_lower;    ///< adaptive-gain lower bounds (init value)
  JointVec pi;         ///< adaptation rates
  JointVec sigma;      ///< sigma-modification leakage
  JointVec T1;         ///< square-root switching gains, diag > 0
  JointVec T2;         ///< integral switching gains, diag > 0
  JointVec tau_limit;  ///< per-joint torque saturation [N·m]
  double sigma_max = 50.0;  ///< anti-windup bound on the ST integrator
  bool abs_s = false;  ///< experimental: drive the adaptive gain with |S_i|
  double filter_k = 0.08;  ///< estimator filter constant [s]

  static ControllerConfig defaults(int dof);
  void validate(int dof) const;  // throws with the offending field name
};

/// Mutable per-variant controller memory.
struct ControllerState {
  ControllerVariant variant = ControllerVariant::Fg;
  JointVec K_hat;  ///< adaptive gains, K_hat_i >= K_lower_i always
  JointVec Sigma;  ///< super-twisting integrator, |Sigma_i| <= sigma_max

  static ControllerState make(ControllerVariant v, const ControllerConfig& cfg,
                              int dof);
};

/// S = ed + eta .* e.
JointVec sliding_variable(const JointVec& e, const JointVec& ed,
                          const JointVec& eta);

/// Componentwise clamp to [-limit, limit].
JointVec saturate(const JointVec& tau, const JointVec& limit);

/// sign with sign(0) = 0.
double signum(double x);

/// Adaptive-gain update: K_hat_i += dt pi_i (S_i - sigma_i K_hat_i),
/// then clamped from below at K_lower_i. S_i enters signed unless
/// cfg.abs_s is set.
void adaptive_gain_step(ControllerState& state, const ControllerConfig& cfg,
                        const JointVec& S, double dt);

/// Law cores on pre-evaluated dynamics terms. The returned torque is
/// unsaturated; callers apply saturate(). No acceleration measurement and
/// no inertia inverse anywhere in these paths.
JointVec control_fg_core(const JointVec& K_diag, const ControllerConfig& cfg,
                         const JointMat& M, const JointMat& C,
                         const JointVec& g, const JointVec& e,
                         const JointVec& ed, const TrajectoryPoint& traj,
                         const JointVec& d_hat);
JointVec control_st_core(const ControllerConfig& cfg, const JointVec& Sigma,
                         const JointMat& M, const JointMat& C,
                         const JointVec& g, const JointVec& qd,
                         const JointVec& e, const JointVec& ed,
                         const TrajectoryPoint& traj, const JointVec& d_hat);

/// Fixed-gain law evaluated from the nominal model,
/// tau = K S + M zeta_dot + C zeta + g - d_hat, saturated. The no-estimator
/// variant (CTC) is this call with d_hat = 0.
JointVec control_fg(const ControllerConfig& cfg, const ManipulatorModel& nominal,
                    const JointVec& q, const JointVec& qd,
                    const TrajectoryPoint& traj, const JointVec& d_hat);

/// Adaptive-gain law: one adaptation step, then the fixed-gain law with
/// K replaced by K_hat.
std::pair<JointVec, ControllerState> control_ag(ControllerState state,
                                                const ControllerConfig& cfg,
                                                const ManipulatorModel& nominal,
                                                const JointVec& q,
                                                const JointVec& qd,
                                                const TrajectoryPoint& traj,
                                                const JointVec& d_hat,
                                                double dt);

/// Super-twisting law:
/// tau = T1 |S|^{1/2} sign(S) - Sigma + M zeta_dot + C qd + g - d_hat,
/// Sigma <- clamp(Sigma - dt T2 sign(S), +/- sigma_max), saturated.
/// Note the C qd (measured velocity) feedforward, unlike the C zeta of
/// the fixed-gain law; both are intentional.
std::pair<JointVec, ControllerState> control_st(ControllerState state,
                                                const ControllerConfig& cfg,
                                                const ManipulatorModel& nominal,
                                                const JointVec& q,
                                                const JointVec& qd,
                                                const TrajectoryPoint& traj,
                                                const JointVec& d_hat,
                                                double dt);

/// Uniform per-step interface used by the simulation loop. Returns the
/// raw (unsaturated) command through `tau_cmd` and the saturated torque
/// as the return value; updates `state` in place.
JointVec controller_step(ControllerState& state, const ControllerConfig& cfg,
                         const JointMat& M, const JointMat& C,
                         const JointVec& g, const JointVec& qd,
                         const JointVec& e, const JointVec& ed,
                         const TrajectoryPoint& traj, const JointVec& d_hat,
                         double dt, JointVec* tau_cmd = nullptr);

}  // namespace usde

#endif  // USDE_CONTROLLERS_HPP_
