#include "usde/controllers.hpp"

#include <algorithm>
#include <cmath>

namespace usde {

const char* to_string(ControllerVariant v) {
  switch (v) {
    case ControllerVariant::Ctc: return "ctc";
    case ControllerVariant::Fg: return "fg";
    case ControllerVariant::Ag: return "ag";
    case ControllerVariant::St: return "st";
  }
  return "?";
}

std::optional<ControllerVariant> variant_from_string(std::string_view s) {
  if (s == "ctc") return ControllerVariant::Ctc;
  if (s == "fg") return ControllerVariant::Fg;
  if (s == "ag") return ControllerVariant::Ag;
  if (s == "st") return ControllerVariant::St;
  return std::nullopt;
}

ControllerConfig ControllerConfig::defaults(int dof) {
  ControllerConfig c;
  c.eta = JointVec::Constant(dof, 10.0);
  c.K = JointVec::Constant(dof, 10.0);
  c.K_lower = c.K;
  c.pi = JointVec::Constant(dof, 70.0);
  c.sigma = JointVec::Constant(dof, 1.0);
  c.T1 = JointVec::Constant(dof, 4.0);
  c.T2 = JointVec::Constant(dof, 12.0);
  c.tau_limit = JointVec::Constant(dof, 1e9);
  return c;
}

void ControllerConfig::validate(int dof) const {
  auto need_positive = [dof](const JointVec& v, const char* name) {
    if (v.size() != dof) {
      throw std::invalid_argument(std::string("[controller].") + name +
                                  ": expected " + std::to_string(dof) +
                                  " entries");
    }
    if (!(v.minCoeff() > 0.0) || !v.allFinite()) {
      throw std::invalid_argument(std::string("[controller].") + name +
                                  ": entries must be positive and finite");
    }
  };
  need_positive(eta, "eta");
  need_positive(K, "K");
  need_positive(K_lower, "K_lower");
  need_positive(pi, "pi");
  need_positive(sigma, "sigma");
  need_positive(T1, "T1");
  need_positive(T2, "T2");
  need_positive(tau_limit, "tau_limit");
  for (int i = 0; i < dof; ++i) {
    if (K_lower[i] > K[i] + 1e-12) {
      throw std::invalid_argument(
          "[controller].K_lower: must not exceed K at initialization");
    }
  }
  if (!(sigma_max > 0.0)) {
    throw std::invalid_argument("[controller].sigma_max: must be > 0");
  }
  if (!(filter_k > 0.0)) {
    throw std::invalid_argument("[controller].k: must be > 0");
  }
}

ControllerState ControllerState::make(ControllerVariant v,
                                      const ControllerConfig& cfg, int dof) {
  ControllerState s;
  s.variant = v;
  s.K_hat = cfg.K_lower.size() == dof ? cfg.K_lower : JointVec::Zero(dof);
  s.Sigma = JointVec::Zero(dof);
  return s;
}

JointVec sliding_variable(const JointVec& e, const JointVec& ed,
                          const JointVec& eta) {
  const int n = static_cast<int>(e.size());
  check_joint_vec(ed, n, "ed");
  check_joint_vec(eta, n, "eta");
  return ed + eta.cwiseProduct(e);
}

JointVec saturate(const JointVec& tau, const JointVec& limit) {
  return tau.cwiseMax(-limit).cwiseMin(limit);
}

double signum(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void adaptive_gain_step(ControllerState& state, const ControllerConfig& cfg,
                        const JointVec& S, double dt) {
  const int n = static_cast<int>(state.K_hat.size());
  for (int i = 0; i < n; ++i) {
    const double si = cfg.abs_s ? std::abs(S[i]) : S[i];
    if (state.K_hat[i] >= cfg.K_lower[i]) {
      state.K_hat[i] += dt * cfg.pi[i] * (si - cfg.sigma[i] * state.K_hat[i]);
    }
    state.K_hat[i] = std::max(state.K_hat[i], cfg.K_lower[i]);
  }
}

namespace {

// zeta = qd_des + eta e, zeta_dot = qdd_des + eta ed.
struct Intermediate {
  JointVec zeta, zeta_dot, S;
  Intermediate(const ControllerConfig& cfg, const JointVec& e,
               const JointVec& ed, const TrajectoryPoint& traj) {
    zeta = traj.qd_des + cfg.eta.cwiseProduct(e);
    zeta_dot = traj.qdd_des + cfg.eta.cwiseProduct(ed);
    S = ed + cfg.eta.cwiseProduct(e);
  }
};

}  // namespace

JointVec control_fg_core(const JointVec& K_diag, const ControllerConfig& cfg,
                         const JointMat& M, const JointMat& C,
                         const JointVec& g, const JointVec& e,
                         const JointVec& ed, const TrajectoryPoint& traj,
                         const JointVec& d_hat) {
  const Intermediate im(cfg, e, ed, traj);
  return K_diag.cwiseProduct(im.S) + M * im.zeta_dot + C * im.zeta + g - d_hat;
}

JointVec control_st_core(const ControllerConfig& cfg, const JointVec& Sigma,
                         const JointMat& M, const JointMat& C,
                         const JointVec& g, const JointVec& qd,
                         const JointVec& e, const JointVec& ed,
                         const TrajectoryPoint& traj, const JointVec& d_hat) {
  const Intermediate im(cfg, e, ed, traj);
  const int n = static_cast<int>(e.size());
  JointVec sw(n);
  for (int i = 0; i < n; ++i) {
    sw[i] = cfg.T1[i] * std::sqrt(std::abs(im.S[i])) * signum(im.S[i]);
  }
  return sw - Sigma + M * im.zeta_dot + C * qd + g - d_hat;
}

JointVec control_fg(const ControllerConfig& cfg,
                    const ManipulatorModel& nominal, const JointVec& q,
                    const JointVec& qd, const TrajectoryPoint& traj,
                    const JointVec& d_hat) {
  const int n = nominal.dof();
  check_joint_vec(q, n, "q");
  check_joint_vec(qd, n, "qd");
  check_joint_vec(d_hat, n, "d_hat");
  const JointVec e = traj.q_des - q;
  const JointVec ed = traj.qd_des - qd;
  const JointVec tau = control_fg_core(
      cfg.K, cfg, nominal.mass_matrix(q), nominal.coriolis_matrix(q, qd),
      nominal.gravity_torque(q), e, ed, traj, d_hat);
  return saturate(tau, cfg.tau_limit);
}

std::pair<JointVec, ControllerState> control_ag(
    ControllerState state, const ControllerConfig& cfg,
    const ManipulatorModel& nominal, const JointVec& q, const JointVec& qd,
    const TrajectoryPoint& traj, const JointVec& d_hat, double dt) {
  const JointVec e = traj.q_des - q;
  const JointVec ed = traj.qd_des - qd;
  adaptive_gain_step(state, cfg, sliding_variable(e, ed, cfg.eta), dt);
  const JointVec tau = control_fg_core(
      state.K_hat, cfg, nominal.mass_matrix(q), nominal.coriolis_matrix(q, qd),
      nominal.gravity_torque(q), e, ed, traj, d_hat);
  return {saturate(tau, cfg.tau_limit), state};
}

std::pair<JointVec, ControllerState> control_st(
    ControllerState state, const ControllerConfig& cfg,
    const ManipulatorModel& nominal, const JointVec& q, const JointVec& qd,
    const TrajectoryPoint& traj, const JointVec& d_hat, double dt) {
  const JointVec e = traj.q_des - q;
  const JointVec ed = traj.qd_des - qd;
  const JointVec tau = control_st_core(
      cfg, state.Sigma, nominal.mass_matrix(q), nominal.coriolis_matrix(q, qd),
      nominal.gravity_torque(q), qd, e, ed, traj, d_hat);
  const JointVec S = sliding_variable(e, ed, cfg.eta);
  for (int i = 0; i < S.size(); ++i) {
    state.Sigma[i] = std::clamp(state.Sigma[i] - dt * cfg.T2[i] * signum(S[i]),
                                -cfg.sigma_max, cfg.sigma_max);
  }
  return {saturate(tau, cfg.tau_limit), state};
}

JointVec controller_step(ControllerState& state, const ControllerConfig& cfg,
                         const JointMat& M, const JointMat& C,
                         const JointVec& g, const JointVec& qd,
                         const JointVec& e, const JointVec& ed,
                         const TrajectoryPoint& traj, const JointVec& d_hat,
                         double dt, JointVec* tau_cmd) {
  JointVec raw;
  switch (state.variant) {
    case ControllerVariant::Ctc:
      raw = control_fg_core(cfg.K, cfg, M, C, g, e, ed, traj,
                            JointVec::Zero(e.size()));
      break;
    case ControllerVariant::Fg:
      raw = control_fg_core(cfg.K, cfg, M, C, g, e, ed, traj, d_hat);
      break;
    case ControllerVariant::Ag: {
      adaptive_gain_step(state, cfg, sliding_variable(e, ed, cfg.eta), dt);
      raw = control_fg_core(state.K_hat, cfg, M, C, g, e, ed, traj, d_hat);
      break;
    }
    case ControllerVariant::St: {
      raw = control_st_core(cfg, state.Sigma, M, C, g, qd, e, ed, traj, d_hat);
      const JointVec S = sliding_variable(e, ed, cfg.eta);
      for (int i = 0; i < S.size(); ++i) {
        state.Sigma[i] =
            std::clamp(state.Sigma[i] - dt * cfg.T2[i] * signum(S[i]),
                       -cfg.sigma_max, cfg.sigma_max);
      }
      break;
    }
  }
  if (tau_cmd != nullptr) *tau_cmd = raw;
  return saturate(raw, cfg.tau_limit);
}

}  // namespace usde
