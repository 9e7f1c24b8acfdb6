#include "usde/simulation.hpp"

#include <cmath>
#include <random>

#include "usde/estimator.hpp"

namespace usde {

namespace {

// Plant-side disturbance torque (friction + scripted external), the part
// of d that does not come from parameter mismatch or the payload.
JointVec plant_extra_torque(const Scenario& sc, double t, const JointVec& qd) {
  JointVec d = -sc.friction.viscous.cwiseProduct(qd);
  for (int i = 0; i < qd.size(); ++i) {
    d[i] -= sc.friction.coulomb[i] * std::tanh(sc.friction.steepness * qd[i]);
  }
  d += sc.external.constant;
  if ((sc.external.sin_amp.array() != 0.0).any()) {
    d += sc.external.sin_amp *
         std::sin(sc.external.sin_freq * t + sc.external.sin_phase);
  }
  return d;
}

struct PlantStage {
  const ManipulatorModel* model;
  const Scenario* sc;
  const JointVec* tau;

  JointVec accel(double t, const JointVec& q, const JointVec& qd) const {
    return model->forward_dynamics(q, qd, *tau, plant_extra_torque(*sc, t, qd));
  }
};

// Classic RK4 on (q, qd). `k1` may carry the already-evaluated derivative
// at the segment start; the derivative at the segment end is returned for
// reuse when the plant does not change across the boundary.
void rk4_step(const PlantStage& f, double t, double h, JointVec& q,
              JointVec& qd, const JointVec& k1_qdd) {
  const JointVec k1_qd = qd;

  const JointVec q2 = q + 0.5 * h * k1_qd;
  const JointVec qd2 = qd + 0.5 * h * k1_qdd;
  const JointVec k2_qdd = f.accel(t + 0.5 * h, q2, qd2);

  const JointVec q3 = q + 0.5 * h * qd2;
  const JointVec qd3 = qd + 0.5 * h * k2_qdd;
  const JointVec k3_qdd = f.accel(t + 0.5 * h, q3, qd3);

  const JointVec q4 = q + h * qd3;
  const JointVec qd4 = qd + h * k3_qdd;
  const JointVec k4_qdd = f.accel(t + h, q4, qd4);

  q += (h / 6.0) * (k1_qd + 2.0 * qd2 + 2.0 * qd3 + qd4);
  qd += (h / 6.0) * (k1_qdd + 2.0 * k2_qdd + 2.0 * k3_qdd + k4_qdd);
}

}  // namespace

Trace run_scenario(const Scenario& sc, ControllerVariant variant,
                   const ControllerConfig& cfg) {
  sc.validate();
  cfg.validate(sc.nominal.dof());
  const int n = sc.nominal.dof();
  const double dt = sc.control_dt;
  const int n_steps = static_cast<int>(std::llround(sc.duration / dt));
  const int sub = sc.physics_substeps;
  const double h = dt / sub;

  const ManipulatorModel& nominal = sc.nominal;
  const ManipulatorModel& plant_free = sc.plant;
  const ManipulatorModel plant_loaded =
      sc.payload.mass > 0.0
          ? sc.plant.with_point_mass(sc.payload.mass, sc.payload.offset)
          : sc.plant;
  auto plant_at = [&](double t) -> const ManipulatorModel& {
    const bool loaded = sc.payload.mass > 0.0 && t >= sc.payload.attach_time &&
                        t < sc.payload.detach_time;
    return loaded ? plant_loaded : plant_free;
  };

  UsdeEstimator estimator(n, cfg.filter_k);
  ControllerState state = ControllerState::make(variant, cfg, n);
  FirstOrderLag ref_lag(n, cfg.filter_k);

  std::mt19937_64 rng(sc.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Trace trace;
  trace.variant = variant;
  trace.dof = n;
  trace.control_dt = dt;
  trace.phase_times = sc.phase_times();
  trace.records.reserve(n_steps);

  JointVec q = sc.q0;
  JointVec qd = sc.qd0;
  JointVec tau_applied_prev = JointVec::Zero(n);

  for (int step = 0; step < n_steps; ++step) {
    const double t = step * dt;
    if (!q.allFinite() || !qd.allFinite()) {
      trace.diverged = true;
      break;
    }

    const TrajectoryPoint traj = sc.trajectory.sample(t);

    JointVec qd_meas = qd;
    if (sc.velocity_noise_std > 0.0) {
      for (int i = 0; i < n; ++i) {
        qd_meas[i] += sc.velocity_noise_std * gauss(rng);
      }
    }

    const JointVec e = traj.q_des - q;
    const JointVec ed = traj.qd_des - qd_meas;
    const JointVec S = sliding_variable(e, ed, cfg.eta);

    // Nominal dynamics terms, shared by estimator and controller. The
    // inertia matrix of the nominal model is never inverted and no
    // acceleration signal enters this block.
    const JointMat M = nominal.mass_matrix(q);
    const JointMat C = nominal.coriolis_matrix(q, qd_meas);
    const JointVec g = nominal.gravity_torque(q);

    JointVec d_hat = JointVec::Zero(n);
    if (variant != ControllerVariant::Ctc) {
      const AuxiliaryVars aux = compute_auxiliary(M, C, g, qd_meas);
      d_hat = estimator.update(aux.P, aux.H, tau_applied_prev, dt);
    }

    // Snapshot the integrator the command is built from; the adaptive gain
    // updates before the law, so the post-step value is the one in use.
    const JointVec sigma_used = state.Sigma;
    JointVec tau_cmd;
    const JointVec tau_applied = controller_step(
        state, cfg, M, C, g, qd_meas, e, ed, traj, d_hat, dt, &tau_cmd);

    // Ground truth at the step start (right limit under the new torque).
    const ManipulatorModel& plant_now = plant_at(t);
    JointVec qdd_now;
    try {
      qdd_now = plant_now.forward_dynamics(q, qd, tau_applied,
                                           plant_extra_torque(sc, t, qd));
    } catch (const std::exception&) {
      trace.diverged = true;
      break;
    }
    const JointVec d_true =
        M * qdd_now + nominal.bias_torque(q, qd) - tau_applied;

    TraceRecord rec;
    rec.t = t;
    rec.q = q;
    rec.qd = qd;
    rec.q_des = traj.q_des;
    rec.e = e;
    rec.S = S;
    rec.tau_cmd = tau_cmd;
    rec.tau_applied = tau_applied;
    rec.d_hat = d_hat;
    rec.d_true = d_true;
    rec.d_ref = ref_lag.value();
    if (variant == ControllerVariant::Ag) rec.K_hat = state.K_hat;
    if (variant == ControllerVariant::St) rec.Sigma = sigma_used;
    const JointVec d_err = d_true - d_hat;
    rec.v1 = 0.5 * S.dot(M * S) + 0.5 * d_err.squaredNorm();
    trace.records.push_back(std::move(rec));

    // Integrate the control period with the torque held. The reference
    // lag consumes d_true segment endpoints so that it stays an exact
    // first-order-hold filter of the piecewise-smooth true disturbance.
    JointVec d_seg_start = d_true;
    JointVec qdd_start = qdd_now;
    bool ok = true;
    for (int j = 0; j < sub; ++j) {
      const double t0 = t + j * h;
      const ManipulatorModel& seg_plant = plant_at(t0);
      PlantStage stage{&seg_plant, &sc, &tau_applied};
      try {
        rk4_step(stage, t0, h, q, qd, qdd_start);
        // Endpoint evaluation within the same smooth piece.
        const JointVec qdd_end =
            seg_plant.forward_dynamics(q, qd, tau_applied,
                                       plant_extra_torque(sc, t0 + h, qd));
        const JointVec d_seg_end = nominal.mass_matrix(q) * qdd_end +
                                   nominal.bias_torque(q, qd) - tau_applied;
        ref_lag.step_linear(d_seg_start, d_seg_end, h);

        const double t1 = t0 + h;
        if (&plant_at(t1) != &seg_plant) {
          // Plant switches at this boundary: re-evaluate the right limit.
          qdd_start = plant_at(t1).forward_dynamics(
              q, qd, tau_applied, plant_extra_torque(sc, t1, qd));
          d_seg_start = nominal.mass_matrix(q) * qdd_start +
                        nominal.bias_torque(q, qd) - tau_applied;
        } else {
          qdd_start = qdd_end;
          d_seg_start = d_seg_end;
        }
      } catch (const std::exception&) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      trace.diverged = true;
      break;
    }

    tau_applied_prev = tau_applied;
  }

  return trace;
}

}  // namespace usde
