#include "usde/estimator.hpp"

#include <cmath>

namespace usde {

AuxiliaryVars compute_auxiliary(const ManipulatorModel& nominal,
                                const JointVec& q, const JointVec& qd) {
  const JointMat M = nominal.mass_matrix(q);
  const JointMat C = nominal.coriolis_matrix(q, qd);
  const JointVec g = nominal.gravity_torque(q);
  return compute_auxiliary(M, C, g, qd);
}

AuxiliaryVars compute_auxiliary(const JointMat& M, const JointMat& C,
                                const JointVec& g, const JointVec& qd) {
  AuxiliaryVars aux;
  aux.P = M * qd;
  aux.H = -C.transpose() * qd + g;
  return aux;
}

FirstOrderLag::FirstOrderLag(int n, double k) : k_(k), y_(JointVec::Zero(n)) {
  check_positive(k, "filter constant k");
}

void FirstOrderLag::step_held(const JointVec& x, double dt) {
  check_positive(dt, "dt");
  check_joint_vec(x, static_cast<int>(y_.size()), "filter input");
  const double a = std::exp(-dt / k_);
  y_ = a * y_ + (1.0 - a) * x;
}

void FirstOrderLag::step_linear(const JointVec& x_start, const JointVec& x_end,
                                double dt) {
  check_positive(dt, "dt");
  check_joint_vec(x_start, static_cast<int>(y_.size()), "filter input");
  check_joint_vec(x_end, static_cast<int>(y_.size()), "filter input");
  const double a = std::exp(-dt / k_);
  // Closed form for input x(s) = x0 + (s/dt)(x1 - x0) on [0, dt]:
  //   y <- a y + (1-a) x0 + c1 (x1 - x0),  c1 = 1 - (k/dt)(1-a).
  const double c1 = 1.0 - (k_ / dt) * (1.0 - a);
  y_ = a * y_ + (1.0 - a) * x_start + c1 * (x_end - x_start);
}

UsdeEstimator::UsdeEstimator(int dof, double k)
    : dof_(dof),
      k_(k),
      P_f_(dof, k),
      H_f_(dof, k),
      tau_f_(dof, k),
      d_hat_(JointVec::Zero(dof)) {
  if (dof <= 0) throw std::invalid_argument("estimator: dof must be > 0");
}

const JointVec& UsdeEstimator::update(const JointVec& P, const JointVec& H,
                                      const JointVec& tau_prev, double dt) {
  check_joint_vec(P, dof_, "P");
  check_joint_vec(H, dof_, "H");
  if (initialized_) {
    check_joint_vec(tau_prev, dof_, "tau_prev");
    P_f_.step_linear(P_prev_, P, dt);
    H_f_.step_linear(H_prev_, H, dt);
    tau_f_.step_held(tau_prev, dt);
  }
  P_prev_ = P;
  H_prev_ = H;
  initialized_ = true;

  d_hat_ = (P - P_f_.value()) / k_ + H_f_.value() - tau_f_.value();
  if (!d_hat_.allFinite()) {
    throw std::runtime_error("estimator: non-finite disturbance estimate");
  }
  return d_hat_;
}

void UsdeEstimator::reset() {
  P_f_.reset();
  H_f_.reset();
  tau_f_.reset();
  d_hat_.setZero();
  initialized_ = false;
}

}  // namespace usde
