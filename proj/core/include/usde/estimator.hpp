#ifndef USDE_ESTIMATOR_HPP_
#define USDE_ESTIMATOR_HPP_

#include "usde/model.hpp"
#include "usde/types.hpp"

namespace usde {

/// Auxiliary variables of the filtered-dynamics estimator:
/// P = M(q) qd (generalized momentum), H = -C(q,qd)^T qd + g(q).
/// Both are recomputed from the nominal model at every step, never
/// integrated, so Pdot + H = tau + d holds along any trajectory.
struct AuxiliaryVars {
  JointVec P;
  JointVec H;
};

AuxiliaryVars compute_auxiliary(const ManipulatorModel& nominal,
                                const JointVec& q, const JointVec& qd);

/// Same computation from pre-evaluated dynamics terms (the simulation loop
/// evaluates M, C, g once per step and shares them).
AuxiliaryVars compute_auxiliary(const JointMat& M, const JointMat& C,
                                const JointVec& g, const JointVec& qd);

/// Exact discretizations of the first-order lag k ydot + y = x, y(0) = 0.
///
/// step_held advances one interval with the input held constant
/// (y <- a y + (1-a) x, a = exp(-dt/k)); step_linear advances with the
/// input varying linearly between two endpoint samples. Both are the
/// closed-form solutions for their input model, stable for any dt/k.
class FirstOrderLag {
 public:
  FirstOrderLag(int n, double k);

  void step_held(const JointVec& x, double dt);
  void step_linear(const JointVec& x_start, const JointVec& x_end, double dt);

  const JointVec& value() const { return y_; }
  double filter_constant() const { return k_; }
  void reset() { y_.setZero(); }

 private:
  double k_;
  JointVec y_;
};

/// Disturbance estimator built from first-order filtered dynamics.
///
///   d_hat = (P - P_f)/k + H_f - tau_f
///
/// with P_f, H_f, tau_f the lag-filtered auxiliary variables and applied
/// torque, all sharing one scalar filter constant k and zero initial
/// state. No joint acceleration is differentiated and the inertia matrix
/// is never inverted.
///
/// Discretization: P and H are sampled once per control period and
/// filtered with the linear-interpolation (first-order-hold) update; the
/// applied torque is genuinely piecewise constant under zero-order hold,
/// so its filter uses the held-input update with the torque of the
/// elapsed interval. The first update() primes the sample history: the
/// memories stay at zero and the estimate equals P/k there (zero when
/// starting at rest).
class UsdeEstimator {
 public:
  UsdeEstimator(int dof, double k);

  /// Advance the filters over one control period and return the updated
  /// estimate. `tau_prev` is the torque that was applied during the
  /// elapsed interval; it is unused on the priming call.
  const JointVec& update(const JointVec& P, const JointVec& H,
                         const JointVec& tau_prev, double dt);

  const JointVec& d_hat() const { return d_hat_; }
  const JointVec& P_f() const { return P_f_.value(); }
  const JointVec& H_f() const { return H_f_.value(); }
  const JointVec& tau_f() const { return tau_f_.value(); }
  double filter_constant() const { return k_; }
  bool initialized() const { return initialized_; }

  void reset();

 private:
  int dof_;
  double k_;
  FirstOrderLag P_f_, H_f_, tau_f_;
  JointVec P_prev_, H_prev_;
  JointVec d_hat_;
  bool initialized_ = false;
};

}  // namespace usde

#endif  // USDE_ESTIMATOR_HPP_
