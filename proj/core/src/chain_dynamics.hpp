#ifndef USDE_CHAIN_DYNAMICS_HPP_
#define USDE_CHAIN_DYNAMICS_HPP_

#include "usde/model.hpp"

namespace usde {

/// Generic revolute-chain evaluators (internal). The mass matrix is
/// assembled from link Jacobians; C(q,qd) comes from Christoffel symbols
/// with dM/dq_k obtained by complex-step differentiation of a
/// scalar-templated mass-matrix evaluator, which makes the skew-symmetry
/// identity hold to machine precision. The O(n) bias recursion
/// (Newton-Euler with zero joint acceleration) serves the plant integrator.
struct ChainDynamics {
  static JointMat mass_matrix(const ManipulatorModel& m, const JointVec& q);
  static JointMat coriolis_matrix(const ManipulatorModel& m, const JointVec& q,
                                  const JointVec& qd);
  static JointVec gravity_torque(const ManipulatorModel& m, const JointVec& q);
  static JointVec bias_torque(const ManipulatorModel& m, const JointVec& q,
                              const JointVec& qd);
};

}  // namespace usde

#endif  // USDE_CHAIN_DYNAMICS_HPP_
