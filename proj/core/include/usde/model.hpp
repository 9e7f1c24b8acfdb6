#ifndef USDE_MODEL_HPP_
#define USDE_MODEL_HPP_

#include <cstdint>
#include <vector>

#include "usde/types.hpp"

namespace usde {

/// Per-link description of a serial revolute chain.
struct LinkParams {
  double mass = 1.0;                        ///< [kg]
  Eigen::Vector3d com{0.5, 0.0, 0.0};       ///< COM in link frame [m]
  double inertia = 1.0;                     ///< about the joint axis through the COM [kg m^2]
  double length = 1.0;                      ///< joint-to-tip extent [m]
  Eigen::Vector3d axis{0.0, 0.0, 1.0};      ///< joint axis, link frame
  Eigen::Vector3d offset{0.0, 0.0, 0.0};    ///< joint origin offset from parent joint, parent frame [m]
};

enum class ModelKind { PlanarTwoLink, Chain };

/// Rigid-body dynamics of an n-DoF serial manipulator,
///
///   M(q) qdd + C(q,qd) qd + g(q) = tau + d.
///
/// Two implementations sit behind the same interface: a closed-form planar
/// 2R arm (angles from the +x axis, gravity along -y) and a generic
/// revolute chain evaluated with Jacobian/Newton-Euler recursions. The
/// Coriolis matrix is always the Christoffel form, so (Mdot - 2C) is
/// skew-symmetric and Mdot = C + C^T.
///
/// Link bodies of the chain are modeled as a point mass at the COM plus a
/// rotational inertia about the joint axis (optionally a full tensor after
/// payload merges). This keeps M(q) symmetric positive definite for any
/// configuration as long as every axial inertia is positive.
class ManipulatorModel {
 public:
  /// Zero-DoF placeholder; assign from one of the factories before use.
  ManipulatorModel() = default;

  /// Planar 2R arm. Requires exactly two links, z joint axes and gravity
  /// of the form [0, gy, 0]. COM offsets must lie on the link x axis.
  static ManipulatorModel planar_two_link(const std::vector<LinkParams>& links,
                                          const Eigen::Vector3d& gravity);

  /// Generic revolute serial chain.
  static ManipulatorModel chain(const std::vector<LinkParams>& links,
                                const Eigen::Vector3d& gravity);

  int dof() const { return static_cast<int>(links_.size()); }
  ModelKind kind() const { return kind_; }
  const std::vector<LinkParams>& links() const { return links_; }
  const Eigen::Vector3d& gravity_vector() const { return gravity_; }

  /// Inertia matrix M(q); symmetric positive definite.
  JointMat mass_matrix(const JointVec& q) const;

  /// Christoffel-form Coriolis/centrifugal matrix C(q, qd).
  JointMat coriolis_matrix(const JointVec& q, const JointVec& qd) const;

  /// Joint-space gravity torque g(q).
  JointVec gravity_torque(const JointVec& q) const;

  /// Velocity-product plus gravity bias C(q,qd) qd + g(q). O(n) recursion
  /// on the chain path; used by the plant integrator.
  JointVec bias_torque(const JointVec& q, const JointVec& qd) const;

  /// qdd = M(q)^{-1} (tau + d - C qd - g). This is the simulated plant's
  /// route; the estimator/controller path never calls it.
  JointVec forward_dynamics(const JointVec& q, const JointVec& qd,
                            const JointVec& tau, const JointVec& d) const;

  /// World position of the terminal link tip.
  Eigen::Vector3d tip_position(const JointVec& q) const;

  /// Copy of the model with a point mass rigidly attached to the last link
  /// at `point` (link frame). Exact parallel-axis merge.
  ManipulatorModel with_point_mass(double mass,
                                   const Eigen::Vector3d& point) const;

  /// Copy with all link masses and inertias scaled (plant-vs-nominal
  /// mismatch knob).
  ManipulatorModel scaled(double mass_scale, double inertia_scale) const;

  /// Number of forward_dynamics invocations on this instance. M(q) is
  /// inverted only there, so a zero count certifies an inverse-free path.
  std::int64_t forward_dynamics_calls() const { return fd_calls_; }

 private:
  struct Body {
    double mass;
    Eigen::Vector3d com;      // link frame
    Eigen::Matrix3d inertia;  // central, link frame
  };

  void compile_bodies();

  ModelKind kind_ = ModelKind::Chain;
  std::vector<LinkParams> links_;
  std::vector<Body> bodies_;
  Eigen::Vector3d gravity_{0.0, 0.0, -9.81};
  mutable std::int64_t fd_calls_ = 0;

  friend struct ChainDynamics;
};

}  // namespace usde

#endif  // USDE_MODEL_HPP_
