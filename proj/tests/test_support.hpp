#ifndef USDE_TEST_SUPPORT_HPP_
#define USDE_TEST_SUPPORT_HPP_

#include <random>
#include <vector>

#include "usde/model.hpp"

namespace usde::test {

// Unit-parameter planar 2R arm: masses/lengths/inertias 1, COM at the
// link midpoint, gravity 9.81 along -y.
inline ManipulatorModel unit_planar2r(double gy = -9.81) {
  LinkParams l;
  l.mass = 1.0;
  l.length = 1.0;
  l.com = Eigen::Vector3d(0.5, 0.0, 0.0);
  l.inertia = 1.0;
  l.axis = Eigen::Vector3d::UnitZ();
  return ManipulatorModel::planar_two_link({l, l},
                                           Eigen::Vector3d(0.0, gy, 0.0));
}

// The same arm expressed as a generic chain (cross-validation path).
inline ManipulatorModel unit_planar2r_as_chain(double gy = -9.81) {
  LinkParams l1;
  l1.mass = 1.0;
  l1.length = 1.0;
  l1.com = Eigen::Vector3d(0.5, 0.0, 0.0);
  l1.inertia = 1.0;
  l1.axis = Eigen::Vector3d::UnitZ();
  l1.offset = Eigen::Vector3d::Zero();
  LinkParams l2 = l1;
  l2.offset = Eigen::Vector3d(1.0, 0.0, 0.0);
  return ManipulatorModel::chain({l1, l2}, Eigen::Vector3d(0.0, gy, 0.0));
}

// Small spatial 3R chain with mixed axes for property tests.
inline ManipulatorModel mixed_chain3() {
  std::vector<LinkParams> links(3);
  links[0].mass = 2.0;
  links[0].com = Eigen::Vector3d(0.0, 0.02, 0.15);
  links[0].inertia = 0.08;
  links[0].length = 0.3;
  links[0].axis = Eigen::Vector3d::UnitZ();
  links[0].offset = Eigen::Vector3d(0.0, 0.0, 0.1);
  links[1].mass = 1.5;
  links[1].com = Eigen::Vector3d(0.0, -0.01, 0.12);
  links[1].inertia = 0.05;
  links[1].length = 0.25;
  links[1].axis = Eigen::Vector3d::UnitY();
  links[1].offset = Eigen::Vector3d(0.0, 0.0, 0.3);
  links[2].mass = 0.8;
  links[2].com = Eigen::Vector3d(0.05, 0.0, 0.1);
  links[2].inertia = 0.02;
  links[2].length = 0.2;
  links[2].axis = Eigen::Vector3d(1.0, 1.0, 0.0).normalized();
  links[2].offset = Eigen::Vector3d(0.0, 0.05, 0.25);
  return ManipulatorModel::chain(links, Eigen::Vector3d(0.0, 0.0, -9.81));
}

inline JointVec random_vec(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  JointVec v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace usde::test

#include "usde/scenario.hpp"

namespace usde::test {

// In-code planar 2R closed-loop scenario: exact nominal model, no friction
// or noise, moderate two-leg motion with holds. Disturbances are left to
// the caller.
inline Scenario planar_scenario(double duration = 4.0) {
  Scenario sc;
  sc.nominal = unit_planar2r();
  sc.plant = sc.nominal;
  sc.control_dt = 1e-3;
  sc.physics_substeps = 10;
  sc.duration = duration;

  JointVec a(2), b(2);
  a << 0.3, 0.4;
  b << 1.0, -0.5;
  const double span = std::min(duration, 4.0);
  sc.trajectory = JointTrajectory(
      {0.0, 0.375 * span, 0.625 * span, 0.875 * span}, {a, b, b, a});
  sc.trajectory.set_horizon(duration);
  sc.q0 = a;
  sc.qd0 = JointVec::Zero(2);

  sc.friction.viscous = JointVec::Zero(2);
  sc.friction.coulomb = JointVec::Zero(2);
  sc.external.constant = JointVec::Zero(2);
  sc.external.sin_amp = JointVec::Zero(2);
  return sc;
}

inline ControllerConfig planar_config() {
  ControllerConfig cfg = ControllerConfig::defaults(2);
  cfg.eta = JointVec::Constant(2, 10.0);
  cfg.K = JointVec::Constant(2, 10.0);
  cfg.K_lower = cfg.K;
  cfg.T1 = JointVec::Constant(2, 4.0);
  cfg.T2 = JointVec::Constant(2, 12.0);
  cfg.tau_limit = JointVec::Constant(2, 200.0);
  cfg.filter_k = 0.08;
  return cfg;
}

}  // namespace usde::test

#endif  // USDE_TEST_SUPPORT_HPP_
