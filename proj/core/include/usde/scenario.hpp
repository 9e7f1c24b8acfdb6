#ifndef USDE_SCENARIO_HPP_
#define USDE_SCENARIO_HPP_

#include <cstdint>
#include <string>

#include "usde/controllers.hpp"
#include "usde/model.hpp"
#include "usde/trajectory.hpp"

namespace usde {

/// End-effector point mass grabbed and released at fixed times. The mass
/// is merged into the terminal link of the TRUE plant while attached; the
/// nominal model never changes. Attach/detach instants are snapped to the
/// control grid.
struct PayloadSpec {
  double mass = 0.0;  ///< [kg]; 0 disables the payload
  Eigen::Vector3d offset{0.0, 0.0, 0.0};  ///< attachment point, last-link frame
  double attach_time = 0.0;
  double detach_time = 0.0;
};

/// Plant-side joint friction, part of the lumped disturbance:
/// tau_fric = -viscous .* qd - coulomb .* tanh(steepness qd).
struct FrictionSpec {
  JointVec viscous;  ///< [N·m·s/rad]
  JointVec coulomb;  ///< [N·m]
  double steepness = 100.0;
};

/// Scripted external joint torque applied to the plant:
/// d_ext(t) = constant + sin_amp * sin(sin_freq t + sin_phase).
struct ExternalTorqueSpec {
  JointVec constant;
  JointVec sin_amp;
  double sin_freq = 0.0;
  double sin_phase = 0.0;
};

/// Full description of one closed-loop experiment.
struct Scenario {
  ManipulatorModel nominal;  ///< controller/estimator knowledge
  ManipulatorModel plant;    ///< true dynamics (payload handled separately)

  double control_dt = 1e-3;
  int physics_substeps = 10;
  double duration = 1.0;

  JointTrajectory trajectory;
  JointVec q0;   ///< initial pose (defaults to the trajectory start)
  JointVec qd0;  ///< initial velocity (defaults to zero)

  PayloadSpec payload;
  FrictionSpec friction;
  ExternalTorqueSpec external;
  double velocity_noise_std = 0.0;  ///< on the controller's copy of qd only
  std::uint64_t seed = 0;

  void validate() const;  // throws with field paths

  /// Phase boundaries for per-phase metrics (the trajectory knot times).
  std::vector<double> phase_times() const;
};

/// A scenario file bundles the plant setup with the controller gains and
/// a default variant.
struct ScenarioFile {
  Scenario scenario;
  ControllerConfig control;
  ControllerVariant default_variant = ControllerVariant::Fg;
};

/// Errors carry the offending field path, e.g. "[sim].control_dt".
struct ScenarioError : std::runtime_error {
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

ScenarioFile load_scenario_file(const std::string& path);
ScenarioFile load_scenario_string(const std::string& text,
                                  const std::string& origin = "");

}  // namespace usde

#endif  // USDE_SCENARIO_HPP_
