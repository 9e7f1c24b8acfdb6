#ifndef USDE_TRAJECTORY_HPP_
#define USDE_TRAJECTORY_HPP_

#include <vector>

#include "usde/types.hpp"

namespace usde {

struct TrajectoryPoint {
  double t = 0.0;
  JointVec q_des;
  JointVec qd_des;
  JointVec qdd_des;
};

/// Piecewise joint-space reference built from timed waypoints. Segments
/// between distinct waypoints are quintic polynomials with zero boundary
/// velocity and acceleration; segments between equal waypoints hold the
/// pose. The last waypoint is held up to the horizon. qd_des and qdd_des
/// are the exact derivatives of q_des (C^2 everywhere).
class JointTrajectory {
 public:
  JointTrajectory() = default;
  JointTrajectory(std::vector<double> times, std::vector<JointVec> points);

  /// Valid for t in [first knot, horizon]; throws std::out_of_range
  /// otherwise.
  TrajectoryPoint sample(double t) const;

  void set_horizon(double t_end);
  double horizon() const { return horizon_; }
  const std::vector<double>& knot_times() const { return times_; }
  int dof() const { return dof_; }

 private:
  std::vector<double> times_;
  std::vector<JointVec> points_;
  double horizon_ = 0.0;
  int dof_ = 0;
};

}  // namespace usde

#endif  // USDE_TRAJECTORY_HPP_
