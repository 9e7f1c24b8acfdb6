#include "usde/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace usde {

JointTrajectory::JointTrajectory(std::vector<double> times,
                                 std::vector<JointVec> points)
    : times_(std::move(times)), points_(std::move(points)) {
  if (times_.size() < 2 || times_.size() != points_.size()) {
    throw std::invalid_argument(
        "trajectory: need matching times/points with at least two knots");
  }
  dof_ = static_cast<int>(points_.front().size());
  for (size_t i = 0; i < times_.size(); ++i) {
    check_joint_vec(points_[i], dof_, "trajectory point");
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw std::invalid_argument("trajectory: knot times must be increasing");
    }
  }
  horizon_ = times_.back();
}

void JointTrajectory::set_horizon(double t_end) {
  if (t_end < times_.back()) {
    throw std::invalid_argument("trajectory: horizon before last knot");
  }
  horizon_ = t_end;
}

TrajectoryPoint JointTrajectory::sample(double t) const {
  constexpr double kEps = 1e-12;
  if (t < times_.front() - kEps || t > horizon_ + kEps) {
    throw std::out_of_range("trajectory: t outside [start, horizon]");
  }
  t = std::clamp(t, times_.front(), horizon_);

  TrajectoryPoint out;
  out.t = t;
  if (t >= times_.back()) {
    out.q_des = points_.back();
    out.qd_des = JointVec::Zero(dof_);
    out.qdd_des = JointVec::Zero(dof_);
    return out;
  }

  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const size_t seg = static_cast<size_t>(it - times_.begin()) - 1;
  const double t0 = times_[seg];
  const double T = times_[seg + 1] - t0;
  const JointVec& a = points_[seg];
  const JointVec& b = points_[seg + 1];

  const double u = (t - t0) / T;
  // 10u^3 - 15u^4 + 6u^5 and its scaled derivatives.
  const double s = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
  const double sd = u * u * (30.0 + u * (-60.0 + 30.0 * u)) / T;
  const double sdd = u * (60.0 + u * (-180.0 + 120.0 * u)) / (T * T);

  out.q_des = a + s * (b - a);
  out.qd_des = sd * (b - a);
  out.qdd_des = sdd * (b - a);
  return out;
}

}  // namespace usde
