#ifndef USDE_TYPES_HPP_
#define USDE_TYPES_HPP_

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace usde {

/// Joint-space vector (length = DoF). Units depend on role: rad, rad/s,
/// rad/s^2 or N·m.
using JointVec = Eigen::VectorXd;

/// Joint-space square matrix (DoF x DoF).
using JointMat = Eigen::MatrixXd;

inline void check_joint_vec(const JointVec& v, int n, const char* name) {
  if (v.size() != n) {
    throw std::invalid_argument(std::string(name) + ": expected length " +
                                std::to_string(n) + ", got " +
                                std::to_string(v.size()));
  }
  if (!v.allFinite()) {
    throw std::invalid_argument(std::string(name) + ": non-finite entries");
  }
}

inline void check_positive(double x, const char* name) {
  if (!(x > 0.0)) {
    throw std::invalid_argument(std::string(name) + " must be > 0");
  }
}

}  // namespace usde

#endif  // USDE_TYPES_HPP_
