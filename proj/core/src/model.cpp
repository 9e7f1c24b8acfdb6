#include "usde/model.hpp"

#include <cmath>

#include "chain_dynamics.hpp"

namespace usde {

namespace {

void validate_links(const std::vector<LinkParams>& links) {
  if (links.empty()) {
    throw std::invalid_argument("model: needs at least one link");
  }
  for (size_t i = 0; i < links.size(); ++i) {
    const auto& l = links[i];
    const std::string tag = "link " + std::to_string(i + 1);
    if (!(l.mass > 0.0)) throw std::invalid_argument(tag + ": mass must be > 0");
    if (!(l.inertia > 0.0)) throw std::invalid_argument(tag + ": inertia must be > 0");
    if (l.length < 0.0) throw std::invalid_argument(tag + ": length must be >= 0");
    if (l.axis.norm() < 1e-12) throw std::invalid_argument(tag + ": joint axis is zero");
    if (!l.com.allFinite() || !l.axis.allFinite() || !l.offset.allFinite()) {
      throw std::invalid_argument(tag + ": non-finite parameters");
    }
  }
}

// Closed-form planar 2R evaluators. Angles measured from the +x axis,
// relative at the elbow; gravity [0, gy, 0].
struct Planar {
  double m1, m2, l1, c1, c2, I1, I2, gy;

  explicit Planar(const ManipulatorModel& m) {
    const auto& L = m.links();
    m1 = L[0].mass;
    m2 = L[1].mass;
    l1 = L[0].length;
    c1 = L[0].com.x();
    c2 = L[1].com.x();
    I1 = L[0].inertia;
    I2 = L[1].inertia;
    gy = m.gravity_vector().y();
  }

  JointMat mass(const JointVec& q) const {
    const double c2q = std::cos(q[1]);
    JointMat M(2, 2);
    M(0, 0) = I1 + I2 + c1 * c1 * m1 + c2 * c2 * m2 + 2.0 * c2 * l1 * m2 * c2q +
              l1 * l1 * m2;
    M(0, 1) = I2 + c2 * c2 * m2 + c2 * l1 * m2 * c2q;
    M(1, 0) = M(0, 1);
    M(1, 1) = I2 + c2 * c2 * m2;
    return M;
  }

  JointMat coriolis(const JointVec& q, const JointVec& qd) const {
    const double h = c2 * l1 * m2 * std::sin(q[1]);
    JointMat C(2, 2);
    C(0, 0) = -h * qd[1];
    C(0, 1) = -h * (qd[0] + qd[1]);
    C(1, 0) = h * qd[0];
    C(1, 1) = 0.0;
    return C;
  }

  JointVec gravity(const JointVec& q) const {
    JointVec g(2);
    g[0] = -gy * (c1 * m1 * std::cos(q[0]) +
                  m2 * (c2 * std::cos(q[0] + q[1]) + l1 * std::cos(q[0])));
    g[1] = -gy * c2 * m2 * std::cos(q[0] + q[1]);
    return g;
  }
};

}  // namespace

ManipulatorModel ManipulatorModel::planar_two_link(
    const std::vector<LinkParams>& links, const Eigen::Vector3d& gravity) {
  validate_links(links);
  if (links.size() != 2) {
    throw std::invalid_argument("planar 2R model: exactly two links required");
  }
  for (const auto& l : links) {
    if ((l.axis.normalized() - Eigen::Vector3d::UnitZ()).norm() > 1e-9) {
      throw std::invalid_argument("planar 2R model: joint axes must be +z");
    }
    if (std::abs(l.com.y()) > 1e-12 || std::abs(l.com.z()) > 1e-12) {
      throw std::invalid_argument("planar 2R model: COM must lie on the link x axis");
    }
  }
  if (std::abs(gravity.x()) > 1e-12 || std::abs(gravity.z()) > 1e-12) {
    throw std::invalid_argument("planar 2R model: gravity must be [0, gy, 0]");
  }
  ManipulatorModel m;
  m.kind_ = ModelKind::PlanarTwoLink;
  m.links_ = links;
  m.links_[0].offset.setZero();
  m.links_[1].offset = Eigen::Vector3d(links[0].length, 0.0, 0.0);
  m.gravity_ = gravity;
  m.compile_bodies();
  return m;
}

ManipulatorModel ManipulatorModel::chain(const std::vector<LinkParams>& links,
                                         const Eigen::Vector3d& gravity) {
  validate_links(links);
  if (!gravity.allFinite()) {
    throw std::invalid_argument("model: non-finite gravity");
  }
  ManipulatorModel m;
  m.kind_ = ModelKind::Chain;
  m.links_ = links;
  for (auto& l : m.links_) l.axis.normalize();
  m.gravity_ = gravity;
  m.compile_bodies();
  return m;
}

void ManipulatorModel::compile_bodies() {
  bodies_.clear();
  bodies_.reserve(links_.size());
  for (const auto& l : links_) {
    Body b;
    b.mass = l.mass;
    b.com = l.com;
    const Eigen::Vector3d a = l.axis.normalized();
    b.inertia = l.inertia * (a * a.transpose());
    bodies_.push_back(b);
  }
}

JointMat ManipulatorModel::mass_matrix(const JointVec& q) const {
  check_joint_vec(q, dof(), "q");
  if (kind_ == ModelKind::PlanarTwoLink) return Planar(*this).mass(q);
  return ChainDynamics::mass_matrix(*this, q);
}

JointMat ManipulatorModel::coriolis_matrix(const JointVec& q,
                                           const JointVec& qd) const {
  check_joint_vec(q, dof(), "q");
  check_joint_vec(qd, dof(), "qd");
  if (kind_ == ModelKind::PlanarTwoLink) return Planar(*this).coriolis(q, qd);
  return ChainDynamics::coriolis_matrix(*this, q, qd);
}

JointVec ManipulatorModel::gravity_torque(const JointVec& q) const {
  check_joint_vec(q, dof(), "q");
  if (kind_ == ModelKind::PlanarTwoLink) return Planar(*this).gravity(q);
  return ChainDynamics::gravity_torque(*this, q);
}

JointVec ManipulatorModel::bias_torque(const JointVec& q,
                                       const JointVec& qd) const {
  check_joint_vec(q, dof(), "q");
  check_joint_vec(qd, dof(), "qd");
  if (kind_ == ModelKind::PlanarTwoLink) {
    const Planar p(*this);
    return p.coriolis(q, qd) * qd + p.gravity(q);
  }
  return ChainDynamics::bias_torque(*this, q, qd);
}

JointVec ManipulatorModel::forward_dynamics(const JointVec& q,
                                            const JointVec& qd,
                                            const JointVec& tau,
                                            const JointVec& d) const {
  check_joint_vec(q, dof(), "q");
  check_joint_vec(qd, dof(), "qd");
  check_joint_vec(tau, dof(), "tau");
  check_joint_vec(d, dof(), "d");
  ++fd_calls_;
  const JointVec rhs = tau + d - bias_torque(q, qd);
  const JointMat M = mass_matrix(q);
  const JointVec qdd = M.llt().solve(rhs);
  if (!qdd.allFinite()) {
    throw std::runtime_error("forward_dynamics: non-finite acceleration");
  }
  return qdd;
}

ManipulatorModel ManipulatorModel::with_point_mass(
    double mass, const Eigen::Vector3d& point) const {
  if (!(mass >= 0.0) || !point.allFinite()) {
    throw std::invalid_argument("with_point_mass: bad payload parameters");
  }
  ManipulatorModel m = *this;
  m.fd_calls_ = 0;
  if (mass == 0.0) return m;

  if (kind_ == ModelKind::PlanarTwoLink) {
    if (std::abs(point.y()) > 1e-12 || std::abs(point.z()) > 1e-12) {
      throw std::invalid_argument(
          "with_point_mass: planar payload must lie on the link x axis");
    }
    LinkParams& L = m.links_[1];
    const double r = point.x();
    const double mt = L.mass + mass;
    const double ct = (L.mass * L.com.x() + mass * r) / mt;
    L.inertia += L.mass * (L.com.x() - ct) * (L.com.x() - ct) +
                 mass * (r - ct) * (r - ct);
    L.mass = mt;
    L.com = Eigen::Vector3d(ct, 0.0, 0.0);
    m.compile_bodies();
    return m;
  }

  Body& b = m.bodies_.back();
  const double mt = b.mass + mass;
  const Eigen::Vector3d ct = (b.mass * b.com + mass * point) / mt;
  auto steiner = [](double mb, const Eigen::Vector3d& r) -> Eigen::Matrix3d {
    return mb * (r.squaredNorm() * Eigen::Matrix3d::Identity() -
                 r * r.transpose());
  };
  b.inertia = b.inertia + steiner(b.mass, b.com - ct) + steiner(mass, point - ct);
  b.mass = mt;
  b.com = ct;
  return m;
}

ManipulatorModel ManipulatorModel::scaled(double mass_scale,
                                          double inertia_scale) const {
  check_positive(mass_scale, "mass_scale");
  check_positive(inertia_scale, "inertia_scale");
  ManipulatorModel m = *this;
  m.fd_calls_ = 0;
  for (auto& l : m.links_) {
    l.mass *= mass_scale;
    l.inertia *= inertia_scale;
  }
  for (auto& b : m.bodies_) {
    b.mass *= mass_scale;
    b.inertia *= inertia_scale;
  }
  return m;
}

}  // namespace usde
