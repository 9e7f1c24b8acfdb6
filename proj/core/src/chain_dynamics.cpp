#include "chain_dynamics.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace usde {

namespace {

template <typename S>
using Vec3 = Eigen::Matrix<S, 3, 1>;
template <typename S>
using Mat3 = Eigen::Matrix<S, 3, 3>;
template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

inline Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d K;
  K << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return K;
}

// Rodrigues rotation about a (real) unit axis by a possibly complex angle.
template <typename S>
Mat3<S> rodrigues(const Eigen::Vector3d& axis, const S& angle) {
  using std::cos;
  using std::sin;
  const Mat3<S> K = skew(axis).cast<S>();
  const S s = sin(angle);
  const S c = cos(angle);
  return Mat3<S>::Identity() + s * K + (S(1) - c) * (K * K).eval();
}

// Non-conjugating dot/cross. Eigen's dot() and cross() conjugate complex
// operands, which would destroy the imaginary part carrying the
// complex-step derivative.
template <typename S>
S dot3(const Vec3<S>& a, const Vec3<S>& b) {
  return a.x() * b.x() + a.y() * b.y() + a.z() * b.z();
}

template <typename S>
Vec3<S> cross3(const Vec3<S>& a, const Vec3<S>& b) {
  return Vec3<S>(a.y() * b.z() - a.z() * b.y(), a.z() * b.x() - a.x() * b.z(),
                 a.x() * b.y() - a.y() * b.x());
}

// World-frame kinematics of every joint frame.
template <typename S>
struct Frames {
  std::vector<Mat3<S>> R;     // link rotations, R[0] = base
  std::vector<Vec3<S>> p;     // joint origins, p[0] = base origin
  std::vector<Vec3<S>> axis;  // world joint axes, 1-based at [i]

  Frames(const std::vector<LinkParams>& links,
         const Eigen::Matrix<S, Eigen::Dynamic, 1>& q) {
    const size_t n = links.size();
    R.resize(n + 1);
    p.resize(n + 1);
    axis.resize(n + 1);
    R[0] = Mat3<S>::Identity();
    p[0] = Vec3<S>::Zero();
    for (size_t i = 1; i <= n; ++i) {
      const LinkParams& l = links[i - 1];
      p[i] = p[i - 1] + R[i - 1] * l.offset.template cast<S>();
      axis[i] = R[i - 1] * l.axis.template cast<S>();
      R[i] = (R[i - 1] * rodrigues(l.axis, q[i - 1])).eval();
    }
  }
};

struct BodyArrays {
  std::vector<double> mass;
  std::vector<Eigen::Vector3d> com;
  std::vector<Eigen::Matrix3d> inertia;
};

// M(q) = sum_i m_i Jv_i^T Jv_i + Jw_i^T (R I_c R^T) Jw_i, assembled
// column-by-column from the world joint axes.
template <typename S>
MatX<S> mass_matrix_impl(const std::vector<LinkParams>& links,
                         const BodyArrays& bodies,
                         const Eigen::Matrix<S, Eigen::Dynamic, 1>& q) {
  const int n = static_cast<int>(links.size());
  const Frames<S> fk(links, q);
  MatX<S> M = MatX<S>::Zero(n, n);

  std::vector<Vec3<S>> jv(n);
  for (int i = 1; i <= n; ++i) {
    const Vec3<S> pc = fk.p[i] + fk.R[i] * bodies.com[i - 1].template cast<S>();
    const Mat3<S> Iw = fk.R[i] * bodies.inertia[i - 1].template cast<S>() *
                       fk.R[i].transpose();
    for (int j = 1; j <= i; ++j) {
      jv[j - 1] = cross3<S>(fk.axis[j], (pc - fk.p[j]).eval());
    }
    for (int j = 1; j <= i; ++j) {
      for (int l = 1; l <= j; ++l) {
        const S mv = bodies.mass[i - 1] * dot3<S>(jv[j - 1], jv[l - 1]) +
                     dot3<S>(fk.axis[j], (Iw * fk.axis[l]).eval());
        M(j - 1, l - 1) += mv;
        if (l != j) M(l - 1, j - 1) += mv;
      }
    }
  }
  return M;
}

// Accepts the model's private Body type via template deduction.
template <typename BodyT>
BodyArrays body_arrays_from(const std::vector<BodyT>& bodies) {
  BodyArrays v;
  for (const auto& b : bodies) {
    v.mass.push_back(b.mass);
    v.com.push_back(b.com);
    v.inertia.push_back(b.inertia);
  }
  return v;
}

}  // namespace

JointMat ChainDynamics::mass_matrix(const ManipulatorModel& m,
                                    const JointVec& q) {
  return mass_matrix_impl<double>(m.links_, body_arrays_from(m.bodies_), q);
}

JointMat ChainDynamics::coriolis_matrix(const ManipulatorModel& m,
                                        const JointVec& q,
                                        const JointVec& qd) {
  using C = std::complex<double>;
  const int n = m.dof();
  const BodyArrays bodies = body_arrays_from(m.bodies_);

  // dM[k] = Im(M(q + i h e_k)) / h, exact to machine precision.
  const double h = 1e-100;
  std::vector<JointMat> dM(n);
  Eigen::Matrix<C, Eigen::Dynamic, 1> qc = q.cast<C>();
  for (int k = 0; k < n; ++k) {
    qc[k] = C(q[k], h);
    const MatX<C> Mc = mass_matrix_impl<C>(m.links_, bodies, qc);
    dM[k] = Mc.imag() / h;
    qc[k] = C(q[k], 0.0);
  }

  // Christoffel symbols of the first kind.
  JointMat Cm = JointMat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double cij = 0.0;
      for (int k = 0; k < n; ++k) {
        cij += 0.5 * (dM[k](i, j) + dM[j](i, k) - dM[i](j, k)) * qd[k];
      }
      Cm(i, j) = cij;
    }
  }
  return Cm;
}

JointVec ChainDynamics::gravity_torque(const ManipulatorModel& m,
                                       const JointVec& q) {
  const int n = m.dof();
  const Frames<double> fk(m.links_, q);
  JointVec g = JointVec::Zero(n);
  const Eigen::Vector3d gv = m.gravity_vector();
  for (int i = 1; i <= n; ++i) {
    const Eigen::Vector3d pc = fk.p[i] + fk.R[i] * m.bodies_[i - 1].com;
    const double mi = m.bodies_[i - 1].mass;
    for (int k = 1; k <= i; ++k) {
      g[k - 1] -= mi * gv.dot(fk.axis[k].cross(pc - fk.p[k]));
    }
  }
  return g;
}

JointVec ChainDynamics::bias_torque(const ManipulatorModel& m,
                                    const JointVec& q, const JointVec& qd) {
  const int n = m.dof();
  const Frames<double> fk(m.links_, q);

  // Forward pass with zero joint accelerations; gravity enters through a
  // fictitious base acceleration of -g.
  std::vector<Eigen::Vector3d> w(n + 1), al(n + 1), acc(n + 1), acom(n + 1);
  w[0].setZero();
  al[0].setZero();
  acc[0] = -m.gravity_vector();
  for (int i = 1; i <= n; ++i) {
    const Eigen::Vector3d ai = fk.axis[i];
    const Eigen::Vector3d dp = fk.p[i] - fk.p[i - 1];
    acc[i] =
        acc[i - 1] + al[i - 1].cross(dp) + w[i - 1].cross(w[i - 1].cross(dp));
    w[i] = w[i - 1] + ai * qd[i - 1];
    al[i] = al[i - 1] + w[i - 1].cross(ai) * qd[i - 1];
    const Eigen::Vector3d r = fk.R[i] * m.bodies_[i - 1].com;
    acom[i] = acc[i] + al[i].cross(r) + w[i].cross(w[i].cross(r));
  }

  // Backward pass: forces and moments about each joint origin.
  JointVec tau = JointVec::Zero(n);
  Eigen::Vector3d f_child = Eigen::Vector3d::Zero();
  Eigen::Vector3d n_child = Eigen::Vector3d::Zero();
  Eigen::Vector3d p_child = Eigen::Vector3d::Zero();
  for (int i = n; i >= 1; --i) {
    const Eigen::Vector3d r = fk.R[i] * m.bodies_[i - 1].com;
    const Eigen::Matrix3d Iw =
        fk.R[i] * m.bodies_[i - 1].inertia * fk.R[i].transpose();
    const Eigen::Vector3d F = m.bodies_[i - 1].mass * acom[i];
    const Eigen::Vector3d N = Iw * al[i] + w[i].cross(Iw * w[i]);

    Eigen::Vector3d nn = N + r.cross(F);
    if (i < n) {
      nn += n_child + (p_child - fk.p[i]).cross(f_child);
    }
    tau[i - 1] = fk.axis[i].dot(nn);
    f_child = F + f_child;
    n_child = nn;
    p_child = fk.p[i];
  }
  return tau;
}

}  // namespace usde
