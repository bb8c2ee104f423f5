#ifndef FICSIM_ROBOT_HPP
#define FICSIM_ROBOT_HPP

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <string>

#include "errors.hpp"

namespace ficsim {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct JointState {
  Vec q;
  Vec qdot;
};

struct TaskState {
  Vec x;
  Vec xdot;
};

// Operational-space terms of the manipulator equation
//   M(q) xdd + C(q,qd) xd + G(q) = u + f
struct DynamicsTerms {
  Mat M;
  Mat C;
  Vec G;
};

// Non-redundant rigid-body model: n task dimensions = n joints, square
// Jacobian. Joint-space C is built from Christoffel symbols so that
// Mdot - 2C is skew-symmetric (the controller's stability argument needs it).
class RobotModel {
 public:
  virtual ~RobotModel() = default;

  virtual int n() const = 0;
  virtual Vec forward_kinematics(const Vec& q) const = 0;
  virtual void jacobian(const Vec& q, const Vec& qdot, Mat& J, Mat& Jdot) const = 0;
  virtual void joint_dynamics(const Vec& q, const Vec& qdot, Mat& Mq, Mat& Cq,
                              Vec& Gq) const = 0;
  virtual bool singular(const Vec& q, double eps_sing) const {
    Mat J, Jd;
    jacobian(q, Vec::Zero(q.size()), J, Jd);
    return std::abs(J.determinant()) < eps_sing;
  }
  virtual std::string name() const = 0;
};

// Point mass in n dimensions with identity kinematics. Gravity-free by
// default; an optional constant gravity force can be configured.
class PointMassModel final : public RobotModel {
 public:
  PointMassModel(int n, double mass, Vec gravity_force = Vec())
      : n_(n), m_(mass), g_(std::move(gravity_force)) {
    if (n_ < 1) throw ConfigError("robot.n: must be >= 1");
    if (!(m_ > 0)) throw ConfigError("robot.mass: must be positive");
    if (g_.size() == 0) g_ = Vec::Zero(n_);
    if (g_.size() != n_) throw ConfigError("robot.gravity: wrong length");
  }

  int n() const override { return n_; }
  Vec forward_kinematics(const Vec& q) const override { return q; }
  void jacobian(const Vec& q, const Vec&, Mat& J, Mat& Jdot) const override {
    (void)q;
    J = Mat::Identity(n_, n_);
    Jdot = Mat::Zero(n_, n_);
  }
  void joint_dynamics(const Vec&, const Vec&, Mat& Mq, Mat& Cq, Vec& Gq) const override {
    Mq = m_ * Mat::Identity(n_, n_);
    Cq = Mat::Zero(n_, n_);
    Gq = g_;
  }
  bool singular(const Vec&, double) const override { return false; }
  std::string name() const override { return "point_mass"; }

  double mass() const { return m_; }

 private:
  int n_;
  double m_;
  Vec g_;
};

// Planar 2-link arm, uniform-rod style parameters (link masses at centroids
// lc1/lc2 with rotational inertias I1/I2 about the centroids), operating in a
// vertical plane with gravity g along -y.
class TwoLinkArm final : public RobotModel {
 public:
  struct Params {
    double m1 = 1.0, m2 = 1.0;
    double l1 = 1.0, l2 = 1.0;
    double lc1 = 0.5, lc2 = 0.5;
    double I1 = 1.0 / 12.0, I2 = 1.0 / 12.0;
    double g = 9.81;
  };

  TwoLinkArm() : TwoLinkArm(Params{}) {}

  explicit TwoLinkArm(Params p) : p_(p) {
    if (!(p_.m1 > 0 && p_.m2 > 0 && p_.l1 > 0 && p_.l2 > 0))
      throw ConfigError("robot: two-link masses/lengths must be positive");
  }

  int n() const override { return 2; }

  Vec forward_kinematics(const Vec& q) const override {
    Vec x(2);
    const double c1 = std::cos(q(0)), s1 = std::sin(q(0));
    const double c12 = std::cos(q(0) + q(1)), s12 = std::sin(q(0) + q(1));
    x(0) = p_.l1 * c1 + p_.l2 * c12;
    x(1) = p_.l1 * s1 + p_.l2 * s12;
    return x;
  }

  void jacobian(const Vec& q, const Vec& qdot, Mat& J, Mat& Jdot) const override {
    const double s1 = std::sin(q(0)), c1 = std::cos(q(0));
    const double s12 = std::sin(q(0) + q(1)), c12 = std::cos(q(0) + q(1));
    J.resize(2, 2);
    J << -p_.l1 * s1 - p_.l2 * s12, -p_.l2 * s12,
          p_.l1 * c1 + p_.l2 * c12,  p_.l2 * c12;
    const double qd1 = qdot(0), qd12 = qdot(0) + qdot(1);
    Jdot.resize(2, 2);
    Jdot << -p_.l1 * c1 * qd1 - p_.l2 * c12 * qd12, -p_.l2 * c12 * qd12,
            -p_.l1 * s1 * qd1 - p_.l2 * s12 * qd12, -p_.l2 * s12 * qd12;
  }

  void joint_dynamics(const Vec& q, const Vec& qdot, Mat& Mq, Mat& Cq, Vec& Gq) const override {
    const double c2 = std::cos(q(1)), s2 = std::sin(q(1));
    const double a = p_.m1 * p_.lc1 * p_.lc1 + p_.I1 +
                     p_.m2 * (p_.l1 * p_.l1 + p_.lc2 * p_.lc2) + p_.I2;
    const double b = p_.m2 * p_.l1 * p_.lc2;
    const double d = p_.m2 * p_.lc2 * p_.lc2 + p_.I2;

    Mq.resize(2, 2);
    Mq << a + 2.0 * b * c2, d + b * c2,
          d + b * c2,       d;

    // Christoffel form: C(q,qd) with h = -b*s2; guarantees Mdot-2C skew.
    const double h = -b * s2;
    Cq.resize(2, 2);
    Cq << h * qdot(1), h * (qdot(0) + qdot(1)),
         -h * qdot(0), 0.0;

    const double c1 = std::cos(q(0)), c12 = std::cos(q(0) + q(1));
    Gq.resize(2);
    Gq(0) = (p_.m1 * p_.lc1 + p_.m2 * p_.l1) * p_.g * c1 + p_.m2 * p_.lc2 * p_.g * c12;
    Gq(1) = p_.m2 * p_.lc2 * p_.g * c12;
  }

  std::string name() const override { return "two_link"; }

  const Params& params() const { return p_; }

 private:
  Params p_;
};

// J^-T M_q J^-1 etc. Throws SingularConfiguration near rank loss; we abort
// instead of regularizing (a damped inverse would silently change the plant).
inline DynamicsTerms operational_dynamics(const RobotModel& model, const Vec& q,
                                          const Vec& qdot, double eps_sing = 1e-6) {
  Mat J, Jdot;
  model.jacobian(q, qdot, J, Jdot);
  const double detJ = J.determinant();
  if (std::abs(detJ) < eps_sing)
    throw SingularConfiguration(model.name() + ": |det J| = " +
                                std::to_string(std::abs(detJ)) + " below threshold");
  Mat Mq, Cq;
  Vec Gq;
  model.joint_dynamics(q, qdot, Mq, Cq, Gq);
  const Mat Jinv = J.inverse();
  DynamicsTerms terms;
  terms.M = Jinv.transpose() * Mq * Jinv;
  terms.C = Jinv.transpose() * (Cq - Mq * Jinv * Jdot) * Jinv;
  terms.G = Jinv.transpose() * Gq;
  return terms;
}

// xdd = M^-1 (u + f - C xd - G)
inline Vec forward_accel(const DynamicsTerms& terms, const Vec& xdot, const Vec& u,
                         const Vec& f) {
  Eigen::LDLT<Mat> ldlt(terms.M);
  if (ldlt.info() != Eigen::Success)
    throw IllConditioned("forward_accel: M not decomposable");
  const double cond_est = terms.M.norm() * terms.M.inverse().norm();
  if (!(cond_est < 1e12))
    throw IllConditioned("forward_accel: cond(M) estimate exceeds 1e12");
  return ldlt.solve(u + f - terms.C * xdot - terms.G);
}

}  // namespace ficsim

#endif
