#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ficsim/robot.hpp"

using namespace ficsim;

TEST_CASE("two-link forward kinematics at landmark poses") {
  TwoLinkArm arm;
  Vec q(2);
  q << 0.0, 0.0;
  REQUIRE(arm.forward_kinematics(q)(0) == Catch::Approx(2.0));
  REQUIRE(arm.forward_kinematics(q)(1) == Catch::Approx(0.0).margin(1e-15));
  q << 0.0, M_PI / 2.0;
  REQUIRE(arm.forward_kinematics(q)(0) == Catch::Approx(1.0));
  REQUIRE(arm.forward_kinematics(q)(1) == Catch::Approx(1.0));
  q << M_PI / 2.0, 0.0;
  REQUIRE(arm.forward_kinematics(q)(0) == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(arm.forward_kinematics(q)(1) == Catch::Approx(2.0));
}

TEST_CASE("two-link jacobian at (0, pi/2) and finite-difference cross-check") {
  TwoLinkArm arm;
  Vec q(2), qd(2);
  q << 0.0, M_PI / 2.0;
  qd << 0.3, -0.7;
  Mat J, Jdot;
  arm.jacobian(q, qd, J, Jdot);
  REQUIRE(J(0, 0) == Catch::Approx(-1.0));
  REQUIRE(J(0, 1) == Catch::Approx(-1.0));
  REQUIRE(J(1, 0) == Catch::Approx(1.0));
  REQUIRE(J(1, 1) == Catch::Approx(0.0).margin(1e-15));

  // J from FD of forward kinematics; Jdot from FD of J along qd
  const double d = 1e-7;
  for (int j = 0; j < 2; ++j) {
    Vec qp = q, qm = q;
    qp(j) += d;
    qm(j) -= d;
    const Vec col = (arm.forward_kinematics(qp) - arm.forward_kinematics(qm)) / (2 * d);
    REQUIRE((col - J.col(j)).norm() < 1e-6);
  }
  Mat Jp, Jm, dum;
  arm.jacobian(q + d * qd, qd, Jp, dum);
  arm.jacobian(q - d * qd, qd, Jm, dum);
  REQUIRE(((Jp - Jm) / (2 * d) - Jdot).norm() < 1e-6);
}

TEST_CASE("two-link mass matrix values at q2 = 0") {
  TwoLinkArm arm;
  Vec q(2), qd(2);
  q << 0.4, 0.0;  // M depends on q2 only
  qd << 0.0, 0.0;
  Mat Mq, Cq;
  Vec Gq;
  arm.joint_dynamics(q, qd, Mq, Cq, Gq);
  REQUIRE(Mq(0, 0) == Catch::Approx(2.0 + 2.0 / 3.0).epsilon(1e-9));
  REQUIRE(Mq(0, 1) == Catch::Approx(5.0 / 6.0).epsilon(1e-9));
  REQUIRE(Mq(1, 0) == Catch::Approx(5.0 / 6.0).epsilon(1e-9));
  REQUIRE(Mq(1, 1) == Catch::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("skew-symmetry of Mdot - 2C over random samples") {
  TwoLinkArm arm;
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> uq(-M_PI, M_PI), uv(-2.0, 2.0);
  const double dt = 1e-6;
  for (int i = 0; i < 300; ++i) {
    Vec q(2), qd(2), z(2);
    q << uq(rng), uq(rng);
    qd << uv(rng), uv(rng);
    z << uv(rng), uv(rng);
    Mat Mq, Cq, Mp, Mm, Cd;
    Vec Gd;
    arm.joint_dynamics(q, qd, Mq, Cq, Gd);
    arm.joint_dynamics(q + dt * qd, qd, Mp, Cd, Gd);
    arm.joint_dynamics(q - dt * qd, qd, Mm, Cd, Gd);
    const Mat Mdot = (Mp - Mm) / (2 * dt);
    REQUIRE(std::abs(z.dot((Mdot - 2.0 * Cq) * z)) < 1e-8);
  }
}

TEST_CASE("kinetic energy equal in joint and task space") {
  TwoLinkArm arm;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uq(-M_PI, M_PI), uv(-2.0, 2.0);
  int done = 0;
  while (done < 200) {
    Vec q(2), qd(2);
    q << uq(rng), uq(rng);
    qd << uv(rng), uv(rng);
    if (arm.singular(q, 1e-3)) continue;
    ++done;
    Mat Mq, Cq, J, Jdot;
    Vec Gq;
    arm.joint_dynamics(q, qd, Mq, Cq, Gq);
    arm.jacobian(q, qd, J, Jdot);
    const DynamicsTerms terms = operational_dynamics(arm, q, qd);
    const Vec xd = J * qd;
    REQUIRE(std::abs(0.5 * qd.dot(Mq * qd) - 0.5 * xd.dot(terms.M * xd)) < 1e-9);
  }
}

TEST_CASE("operational dynamics throws at singular configurations") {
  TwoLinkArm arm;
  Vec q(2), qd(2);
  q << 0.3, 0.0;  // straight arm: det J = l1 l2 sin(q2) = 0
  qd << 0.0, 0.0;
  REQUIRE_THROWS_AS(operational_dynamics(arm, q, qd), SingularConfiguration);
  REQUIRE(arm.singular(q, 1e-6));
}

TEST_CASE("point mass model and forward acceleration") {
  PointMassModel pm(2, 3.0);
  Vec q(2), qd(2);
  q << 1.0, -2.0;
  qd << 0.5, 0.5;
  REQUIRE(pm.forward_kinematics(q) == q);
  const DynamicsTerms terms = operational_dynamics(pm, q, qd);
  REQUIRE((terms.M - 3.0 * Mat::Identity(2, 2)).norm() == 0.0);
  Vec u(2), f(2);
  u << 3.0, 0.0;
  f << 0.0, -6.0;
  const Vec a = forward_accel(terms, qd, u, f);
  REQUIRE(a(0) == Catch::Approx(1.0));
  REQUIRE(a(1) == Catch::Approx(-2.0));
}

TEST_CASE("forward acceleration rejects ill-conditioned mass matrices") {
  DynamicsTerms terms;
  terms.M = Mat::Zero(2, 2);
  terms.M(0, 0) = 1.0;
  terms.M(1, 1) = 1e-13;
  terms.C = Mat::Zero(2, 2);
  terms.G = Vec::Zero(2);
  REQUIRE_THROWS_AS(forward_accel(terms, Vec::Zero(2), Vec::Zero(2), Vec::Zero(2)),
                    IllConditioned);
}

TEST_CASE("config validation on robot parameters") {
  REQUIRE_THROWS_AS(PointMassModel(0, 1.0), ConfigError);
  REQUIRE_THROWS_AS(PointMassModel(1, -1.0), ConfigError);
  TwoLinkArm::Params p;
  p.l1 = -0.5;
  REQUIRE_THROWS_AS(TwoLinkArm(p), ConfigError);
}
