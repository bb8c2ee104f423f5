#include <catch2/catch_amalgamated.hpp>

#include "ficsim/acceptance.hpp"
#include "ficsim/analysis.hpp"
#include "ficsim/simulation.hpp"

using namespace ficsim;

TEST_CASE("rk4 is exact for constant acceleration") {
  PointMassModel pm(1, 1.0);
  auto env = EnvironmentProfile::free_space(1, 2.0);
  JointState s{Vec::Zero(1), Vec::Zero(1)};
  s = rk4_step(pm, env, Vec::Constant(1, 1.0), 0.0, s, 0.01);
  REQUIRE(s.qdot(0) == Catch::Approx(0.01).epsilon(1e-14));
  REQUIRE(s.q(0) == Catch::Approx(5e-5).epsilon(1e-12));
}

TEST_CASE("gravity hold keeps the arm at equilibrium") {
  TwoLinkArm arm;
  auto env = EnvironmentProfile::free_space(2, 2.0);
  Vec q(2);
  q << 0.0, M_PI / 2.0;
  JointState s{q, Vec::Zero(2)};
  // task-space force balancing gravity: J^T u = G_q  =>  u = J^-T G_q
  Mat J, Jdot, Mq, Cq;
  Vec Gq;
  arm.jacobian(q, Vec::Zero(2), J, Jdot);
  arm.joint_dynamics(q, Vec::Zero(2), Mq, Cq, Gq);
  const Vec u = J.transpose().partialPivLu().solve(Gq);
  for (int k = 0; k < 10; ++k) {
    s = rk4_step(arm, env, u, k * 1e-3, s, 1e-3);
    REQUIRE((s.q - q).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(s.qdot.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("rk4 shows 4th-order convergence on a passive scenario") {
  const auto ratios = rk4_convergence_ratios();
  for (double r : ratios) {
    REQUIRE(r >= 14.0);
    REQUIRE(r <= 18.0);
  }
}

TEST_CASE("passive dissipative run never gains mechanical energy") {
  PointMassModel pm(1, 1.0);
  EnvironmentProfile env(2.0, FourierVec::constant(Vec::Zero(1)),
                         FourierMat::constant(-30.0 * Mat::Identity(1, 1)),
                         FourierMat::constant(-0.5 * Mat::Identity(1, 1)),
                         FourierVec::constant(Vec::Zero(1)));
  JointState s{Vec::Constant(1, 0.4), Vec::Zero(1)};
  auto energy = [&](const JointState& js) {
    // kinetic + spring potential of the restoring environment
    return 0.5 * js.qdot(0) * js.qdot(0) + 0.5 * 30.0 * js.q(0) * js.q(0);
  };
  double prev = energy(s);
  const double h = 1e-3;
  for (int period = 0; period < 5; ++period) {
    for (int k = 0; k < 2000; ++k)
      s = rk4_step(pm, env, Vec::Zero(1), (period * 2000 + k) * h, s, h);
    const double now = energy(s);
    REQUIRE(now <= prev + 1e-6);
    prev = now;
  }
}

namespace {

ScenarioConfig small_wall(int P = 4) {
  ScenarioConfig cfg = wall_1dof_config();
  cfg.P = P;
  return cfg;
}

}  // namespace

TEST_CASE("scenario validation errors") {
  ScenarioConfig cfg = small_wall();
  cfg.h = 0.0003;  // T/h not integer
  REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_wall();
  cfg.P = 1;
  REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_wall();
  cfg.T = -1.0;
  REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("trace has P*N + 1 records and is finite") {
  const ScenarioConfig cfg = small_wall(3);
  const Trace tr = integrate_scenario(cfg);
  REQUIRE(tr.steps.size() == 3 * 2000 + 1);
  for (const auto& s : tr.steps) {
    REQUIRE(std::isfinite(s.x(0)));
    REQUIRE(std::isfinite(s.u(0)));
  }
}

TEST_CASE("identical configs produce bit-identical traces") {
  const ScenarioConfig cfg = small_wall(3);
  const Trace a = integrate_scenario(cfg);
  const Trace b = integrate_scenario(cfg);
  REQUIRE(detail::traces_bit_identical(a, b));
}

TEST_CASE("first period runs with exactly zero adaptation state") {
  const ScenarioConfig cfg = small_wall(2);
  const Trace tr = integrate_scenario(cfg);
  for (std::size_t k = 0; k < tr.N; ++k) {
    const auto& s = tr.steps[k];
    REQUIRE(s.F.norm() == 0.0);
    REQUIRE(s.K_S.norm() == 0.0);
    REQUIRE(s.K_D.norm() == 0.0);
    REQUIRE(s.delta_xi.norm() == 0.0);
    REQUIRE(s.delta_xr.norm() == 0.0);
    REQUIRE(s.w.norm() == 0.0);
    REQUIRE((s.u - s.v).norm() == 0.0);
  }
}

TEST_CASE("period-shift identity of the force law holds on the trace") {
  const ScenarioConfig cfg = small_wall(3);
  const Trace tr = integrate_scenario(cfg);
  const GainSet& g = cfg.gains;
  for (std::size_t k = tr.N; k < tr.steps.size(); k += 137) {
    const auto& s = tr.steps[k];
    const auto& sp = tr.steps[k - tr.N];
    const Vec lhs = s.F - sp.F;
    const Vec rhs =
        g.Q_F * (s.epsilon - g.beta * s.F + g.Q_r.transpose() * s.delta_xi);
    REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("closed gate replays the reference unchanged") {
  ScenarioConfig cfg = small_wall(4);
  cfg.gate.mode = GateMode::AfterKPeriods;
  cfg.gate.after_periods = 3;
  const Trace tr = integrate_scenario(cfg);
  // while the gate is closed (periods 1..3) the reference replays bit-exactly
  for (std::size_t k = 0; k < 3 * tr.N; ++k) {
    REQUIRE(tr.steps[k].x_r(0) == tr.steps[k % tr.N].x_r(0));
    REQUIRE(tr.steps[k].delta_xi.norm() == 0.0);
  }
}

TEST_CASE("no-contact invariance: zero increments propagate exactly") {
  ScenarioConfig cfg = no_contact_config();
  cfg.P = 4;
  const Trace tr = integrate_scenario(cfg);
  for (const auto& s : tr.steps) {
    REQUIRE(s.x_r(0) == 0.0);
    REQUIRE(s.F(0) == 0.0);
    REQUIRE(s.delta_xr(0) == 0.0);
    REQUIRE(s.w(0) == 0.0);
  }
}

TEST_CASE("divergence guard aborts with a step diagnostic") {
  // anti-restoring environment (positive feedback) with a kick: must trip
  // the divergence guard rather than emit garbage
  ScenarioConfig cfg = small_wall(4);
  cfg.env = EnvironmentProfile(cfg.T, FourierVec::constant(Vec::Constant(1, 5.0)),
                               FourierMat::constant(500.0 * Mat::Identity(1, 1)),
                               FourierMat::constant(Mat::Zero(1, 1)),
                               FourierVec::constant(Vec::Zero(1)));
  cfg.gains = GainSet::isotropic(1, 0.1, 0.01, 1e-4, 1e-4, 1e-4, 1e-4, 1.0, 1e-3, 20.0);
  REQUIRE_THROWS_AS(integrate_scenario(cfg), NonFiniteState);
}

TEST_CASE("dimension mismatches are rejected") {
  ScenarioConfig cfg = small_wall();
  cfg.gains = GainSet::isotropic(2, 5.0, 20.0, 1, 1, 1, 1, 1, 1e-3, 20.0);
  REQUIRE_THROWS_AS(integrate_scenario(cfg), ConfigError);
}
