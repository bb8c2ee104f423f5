#ifndef FICSIM_SIMULATION_HPP
#define FICSIM_SIMULATION_HPP

#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "controller.hpp"
#include "environment.hpp"
#include "errors.hpp"
#include "gains.hpp"
#include "robot.hpp"

namespace ficsim {

enum class RobotKind { PointMass, TwoLink };

struct RobotConfig {
  RobotKind kind = RobotKind::PointMass;
  int n = 1;
  double mass = 1.0;          // point mass
  Vec gravity_force;          // point mass, optional constant bias
  TwoLinkArm::Params arm;     // two-link

  std::unique_ptr<RobotModel> make() const {
    if (kind == RobotKind::PointMass)
      return std::make_unique<PointMassModel>(n, mass, gravity_force);
    return std::make_unique<TwoLinkArm>(arm);
  }
};

struct ScenarioConfig {
  std::string name = "scenario";
  RobotConfig robot;
  double T = 2.0;
  double h = 1e-3;
  int P = 30;
  FourierVec F_d;              // T-periodic desired force profile
  EnvironmentProfile env = EnvironmentProfile::free_space(1, 2.0);
  GainSet gains;
  Vec q0, qd0;
  ReferenceProfile initial_reference;  // x_r(t) for t in [0,T)
  Variant variant = Variant::Full;
  GateConfig gate;
  RealizationConfig realization;

  std::size_t steps_per_period() const {
    return static_cast<std::size_t>(std::llround(T / h));
  }

  void validate() const {
    if (!(T > 0)) throw ConfigError("simulation.T: must be positive");
    if (!(h > 0)) throw ConfigError("simulation.h: must be positive");
    const double N = T / h;
    if (std::abs(N - std::round(N)) > 1e-9 * N || std::round(N) < 1)
      throw ConfigError("simulation.h: T/h not integer");
    if (P < 2) throw ConfigError("simulation.periods: must be >= 2");
    if (std::abs(env.period() - T) > 1e-12)
      throw ConfigError("environment.T: must equal simulation.T");
  }
};

// Per-period summary; filled by the analysis pass after integration.
struct PeriodCosts {
  int k = 0;  // 1-based period index
  double J_c = 0.0;
  double J_e = 0.0;        // endpoint value
  double J_r = 0.0;
  double J_r_prime = 0.0;  // no-damping runs
  double J_c_prime = 0.0;
  double J = 0.0;
  double delta_J = 0.0;  // vs previous period, defined for k >= 2
  double rms_eps = 0.0;
  double max_force_err = 0.0;  // max |f - F_d| over the period
  double margin_min = 0.0;     // sufficient-condition margin, min over period
  double slack_min = 0.0;      // boundedness-bound slack, min over period
  bool jr_available = true;    // false when no x_d oracle (time-varying env)
  bool jr_prime_sign_warning = false;
};

struct Trace {
  int n = 0;
  std::size_t N = 0;  // steps per period
  int P = 0;
  double T = 0.0, h = 0.0;
  std::vector<StepRecord> steps;    // P*N + 1 records
  std::vector<PeriodCosts> periods; // P records once analysed
};

namespace detail {

struct JointDeriv {
  Vec qd;
  Vec qdd;
};

inline JointDeriv joint_deriv(const RobotModel& model, const EnvironmentProfile& env,
                              const Vec& u_task, double t, const Vec& q, const Vec& qd) {
  Mat J, Jdot;
  model.jacobian(q, qd, J, Jdot);
  Mat Mq, Cq;
  Vec Gq;
  model.joint_dynamics(q, qd, Mq, Cq, Gq);
  const Vec x = model.forward_kinematics(q);
  const Vec xd = J * qd;
  const Vec f = env.interaction_force(t, x, xd);
  JointDeriv d;
  d.qd = qd;
  d.qdd = Mq.ldlt().solve(J.transpose() * (u_task + f) - Cq * qd - Gq);
  return d;
}

}  // namespace detail

// Classical RK4 on the joint-space equation, u (task-space force) held
// constant over the step, environment force evaluated at each internal stage.
inline JointState rk4_step(const RobotModel& model, const EnvironmentProfile& env,
                           const Vec& u_task, double t, const JointState& s, double h) {
  using detail::joint_deriv;
  const auto k1 = joint_deriv(model, env, u_task, t, s.q, s.qdot);
  const auto k2 = joint_deriv(model, env, u_task, t + 0.5 * h, s.q + 0.5 * h * k1.qd,
                              s.qdot + 0.5 * h * k1.qdd);
  const auto k3 = joint_deriv(model, env, u_task, t + 0.5 * h, s.q + 0.5 * h * k2.qd,
                              s.qdot + 0.5 * h * k2.qdd);
  const auto k4 =
      joint_deriv(model, env, u_task, t + h, s.q + h * k3.qd, s.qdot + h * k3.qdd);
  JointState out;
  out.q = s.q + (h / 6.0) * (k1.qd + 2.0 * k2.qd + 2.0 * k3.qd + k4.qd);
  out.qdot = s.qdot + (h / 6.0) * (k1.qdd + 2.0 * k2.qdd + 2.0 * k3.qdd + k4.qdd);
  if (!out.q.allFinite() || !out.qdot.allFinite())
    throw NonFiniteState("rk4_step: non-finite state at t=" + std::to_string(t));
  return out;
}

// Closed-loop integration: controller consulted once per step on the h-grid,
// zero-order-held u across each RK4 step. Deterministic; no RNG anywhere.
inline Trace integrate_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  auto robot = cfg.robot.make();
  const int n = robot->n();
  if (cfg.gains.n() != n) throw ConfigError("gains: dimension does not match robot");
  if (cfg.env.n() != n) throw ConfigError("environment: dimension does not match robot");

  const std::size_t N = cfg.steps_per_period();
  const std::size_t total = N * static_cast<std::size_t>(cfg.P);

  AdaptiveController ctrl(cfg.gains, cfg.variant, cfg.gate, cfg.realization,
                          cfg.initial_reference, cfg.T, cfg.h);

  Trace tr;
  tr.n = n;
  tr.N = N;
  tr.P = cfg.P;
  tr.T = cfg.T;
  tr.h = cfg.h;
  tr.steps.reserve(total + 1);

  JointState js{cfg.q0, cfg.qd0};
  if (js.q.size() != n || js.qdot.size() != n)
    throw ConfigError("simulation.q0/qd0: wrong length");

  for (std::size_t k = 0; k <= total; ++k) {
    const double t = static_cast<double>(k) * cfg.h;
    if (js.q.cwiseAbs().maxCoeff() > 1e6 || js.qdot.cwiseAbs().maxCoeff() > 1e6)
      throw NonFiniteState(cfg.name + ": state magnitude exceeded 1e6 at step " +
                           std::to_string(k) + " (t=" + std::to_string(t) + ")");

    Mat J, Jdot;
    robot->jacobian(js.q, js.qdot, J, Jdot);
    const Vec x = robot->forward_kinematics(js.q);
    const Vec xd = J * js.qdot;
    const DynamicsTerms terms = operational_dynamics(*robot, js.q, js.qdot);
    const Vec Fd = cfg.F_d.eval(t, cfg.T);

    StepRecord rec = ctrl.step(k, terms, x, xd, Fd);
    rec.f = cfg.env.interaction_force(t, x, xd);
    tr.steps.push_back(std::move(rec));

    if (k < total) js = rk4_step(*robot, cfg.env, tr.steps.back().u, t, js, cfg.h);
  }
  return tr;
}

}  // namespace ficsim

#endif
