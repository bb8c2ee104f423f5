#ifndef FICSIM_ACCEPTANCE_HPP
#define FICSIM_ACCEPTANCE_HPP

#include <algorithm>
#include <cstring>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "scenario_io.hpp"
#include "simulation.hpp"

namespace ficsim {

// Bundled benchmark scenarios. These are the in-code counterparts of the
// files in scenarios/; a test asserts the parsed files match these builders.

inline ScenarioConfig wall_1dof_config() {
  ScenarioConfig cfg;
  cfg.name = "wall_1dof";
  cfg.robot.kind = RobotKind::PointMass;
  cfg.robot.n = 1;
  cfg.robot.mass = 1.0;
  cfg.T = 2.0;
  cfg.h = 1e-3;
  cfg.P = 30;
  cfg.F_d = FourierVec::constant(Vec::Constant(1, -5.0));
  cfg.env = EnvironmentProfile(cfg.T, FourierVec::constant(Vec::Zero(1)),
                               FourierMat::constant(-100.0 * Mat::Identity(1, 1)),
                               FourierMat::constant(-2.0 * Mat::Identity(1, 1)),
                               FourierVec::constant(Vec::Zero(1)));
  cfg.gains = GainSet::isotropic(1, 5.0, 20.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1e-3, 20.0);
  cfg.q0 = Vec::Zero(1);
  cfg.qd0 = Vec::Zero(1);
  cfg.initial_reference = ReferenceProfile::constant(Vec::Zero(1));
  cfg.variant = Variant::Full;
  cfg.gate.mode = GateMode::Simultaneous;
  cfg.realization.mode = RealizationMode::Shifted;
  cfg.realization.tau_r = 0.1;
  return cfg;
}

inline ScenarioConfig no_contact_config() {
  ScenarioConfig cfg = wall_1dof_config();
  cfg.name = "no_contact";
  cfg.F_d = FourierVec::constant(Vec::Zero(1));
  cfg.env = EnvironmentProfile::free_space(1, cfg.T);
  // start at rest exactly on the (constant) reference so every adaptation
  // increment is exactly zero and the reference replays bit-identically
  cfg.q0 = Vec::Zero(1);
  cfg.qd0 = Vec::Zero(1);
  cfg.initial_reference = ReferenceProfile::constant(cfg.q0);
  return cfg;
}

inline ScenarioConfig wall_fourier_config() {
  ScenarioConfig cfg = wall_1dof_config();
  cfg.name = "wall_fourier";
  FourierMat KS = FourierMat::constant(-100.0 * Mat::Identity(1, 1));
  KS.harmonics.emplace_back(-20.0 * Mat::Identity(1, 1), Mat::Zero(1, 1));
  cfg.env = EnvironmentProfile(cfg.T, FourierVec::constant(Vec::Zero(1)), KS,
                               FourierMat::constant(-2.0 * Mat::Identity(1, 1)),
                               FourierVec::constant(Vec::Zero(1)));
  // start the reference at the expected contact depth (free scenario knob)
  cfg.initial_reference = ReferenceProfile::constant(Vec::Constant(1, 0.05));
  return cfg;
}

inline ScenarioConfig wall_nodamping_config() {
  ScenarioConfig cfg = wall_1dof_config();
  cfg.name = "wall_nodamping";
  cfg.env = EnvironmentProfile(cfg.T, FourierVec::constant(Vec::Zero(1)),
                               FourierMat::constant(-100.0 * Mat::Identity(1, 1)),
                               FourierMat::constant(Mat::Zero(1, 1)),
                               FourierVec::constant(Vec::Zero(1)));
  cfg.variant = Variant::NoDamping;
  cfg.gains.kappa = 30.0;
  cfg.realization.tau_r = 0.1;
  cfg.realization.tau_smooth = 0.1;
  return cfg;
}

// full variant against the damping-free wall, for cross-variant comparison
inline ScenarioConfig wall_kd0_full_config() {
  ScenarioConfig cfg = wall_nodamping_config();
  cfg.name = "wall_kd0_full";
  cfg.variant = Variant::Full;
  cfg.gains.kappa = 20.0;
  return cfg;
}

struct CriterionResult {
  std::string id;
  bool pass = false;
  bool documented_limitation = false;  // known-red: reported FAIL, pinned by tests
  std::string detail;
};

// every number the test suite pins as a regression value
struct AcceptanceMeasurements {
  // AC-1
  double skew_max = 0.0;
  double energy_max = 0.0;
  double rk4_ratio_lo = 0.0, rk4_ratio_hi = 0.0;
  // AC-2
  double J2 = 0.0, JP = 0.0, J_ratio = 0.0;
  double worst_decrement_excess = 0.0;  // max over k of delta_J - tol (<=0 when clean)
  // AC-3
  double force_mean = 0.0, force_rel_err = 0.0;
  double x_mean = 0.0, x_rel_err = 0.0;
  // AC-4
  double w_inf_nc = 0.0;
  bool xr_bit_identical = false;
  // AC-5
  double sensorless_ratio = 0.0, final_rms_eps = 0.0;
  // AC-6
  double slack_min_after2 = 0.0, slack_min_tail = 0.0;
  // AC-7
  double nd_force_rel_err = 0.0, cross_variant_rel_err = 0.0;
  int nd_decrement_violations = 0;
  double nd_worst_decrement_excess = 0.0;
  // AC-8
  double fourier_eps_ratio = 0.0;
  bool fourier_jc_decreasing = false;
  // AC-9
  bool bit_identical = false;
  double max_law_residual = 0.0;
};

struct AcceptanceReport {
  std::vector<CriterionResult> results;
  AcceptanceMeasurements m;
  bool all_pass() const {
    for (const auto& r : results)
      if (!r.pass) return false;
    return true;
  }
};

namespace detail {

inline std::string fmt3(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

inline double final_period_mean_force(const Trace& tr) {
  const std::size_t b = static_cast<std::size_t>(tr.P - 1) * tr.N;
  double s = 0.0;
  for (std::size_t i = b; i < tr.steps.size(); ++i) s += tr.steps[i].f(0);
  return s / static_cast<double>(tr.steps.size() - b);
}

inline double final_period_mean_x(const Trace& tr) {
  const std::size_t b = static_cast<std::size_t>(tr.P - 1) * tr.N;
  double s = 0.0;
  for (std::size_t i = b; i < tr.steps.size(); ++i) s += tr.steps[i].x(0);
  return s / static_cast<double>(tr.steps.size() - b);
}

inline std::vector<double> trace_row_payload(const StepRecord& s) {
  std::vector<double> row;
  auto pv = [&](const Vec& v) {
    for (int i = 0; i < v.size(); ++i) row.push_back(v(i));
  };
  row.push_back(s.t);
  pv(s.x);
  pv(s.xdot);
  pv(s.x_r);
  pv(s.epsilon);
  pv(s.F);
  pv(s.u);
  return row;
}

inline bool traces_bit_identical(const Trace& a, const Trace& b) {
  if (a.steps.size() != b.steps.size()) return false;
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    const auto ra = trace_row_payload(a.steps[i]);
    const auto rb = trace_row_payload(b.steps[i]);
    if (ra.size() != rb.size()) return false;
    if (std::memcmp(ra.data(), rb.data(), ra.size() * sizeof(double)) != 0) return false;
  }
  return true;
}

}  // namespace detail

// AC-1 pieces -----------------------------------------------------------

struct DynamicsIdentityResult {
  double skew_max = 0.0;    // max |z'(Mdot - 2C)z|
  double energy_max = 0.0;  // max |T_joint - T_task|
};

inline DynamicsIdentityResult dynamics_identity_check(int samples = 1000,
                                                      unsigned seed = 20240817) {
  TwoLinkArm arm;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uq(-M_PI, M_PI);
  std::uniform_real_distribution<double> uv(-2.0, 2.0);
  DynamicsIdentityResult r;
  const double dt = 1e-6;
  int done = 0;
  while (done < samples) {
    Vec q(2), qd(2), z(2);
    q << uq(rng), uq(rng);
    qd << uv(rng), uv(rng);
    z << uv(rng), uv(rng);
    if (arm.singular(q, 1e-3)) continue;  // stay clear of rank loss for the task-space check
    ++done;
    Mat Mq, Cq, Mp, Mm, Cdum;
    Vec Gdum;
    arm.joint_dynamics(q, qd, Mq, Cq, Gdum);
    arm.joint_dynamics(q + dt * qd, qd, Mp, Cdum, Gdum);
    arm.joint_dynamics(q - dt * qd, qd, Mm, Cdum, Gdum);
    const Mat Mdot = (Mp - Mm) / (2.0 * dt);
    r.skew_max = std::max(r.skew_max, std::abs(z.dot((Mdot - 2.0 * Cq) * z)));

    Mat J, Jdot;
    arm.jacobian(q, qd, J, Jdot);
    const Vec xd = J * qd;
    const DynamicsTerms terms = operational_dynamics(arm, q, qd);
    const double Tj = 0.5 * qd.dot(Mq * qd);
    const double Tt = 0.5 * xd.dot(terms.M * xd);
    r.energy_max = std::max(r.energy_max, std::abs(Tj - Tt));
  }
  return r;
}

// Richardson convergence study on a passive (u=0) dissipative scenario;
// returns error ratios per step-halving (expected ~16 for RK4).
inline std::vector<double> rk4_convergence_ratios() {
  PointMassModel pm(1, 1.0);
  EnvironmentProfile env(2.0, FourierVec::constant(Vec::Zero(1)),
                         FourierMat::constant(-30.0 * Mat::Identity(1, 1)),
                         FourierMat::constant(-1.5 * Mat::Identity(1, 1)),
                         FourierVec::constant(Vec::Zero(1)));
  const Vec u = Vec::Zero(1);
  auto endpoint = [&](double h) {
    JointState s{Vec::Constant(1, 0.4), Vec::Constant(1, 0.0)};
    const int steps = static_cast<int>(std::llround(2.0 / h));
    for (int k = 0; k < steps; ++k)
      s = rk4_step(pm, env, u, k * h, s, h);
    return s.q(0);
  };
  std::vector<double> x;
  for (double h = 0.02; h > 0.02 / 32.0; h /= 2.0) x.push_back(endpoint(h));
  std::vector<double> ratios;
  for (std::size_t i = 0; i + 2 < x.size(); ++i)
    ratios.push_back(std::abs(x[i] - x[i + 1]) / std::abs(x[i + 1] - x[i + 2]));
  return ratios;
}

// -----------------------------------------------------------------------

inline AcceptanceReport run_acceptance() {
  AcceptanceReport rep;
  AcceptanceMeasurements& m = rep.m;
  auto add = [&](const std::string& id, bool pass, const std::string& detail,
                 bool documented = false) {
    rep.results.push_back({id, pass, documented && !pass, detail});
  };

  // AC-1: dynamics identities + integrator order
  {
    const DynamicsIdentityResult dyn = dynamics_identity_check();
    m.skew_max = dyn.skew_max;
    m.energy_max = dyn.energy_max;
    const auto ratios = rk4_convergence_ratios();
    m.rk4_ratio_lo = *std::min_element(ratios.begin(), ratios.end());
    m.rk4_ratio_hi = *std::max_element(ratios.begin(), ratios.end());
    const bool ok = dyn.skew_max <= 1e-8 && dyn.energy_max <= 1e-9 &&
                    m.rk4_ratio_lo >= 14.0 && m.rk4_ratio_hi <= 18.0;
    add("AC-1", ok,
        "skew " + detail::fmt3(dyn.skew_max) + ", energy " + detail::fmt3(dyn.energy_max) +
            ", rk4 ratios [" + detail::fmt3(m.rk4_ratio_lo) + ", " +
            detail::fmt3(m.rk4_ratio_hi) + "]");
  }

  const ScenarioConfig wall = wall_1dof_config();
  Trace wt = run_scenario(wall);
  Trace wt2 = integrate_scenario(wall);  // determinism rerun (AC-9)

  // AC-2: per-period decrement + total cost drop
  {
    m.J2 = wt.periods[1].J;
    m.JP = wt.periods.back().J;
    m.J_ratio = m.JP / m.J2;
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 2; k <= wt.P; ++k) {
      const double tol = per_period_decrement_tol(wt.periods[k - 2].J);
      worst = std::max(worst, wt.periods[k - 1].delta_J - tol);
    }
    m.worst_decrement_excess = worst;
    const bool decrement_ok = worst <= 0.0;
    const bool ratio_ok = m.J_ratio < 0.05;
    add("AC-2", decrement_ok && ratio_ok,
        "decrement " + std::string(decrement_ok ? "ok" : "violated") + ", J(P)/J(2) = " +
            detail::fmt3(m.J_ratio) + " (need < 0.05)",
        /*documented=*/decrement_ok);
  }

  // AC-3: force rendering + steady position
  {
    m.force_mean = detail::final_period_mean_force(wt);
    m.force_rel_err = std::abs(m.force_mean - (-5.0)) / 5.0;
    const double xd = wall.env.steady_desired_position(wall.F_d.a0)(0);
    m.x_mean = detail::final_period_mean_x(wt);
    m.x_rel_err = std::abs(m.x_mean - xd) / std::abs(xd);
    const bool ok = m.force_rel_err < 0.02 && m.x_rel_err < 0.02;
    add("AC-3", ok,
        "mean f " + detail::fmt3(m.force_mean) + " (err " + detail::fmt3(m.force_rel_err) +
            "), mean x " + detail::fmt3(m.x_mean) + " (err " + detail::fmt3(m.x_rel_err) +
            "), need < 0.02");
  }

  // AC-4: no-contact invariance
  {
    Trace nc = run_scenario(no_contact_config());
    double winf = 0.0;
    const std::size_t b = static_cast<std::size_t>(nc.P - 1) * nc.N;
    for (std::size_t i = b; i < nc.steps.size(); ++i)
      winf = std::max(winf, nc.steps[i].w.cwiseAbs().maxCoeff());
    m.w_inf_nc = winf;
    bool ident = true;
    for (std::size_t i = 0; i < nc.steps.size(); ++i) {
      const Vec& first = nc.steps[i % nc.N].x_r;
      if (std::memcmp(nc.steps[i].x_r.data(), first.data(),
                      sizeof(double) * first.size()) != 0) {
        ident = false;
        break;
      }
    }
    m.xr_bit_identical = ident;
    add("AC-4", winf < 1e-3 && ident,
        "||w||_inf " + detail::fmt3(winf) + ", x_r bit-identical: " + (ident ? "yes" : "no"));
  }

  // AC-5: sensorless force estimation
  {
    const ForceResidual fr = force_estimation_residual(wt, wt.P);
    m.sensorless_ratio = fr.max_w_plus_f / fr.max_f;
    m.final_rms_eps = rms_eps(wt, wt.P);
    const bool ok = m.sensorless_ratio < 0.05 && m.final_rms_eps < 1e-3;
    add("AC-5", ok,
        "max||w+f||/max||f|| = " + detail::fmt3(m.sensorless_ratio) + " (need < 0.05), rms eps " +
            detail::fmt3(m.final_rms_eps) + " (need < 1e-3)",
        /*documented=*/true);
  }

  // AC-6: boundedness slack after period 2
  {
    double mn = std::numeric_limits<double>::infinity();
    for (int k = 3; k <= wt.P; ++k) mn = std::min(mn, wt.periods[k - 1].slack_min);
    m.slack_min_after2 = mn;
    double tail = std::numeric_limits<double>::infinity();
    for (int k = wt.P - 9; k <= wt.P; ++k)
      tail = std::min(tail, wt.periods[k - 1].slack_min);
    m.slack_min_tail = tail;
    add("AC-6", mn >= -1e-6,
        "min slack after period 2 = " + detail::fmt3(mn) + " (need >= -1e-6); converged tail min " +
            detail::fmt3(tail),
        /*documented=*/true);
  }

  // AC-7: no-damping variant
  {
    Trace nd = run_scenario(wall_nodamping_config());
    Trace fu = run_scenario(wall_kd0_full_config());
    const double fnd = detail::final_period_mean_force(nd);
    const double ffu = detail::final_period_mean_force(fu);
    m.nd_force_rel_err = std::abs(fnd - (-5.0)) / 5.0;
    m.cross_variant_rel_err = std::abs(fnd - ffu) / std::abs(ffu);
    int violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 2; k <= nd.P; ++k) {
      const double Jp = nd.periods[k - 2].J_c_prime + nd.periods[k - 2].J_r_prime;
      const double Jk = nd.periods[k - 1].J_c_prime + nd.periods[k - 1].J_r_prime;
      const double excess = (Jk - Jp) - per_period_decrement_tol(Jp);
      worst = std::max(worst, excess);
      if (excess > 0.0) ++violations;
    }
    m.nd_decrement_violations = violations;
    m.nd_worst_decrement_excess = worst;
    const bool forces_ok = m.nd_force_rel_err < 0.03 && m.cross_variant_rel_err < 0.02;
    add("AC-7", forces_ok && violations == 0,
        "force err " + detail::fmt3(m.nd_force_rel_err) + " (< 0.03), cross-variant " +
            detail::fmt3(m.cross_variant_rel_err) + " (< 0.02), decrement violations " +
            std::to_string(violations),
        /*documented=*/forces_ok);
  }

  // AC-8: periodic (Fourier) environment
  {
    Trace ft = run_scenario(wall_fourier_config());
    m.fourier_eps_ratio = rms_eps(ft, ft.P) / rms_eps(ft, 2);
    bool dec = true;
    for (int k = 3; k <= 10; ++k)
      if (!(ft.periods[k - 1].J_c < ft.periods[k - 2].J_c)) dec = false;
    m.fourier_jc_decreasing = dec;
    add("AC-8", m.fourier_eps_ratio < 0.10 && dec,
        "rms eps ratio " + detail::fmt3(m.fourier_eps_ratio) + " (need < 0.10), J_c decreasing on [2,10]: " +
            (dec ? "yes" : "no"));
  }

  // AC-9: determinism + implicit-law exactness
  {
    m.bit_identical = detail::traces_bit_identical(wt, wt2);
    double res = 0.0;
    // spot-check 1% of steps at random plus the global maximum
    std::mt19937 rng(7);
    std::uniform_int_distribution<std::size_t> pick(0, wt.steps.size() - 1);
    for (std::size_t i = 0; i < wt.steps.size() / 100; ++i)
      res = std::max(res, wt.steps[pick(rng)].law_residual);
    for (const auto& s : wt.steps) res = std::max(res, s.law_residual);
    m.max_law_residual = res;
    add("AC-9", m.bit_identical && res <= 1e-10,
        std::string("bit-identical: ") + (m.bit_identical ? "yes" : "no") +
            ", max law residual " + detail::fmt3(res));
  }

  return rep;
}

inline void print_acceptance(const AcceptanceReport& rep, std::ostream& os) {
  for (const auto& r : rep.results) {
    os << r.id << "  "
       << (r.pass ? "PASS" : (r.documented_limitation ? "FAIL (documented limitation)" : "FAIL"))
       << "  -- " << r.detail << "\n";
  }
}

}  // namespace ficsim

#endif
