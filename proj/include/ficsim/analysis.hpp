#ifndef FICSIM_ANALYSIS_HPP
#define FICSIM_ANALYSIS_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "simulation.hpp"

namespace ficsim {

// Pure functions over immutable traces; privileged environment truth is only
// used here, never inside the controller.

namespace detail {

// trapezoid rule over one period of per-step values (N+1 samples)
inline double trapezoid(const std::vector<double>& v, double h) {
  double s = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
  return s * h;
}

struct Window {
  std::size_t begin;  // first step index of the period
  std::size_t end;    // last step index (inclusive), end-begin == N
};

inline Window period_window(const Trace& tr, int k) {
  if (k < 1 || k > tr.P) throw WindowMisaligned("period index out of range");
  const std::size_t b = static_cast<std::size_t>(k - 1) * tr.N;
  const std::size_t e = b + tr.N;
  if (e >= tr.steps.size())
    throw WindowMisaligned("trace shorter than requested period");
  return {b, e};
}

// tr(A^T W^-1 A): the vec-form quadratic vec(A)^T (I (x) W^-1) vec(A)
inline double weighted_frob2(const Mat& A, const Mat& Winv) {
  return (A.transpose() * Winv * A).trace();
}

}  // namespace detail

inline double cost_je(const Vec& epsilon, const Mat& M) {
  return 0.5 * epsilon.dot(M * epsilon);
}

// parameter-error cost over one period (trapezoid)
inline double cost_jc(const Trace& tr, int k, const EnvironmentProfile& env,
                      const GainSet& g) {
  const auto w = detail::period_window(tr, k);
  const Mat QFi = g.Q_F.inverse();
  const Mat QSi = g.Q_S.inverse();
  const Mat QDi = g.Q_D.inverse();
  std::vector<double> v;
  v.reserve(tr.N + 1);
  for (std::size_t i = w.begin; i <= w.end; ++i) {
    const StepRecord& s = tr.steps[i];
    const EffectiveForceParams truth = env.environment_truth(s.t);
    const Vec Ft = truth.F_star - s.F;
    const Mat KSt = truth.KS_star - s.K_S;
    const Mat KDt = truth.KD_star - s.K_D;
    v.push_back(0.5 * (Ft.dot(QFi * Ft) + detail::weighted_frob2(KSt, QSi) +
                       detail::weighted_frob2(KDt, QDi)));
  }
  return detail::trapezoid(v, tr.h);
}

// damping-free parameter cost (no-damping variant analysis)
inline double cost_jc_prime(const Trace& tr, int k, const EnvironmentProfile& env,
                            const GainSet& g) {
  const auto w = detail::period_window(tr, k);
  const Mat QFi = g.Q_F.inverse();
  const Mat QSi = g.Q_S.inverse();
  std::vector<double> v;
  v.reserve(tr.N + 1);
  for (std::size_t i = w.begin; i <= w.end; ++i) {
    const StepRecord& s = tr.steps[i];
    const EffectiveForceParams truth = env.environment_truth(s.t);
    const Vec Ft = truth.F_star - s.F;
    const Mat KSt = truth.KS_star - s.K_S;
    v.push_back(0.5 * (Ft.dot(QFi * Ft) + detail::weighted_frob2(KSt, QSi)));
  }
  return detail::trapezoid(v, tr.h);
}

// reference visco-elastic state cost; requires the constant-environment x_d
// oracle (throws NonConstantEnvironment otherwise)
inline double cost_jr(const Trace& tr, int k, const EnvironmentProfile& env,
                      const GainSet& g, const FourierVec& F_d) {
  if (!F_d.is_constant())
    throw NonConstantEnvironment("cost_jr: F_d time-varying, no xi_d oracle");
  const Vec x_d = env.steady_desired_position(F_d.a0);
  const EffectiveForceParams truth = env.environment_truth(0.0);
  const Vec xi_d = truth.KS_star * x_d;  // xd_dot = 0 at the steady oracle
  const auto w = detail::period_window(tr, k);
  std::vector<double> v;
  v.reserve(tr.N + 1);
  for (std::size_t i = w.begin; i <= w.end; ++i) {
    const Vec d = tr.steps[i].xi_r - xi_d;
    v.push_back(0.5 * d.dot(g.Q_r.transpose() * d));
  }
  return detail::trapezoid(v, tr.h);
}

// no-damping reference cost 1/2 (x_r - x_d)^T KS*^T Q_r^T (x_r - x_d);
// sign-indefinite when KS*^T Q_r^T is not sign-definite — reported with a
// warning flag instead of being asserted nonnegative. For a restoring wall
// (KS* negative definite) the form is negative definite; we report |J_r'| so
// the decrement diagnostic tracks distance-to-x_d either way.
inline double cost_jr_prime(const Trace& tr, int k, const EnvironmentProfile& env,
                            const GainSet& g, const FourierVec& F_d,
                            bool* sign_warning = nullptr) {
  if (!F_d.is_constant())
    throw NonConstantEnvironment("cost_jr_prime: F_d time-varying, no x_d oracle");
  const Vec x_d = env.steady_desired_position(F_d.a0);
  const EffectiveForceParams truth = env.environment_truth(0.0);
  const Mat W = truth.KS_star.transpose() * g.Q_r.transpose();
  const Mat Wsym = 0.5 * (W + W.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(Wsym, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  const bool definite = (lo > 0.0) || (hi < 0.0);
  if (sign_warning) *sign_warning = !definite;
  const auto w = detail::period_window(tr, k);
  std::vector<double> v;
  v.reserve(tr.N + 1);
  for (std::size_t i = w.begin; i <= w.end; ++i) {
    const Vec d = tr.steps[i].x_r - x_d;
    v.push_back(0.5 * d.dot(W * d));
  }
  const double val = detail::trapezoid(v, tr.h);
  return (definite && hi < 0.0) ? -val : val;
}

// pointwise Appendix-style sufficient-condition expression; returns its
// minimum over the period window
inline double sufficient_condition_margin(const Trace& tr, int k,
                                          const EnvironmentProfile& env,
                                          const GainSet& g) {
  const auto w = detail::period_window(tr, k);
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = w.begin; i <= w.end; ++i) {
    const StepRecord& s = tr.steps[i];
    const EffectiveForceParams truth = env.environment_truth(s.t);
    const double nF = (truth.F_star - s.F).norm();
    const double nS = (truth.KS_star - s.K_S).norm();
    const double nD = (truth.KD_star - s.K_D).norm();
    const double val =
        g.lambda_Gamma * s.epsilon.squaredNorm() + g.lambda_L * s.delta_xi.squaredNorm() +
        g.beta * (nF * nF + nS * nS + nD * nD) -
        g.beta * (nF * truth.F_star.norm() + nS * truth.KS_star.norm() +
                  nD * truth.KD_star.norm());
    m = std::min(m, val);
  }
  return m;
}

// pointwise slack of the boundedness bound; min over window
inline double boundedness_check(const Trace& tr, int k, const EnvironmentProfile& env,
                                const GainSet& g) {
  const auto w = detail::period_window(tr, k);
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = w.begin; i <= w.end; ++i) {
    const StepRecord& s = tr.steps[i];
    const EffectiveForceParams truth = env.environment_truth(s.t);
    const double nF2 = (truth.F_star - s.F).squaredNorm();
    const double nS2 = (truth.KS_star - s.K_S).squaredNorm();
    const double nD2 = (truth.KD_star - s.K_D).squaredNorm();
    const double budget = 0.5 * g.beta *
                          (truth.F_star.squaredNorm() + truth.KS_star.squaredNorm() +
                           truth.KD_star.squaredNorm());
    const double slack = budget - (g.lambda_Gamma * s.epsilon.squaredNorm() +
                                   g.lambda_L * s.delta_xi.squaredNorm() +
                                   0.5 * g.beta * (nF2 + nS2 + nD2));
    m = std::min(m, slack);
  }
  return m;
}

struct ForceResidual {
  double max_w_plus_f = 0.0;
  double max_eps = 0.0;
  double max_f = 0.0;
};

// sensorless force-estimate quality: at convergence w should cancel f exactly
inline ForceResidual force_estimation_residual(const Trace& tr, int k) {
  const auto w = detail::period_window(tr, k);
  ForceResidual r;
  for (std::size_t i = w.begin; i <= w.end; ++i) {
    const StepRecord& s = tr.steps[i];
    r.max_w_plus_f = std::max(r.max_w_plus_f, (s.w + s.f).norm());
    r.max_eps = std::max(r.max_eps, s.epsilon.norm());
    r.max_f = std::max(r.max_f, s.f.norm());
  }
  return r;
}

inline double rms_eps(const Trace& tr, int k) {
  const auto w = detail::period_window(tr, k);
  double s = 0.0;
  for (std::size_t i = w.begin; i <= w.end; ++i)
    s += tr.steps[i].epsilon.squaredNorm();
  return std::sqrt(s / static_cast<double>(w.end - w.begin + 1));
}

inline double per_period_decrement_tol(double J_prev) {
  // discretization + trapezoid error make exact nonpositivity too strict
  return 1e-3 * std::max(J_prev, 1.0);
}

inline void per_period_report(Trace& tr, const ScenarioConfig& cfg) {
  tr.periods.clear();
  tr.periods.reserve(tr.P);
  const bool jr_ok = cfg.F_d.is_constant() && cfg.env.is_constant() &&
                     !cfg.env.is_zero();
  for (int k = 1; k <= tr.P; ++k) {
    PeriodCosts pc;
    pc.k = k;
    pc.J_c = cost_jc(tr, k, cfg.env, cfg.gains);
    const StepRecord& endrec = tr.steps[static_cast<std::size_t>(k) * tr.N];
    pc.rms_eps = rms_eps(tr, k);
    const auto w = detail::period_window(tr, k);
    double mf = 0.0;
    for (std::size_t i = w.begin; i <= w.end; ++i) {
      const Vec Fd = cfg.F_d.eval(tr.steps[i].t, tr.T);
      mf = std::max(mf, (tr.steps[i].f - Fd).norm());
    }
    pc.max_force_err = mf;
    pc.margin_min = sufficient_condition_margin(tr, k, cfg.env, cfg.gains);
    pc.slack_min = boundedness_check(tr, k, cfg.env, cfg.gains);
    pc.jr_available = jr_ok;
    if (jr_ok) {
      pc.J_r = cost_jr(tr, k, cfg.env, cfg.gains, cfg.F_d);
      if (cfg.variant == Variant::NoDamping) {
        pc.J_c_prime = cost_jc_prime(tr, k, cfg.env, cfg.gains);
        pc.J_r_prime =
            cost_jr_prime(tr, k, cfg.env, cfg.gains, cfg.F_d, &pc.jr_prime_sign_warning);
      }
    }
    // J_e at the period endpoint. q is not logged, so evaluate M at the
    // scenario's home configuration; the endpoint epsilon is near zero once
    // converged, making the metric choice immaterial for the diagnostics.
    if (cfg.robot.kind == RobotKind::PointMass) {
      pc.J_e = 0.5 * cfg.robot.mass * endrec.epsilon.squaredNorm();
    } else {
      auto robot = cfg.robot.make();
      const DynamicsTerms terms = operational_dynamics(*robot, cfg.q0, cfg.qd0);
      pc.J_e = cost_je(endrec.epsilon, terms.M);
    }
    pc.J = pc.J_c + pc.J_e + (jr_ok ? pc.J_r : 0.0);
    if (k >= 2) pc.delta_J = pc.J - tr.periods.back().J;
    tr.periods.push_back(pc);
  }
}

inline Trace run_scenario(const ScenarioConfig& cfg) {
  Trace tr = integrate_scenario(cfg);
  per_period_report(tr, cfg);
  return tr;
}

}  // namespace ficsim

#endif
