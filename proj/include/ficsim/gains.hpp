#ifndef FICSIM_GAINS_HPP
#define FICSIM_GAINS_HPP

#include <Eigen/Dense>
#include <string>

#include "errors.hpp"
#include "robot.hpp"

namespace ficsim {

namespace detail {

inline void require_symmetric(const Mat& m, const std::string& name) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw ConfigError(name + ": not symmetric");
}

inline double min_eigenvalue_sym(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline void require_spd(const Mat& m, const std::string& name) {
  require_symmetric(m, name);
  if (!(min_eigenvalue_sym(m) > 0.0))
    throw ConfigError(name + ": not positive definite");
}

}  // namespace detail

// All controller gains. Positivity/symmetry invariants are checked once at
// construction; lambda_Gamma / lambda_L cache the minimal eigenvalues used by
// the boundedness diagnostics.
struct GainSet {
  double alpha = 5.0;   // tracking-error mixing rate, 1/s
  Mat Gamma;            // feedback gain, SPD
  Mat Q_F;              // force adaptation gain, SPD
  Mat Q_S;              // stiffness adaptation gain, SPD
  Mat Q_D;              // damping adaptation gain, SPD
  Mat Q_r;              // trajectory adaptation gain, symmetric PD
  Mat L;                // trajectory adaptation damping gain, PD
  double beta = 1e-3;   // forgetting factor (constant), >= 0
  double kappa = 1e-4;  // reference-realization regularization, > 0

  double lambda_Gamma = 0.0;
  double lambda_L = 0.0;

  static GainSet isotropic(int n, double alpha, double gamma, double qF, double qS,
                           double qD, double qr, double l, double beta, double kappa) {
    GainSet g;
    g.alpha = alpha;
    g.Gamma = gamma * Mat::Identity(n, n);
    g.Q_F = qF * Mat::Identity(n, n);
    g.Q_S = qS * Mat::Identity(n, n);
    g.Q_D = qD * Mat::Identity(n, n);
    g.Q_r = qr * Mat::Identity(n, n);
    g.L = l * Mat::Identity(n, n);
    g.beta = beta;
    g.kappa = kappa;
    g.validate();
    return g;
  }

  void validate() {
    if (!(alpha > 0)) throw ConfigError("gains.alpha: must be positive");
    if (!(beta >= 0)) throw ConfigError("gains.beta: must be nonnegative");
    if (!(kappa > 0)) throw ConfigError("gains.kappa: must be positive");
    detail::require_spd(Gamma, "gains.gamma");
    detail::require_spd(Q_F, "gains.QF");
    detail::require_spd(Q_S, "gains.QS");
    detail::require_spd(Q_D, "gains.QD");
    detail::require_spd(Q_r, "gains.Qr");
    detail::require_spd(L, "gains.L");
    lambda_Gamma = detail::min_eigenvalue_sym(Gamma);
    lambda_L = detail::min_eigenvalue_sym(L);
  }

  int n() const { return static_cast<int>(Gamma.rows()); }
};

}  // namespace ficsim

#endif
