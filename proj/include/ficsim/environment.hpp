#ifndef FICSIM_ENVIRONMENT_HPP
#define FICSIM_ENVIRONMENT_HPP

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "robot.hpp"

namespace ficsim {

// T-periodic matrix-valued signal: constant term plus a truncated Fourier
// series with fundamental 2*pi/T. Exactly periodic by construction, so the
// period-delay assumption holds to machine precision.
struct FourierMat {
  Mat a0;
  // harmonic k (1-based index = position+1): a0 + sum_k (Ck cos + Sk sin)
  std::vector<std::pair<Mat, Mat>> harmonics;

  static FourierMat constant(Mat m) {
    FourierMat f;
    f.a0 = std::move(m);
    return f;
  }

  Mat eval(double t, double T) const {
    Mat out = a0;
    const double w = 2.0 * M_PI / T;
    for (std::size_t k = 0; k < harmonics.size(); ++k) {
      const double arg = w * static_cast<double>(k + 1) * t;
      out += harmonics[k].first * std::cos(arg) + harmonics[k].second * std::sin(arg);
    }
    return out;
  }

  bool is_constant() const { return harmonics.empty(); }
};

struct FourierVec {
  Vec a0;
  std::vector<std::pair<Vec, Vec>> harmonics;

  static FourierVec constant(Vec v) {
    FourierVec f;
    f.a0 = std::move(v);
    return f;
  }

  Vec eval(double t, double T) const {
    Vec out = a0;
    const double w = 2.0 * M_PI / T;
    for (std::size_t k = 0; k < harmonics.size(); ++k) {
      const double arg = w * static_cast<double>(k + 1) * t;
      out += harmonics[k].first * std::cos(arg) + harmonics[k].second * std::sin(arg);
    }
    return out;
  }

  bool is_constant() const { return harmonics.empty(); }
};

// Effective parameters of the interaction-force expansion
//   f = F* + KS* x + KD* xd,   F* = F0* - KS* x0*
struct EffectiveForceParams {
  Vec F_star;
  Mat KS_star;
  Mat KD_star;
};

// Ground-truth visco-elastic environment. Sign convention: f is the force
// applied TO the robot; a stiff wall has negative-definite KS* (restoring)
// and negative-definite KD* (dissipative).
class EnvironmentProfile {
 public:
  EnvironmentProfile(double T, FourierVec F0, FourierMat KS, FourierMat KD,
                     FourierVec x0)
      : T_(T), F0_(std::move(F0)), KS_(std::move(KS)), KD_(std::move(KD)),
        x0_(std::move(x0)) {
    if (!(T_ > 0)) throw ConfigError("environment.T: must be positive");
  }

  static EnvironmentProfile free_space(int n, double T) {
    return EnvironmentProfile(T, FourierVec::constant(Vec::Zero(n)),
                              FourierMat::constant(Mat::Zero(n, n)),
                              FourierMat::constant(Mat::Zero(n, n)),
                              FourierVec::constant(Vec::Zero(n)));
  }

  double period() const { return T_; }
  int n() const { return static_cast<int>(F0_.a0.size()); }

  Vec interaction_force(double t, const Vec& x, const Vec& xdot) const {
    return F0_.eval(t, T_) + KS_.eval(t, T_) * (x - x0_.eval(t, T_)) +
           KD_.eval(t, T_) * xdot;
  }

  // Privileged accessor for diagnostics; the controller never sees this.
  EffectiveForceParams environment_truth(double t) const {
    EffectiveForceParams p;
    p.KS_star = KS_.eval(t, T_);
    p.KD_star = KD_.eval(t, T_);
    p.F_star = F0_.eval(t, T_) - p.KS_star * x0_.eval(t, T_);
    return p;
  }

  bool is_constant() const {
    return F0_.is_constant() && KS_.is_constant() && KD_.is_constant() &&
           x0_.is_constant();
  }

  bool is_zero() const {
    return is_constant() && F0_.a0.isZero(0.0) && KS_.a0.isZero(0.0) &&
           KD_.a0.isZero(0.0);
  }

  // Steady position rendering F_d against a constant environment:
  //   x_d = KS*^-1 (F_d - F*)   (xd_dot = 0)
  Vec steady_desired_position(const Vec& F_d) const {
    if (!is_constant())
      throw NonConstantEnvironment("steady_desired_position: environment is time-varying");
    const EffectiveForceParams p = environment_truth(0.0);
    Eigen::FullPivLU<Mat> lu(p.KS_star);
    if (!lu.isInvertible())
      throw SingularStiffness("steady_desired_position: KS* singular");
    return lu.solve(F_d - p.F_star);
  }

 private:
  double T_;
  FourierVec F0_;
  FourierMat KS_;
  FourierMat KD_;
  FourierVec x0_;
};

}  // namespace ficsim

#endif
