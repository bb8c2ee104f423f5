#ifndef FICSIM_SCENARIO_IO_HPP
#define FICSIM_SCENARIO_IO_HPP

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "simulation.hpp"

namespace ficsim {

// Scenario dialect (documented in README.md): line-oriented key = value pairs
// grouped under [section] headers, '#' comments. Vector values are
// comma-separated; a single scalar broadcasts (vectors: constant entries,
// matrices: scalar * I). Matrix values may also list all n*n entries
// row-major. T-periodic profiles take harmonics via key suffixes _cos1,
// _sin1, _cos2, ... on top of the constant term.

namespace iniio {

using Section = std::map<std::string, std::string>;
using File = std::map<std::string, Section>;

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline File parse_ini(std::istream& in, const std::string& origin) {
  File out;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      out[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    out[section][key] = val;
  }
  return out;
}

inline double to_double(const std::string& v, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (trim(v.substr(pos)).empty()) return d;
  } catch (...) {
  }
  throw ConfigError(where + ": not a number: '" + v + "'");
}

inline std::vector<double> to_list(const std::string& v, const std::string& where) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(v);
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item), where));
  if (out.empty()) throw ConfigError(where + ": empty value");
  return out;
}

}  // namespace iniio

namespace detail {

class ScenarioReader {
 public:
  ScenarioReader(iniio::File file, std::string origin)
      : f_(std::move(file)), origin_(std::move(origin)) {}

  bool has(const std::string& sec, const std::string& key) const {
    const auto s = f_.find(sec);
    return s != f_.end() && s->second.count(key) > 0;
  }

  std::string str(const std::string& sec, const std::string& key,
                  const std::string& def) const {
    if (!has(sec, key)) return def;
    used_.insert(sec + "." + key);
    return f_.at(sec).at(key);
  }

  double num(const std::string& sec, const std::string& key, double def) const {
    if (!has(sec, key)) return def;
    used_.insert(sec + "." + key);
    return iniio::to_double(f_.at(sec).at(key), where(sec, key));
  }

  double num_required(const std::string& sec, const std::string& key) const {
    if (!has(sec, key)) throw ConfigError(where(sec, key) + ": missing required key");
    return num(sec, key, 0.0);
  }

  // scalar broadcast or explicit n-vector
  Vec vec(const std::string& sec, const std::string& key, int n, const Vec& def) const {
    if (!has(sec, key)) return def;
    used_.insert(sec + "." + key);
    const auto lst = iniio::to_list(f_.at(sec).at(key), where(sec, key));
    if (lst.size() == 1) return Vec::Constant(n, lst[0]);
    if (static_cast<int>(lst.size()) != n)
      throw ConfigError(where(sec, key) + ": expected 1 or " + std::to_string(n) + " entries");
    return Eigen::Map<const Vec>(lst.data(), n);
  }

  // scalar * I or explicit n*n row-major matrix
  Mat mat(const std::string& sec, const std::string& key, int n, const Mat& def) const {
    if (!has(sec, key)) return def;
    used_.insert(sec + "." + key);
    const auto lst = iniio::to_list(f_.at(sec).at(key), where(sec, key));
    if (lst.size() == 1) return lst[0] * Mat::Identity(n, n);
    if (static_cast<int>(lst.size()) != n * n)
      throw ConfigError(where(sec, key) + ": expected 1 or " + std::to_string(n * n) +
                        " entries");
    Mat m(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) m(r, c) = lst[static_cast<std::size_t>(r) * n + c];
    return m;
  }

  FourierVec fourier_vec(const std::string& sec, const std::string& key, int n,
                         const Vec& def0) const {
    FourierVec f;
    f.a0 = vec(sec, key, n, def0);
    for (int k = 1;; ++k) {
      const std::string ck = key + "_cos" + std::to_string(k);
      const std::string sk = key + "_sin" + std::to_string(k);
      if (!has(sec, ck) && !has(sec, sk)) break;
      f.harmonics.emplace_back(vec(sec, ck, n, Vec::Zero(n)), vec(sec, sk, n, Vec::Zero(n)));
    }
    return f;
  }

  FourierMat fourier_mat(const std::string& sec, const std::string& key, int n,
                         const Mat& def0) const {
    FourierMat f;
    f.a0 = mat(sec, key, n, def0);
    for (int k = 1;; ++k) {
      const std::string ck = key + "_cos" + std::to_string(k);
      const std::string sk = key + "_sin" + std::to_string(k);
      if (!has(sec, ck) && !has(sec, sk)) break;
      f.harmonics.emplace_back(mat(sec, ck, n, Mat::Zero(n, n)),
                               mat(sec, sk, n, Mat::Zero(n, n)));
    }
    return f;
  }

  std::string where(const std::string& sec, const std::string& key) const {
    return origin_ + ": " + sec + "." + key;
  }

  const iniio::File& file() const { return f_; }

 private:
  iniio::File f_;
  std::string origin_;
  mutable std::set<std::string> used_;
};

}  // namespace detail

inline ScenarioConfig parse_scenario_stream(std::istream& in, const std::string& origin) {
  detail::ScenarioReader r(iniio::parse_ini(in, origin), origin);
  ScenarioConfig cfg;
  cfg.name = r.str("", "name", "scenario");

  // robot
  const std::string rtype = r.str("robot", "type", "point_mass");
  if (rtype == "point_mass") {
    cfg.robot.kind = RobotKind::PointMass;
    cfg.robot.n = static_cast<int>(r.num("robot", "n", 1));
    if (cfg.robot.n < 1) throw ConfigError(r.where("robot", "n") + ": must be >= 1");
    cfg.robot.mass = r.num("robot", "mass", 1.0);
    cfg.robot.gravity_force =
        r.vec("robot", "gravity", cfg.robot.n, Vec::Zero(cfg.robot.n));
  } else if (rtype == "two_link") {
    cfg.robot.kind = RobotKind::TwoLink;
    cfg.robot.n = 2;
    TwoLinkArm::Params p;
    p.m1 = r.num("robot", "m1", p.m1);
    p.m2 = r.num("robot", "m2", p.m2);
    p.l1 = r.num("robot", "l1", p.l1);
    p.l2 = r.num("robot", "l2", p.l2);
    p.lc1 = r.num("robot", "lc1", p.lc1);
    p.lc2 = r.num("robot", "lc2", p.lc2);
    p.I1 = r.num("robot", "I1", p.I1);
    p.I2 = r.num("robot", "I2", p.I2);
    p.g = r.num("robot", "g", p.g);
    cfg.robot.arm = p;
  } else {
    throw ConfigError(r.where("robot", "type") + ": unknown robot type '" + rtype + "'");
  }
  const int n = cfg.robot.n;

  // simulation grid
  cfg.T = r.num("simulation", "T", 2.0);
  cfg.h = r.num("simulation", "h", 1e-3);
  cfg.P = static_cast<int>(r.num("simulation", "periods", 30));

  // environment (force applied to the robot; a wall has KS, KD < 0)
  cfg.env = EnvironmentProfile(
      cfg.T, r.fourier_vec("environment", "F0", n, Vec::Zero(n)),
      r.fourier_mat("environment", "KS", n, Mat::Zero(n, n)),
      r.fourier_mat("environment", "KD", n, Mat::Zero(n, n)),
      r.fourier_vec("environment", "x0", n, Vec::Zero(n)));

  // desired force
  cfg.F_d = r.fourier_vec("force", "Fd", n, Vec::Zero(n));

  // gains
  GainSet g;
  g.alpha = r.num("gains", "alpha", 5.0);
  g.Gamma = r.mat("gains", "gamma", n, 20.0 * Mat::Identity(n, n));
  g.Q_F = r.mat("gains", "QF", n, Mat::Identity(n, n));
  g.Q_S = r.mat("gains", "QS", n, Mat::Identity(n, n));
  g.Q_D = r.mat("gains", "QD", n, Mat::Identity(n, n));
  g.Q_r = r.mat("gains", "Qr", n, Mat::Identity(n, n));
  g.L = r.mat("gains", "L", n, Mat::Identity(n, n));
  g.beta = r.num("gains", "beta", 1e-3);
  g.kappa = r.num("gains", "kappa", 1e-4);
  g.validate();
  cfg.gains = g;

  // controller variant / gate / realization
  const std::string variant = r.str("controller", "variant", "full");
  if (variant == "full") cfg.variant = Variant::Full;
  else if (variant == "no-damping") cfg.variant = Variant::NoDamping;
  else throw ConfigError(r.where("controller", "variant") + ": must be full or no-damping");

  const std::string gate = r.str("controller", "gate", "simultaneous");
  if (gate == "simultaneous") {
    cfg.gate.mode = GateMode::Simultaneous;
  } else if (gate.rfind("after:", 0) == 0) {
    cfg.gate.mode = GateMode::AfterKPeriods;
    cfg.gate.after_periods =
        static_cast<int>(iniio::to_double(gate.substr(6), r.where("controller", "gate")));
  } else if (gate.rfind("eps:", 0) == 0) {
    cfg.gate.mode = GateMode::EpsilonThreshold;
    cfg.gate.eps_threshold = iniio::to_double(gate.substr(4), r.where("controller", "gate"));
  } else {
    throw ConfigError(r.where("controller", "gate") +
                      ": must be simultaneous, after:<k>, or eps:<thr>");
  }

  const std::string mode = r.str("controller", "realization", "shifted");
  if (mode == "shifted") cfg.realization.mode = RealizationMode::Shifted;
  else if (mode == "literal") cfg.realization.mode = RealizationMode::Literal;
  else throw ConfigError(r.where("controller", "realization") + ": must be shifted or literal");
  cfg.realization.tau_r = r.num("controller", "tau_r", 0.1);
  cfg.realization.tau_smooth = r.num("controller", "tau_smooth", 0.1);
  cfg.realization.ramp_time = r.num("controller", "ramp", 0.0);

  // initial conditions and first-period reference
  cfg.q0 = r.vec("initial", "q0", n, Vec::Zero(n));
  cfg.qd0 = r.vec("initial", "qd0", n, Vec::Zero(n));
  cfg.initial_reference.base = r.fourier_vec("initial", "xr", n, Vec::Zero(n));
  cfg.initial_reference.slope = r.vec("initial", "xr_slope", n, Vec::Zero(n));

  cfg.validate();
  return cfg;
}

inline ScenarioConfig parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path);
  return parse_scenario_stream(in, path);
}

}  // namespace ficsim

#endif
