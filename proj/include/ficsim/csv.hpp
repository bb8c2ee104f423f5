#ifndef FICSIM_CSV_HPP
#define FICSIM_CSV_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "simulation.hpp"

namespace ficsim {

namespace csvio {

// shortest round-trippable decimal text
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void append_vec_headers(std::vector<std::string>& h, const std::string& base, int n) {
  for (int i = 1; i <= n; ++i) h.push_back(base + "_" + std::to_string(i));
}

inline void append_mat_headers(std::vector<std::string>& h, const std::string& base, int n) {
  for (int r = 1; r <= n; ++r)
    for (int c = 1; c <= n; ++c)
      h.push_back(base + "_" + std::to_string(r) + std::to_string(c));
}

}  // namespace csvio

inline std::vector<std::string> trace_csv_header(int n) {
  std::vector<std::string> h;
  h.push_back("t");
  csvio::append_vec_headers(h, "x", n);
  csvio::append_vec_headers(h, "xdot", n);
  csvio::append_vec_headers(h, "xr", n);
  csvio::append_vec_headers(h, "e", n);
  csvio::append_vec_headers(h, "eps", n);
  csvio::append_vec_headers(h, "F", n);
  csvio::append_mat_headers(h, "KS", n);
  csvio::append_mat_headers(h, "KD", n);
  csvio::append_vec_headers(h, "xir", n);
  csvio::append_vec_headers(h, "f", n);
  csvio::append_vec_headers(h, "u", n);
  csvio::append_vec_headers(h, "v", n);
  csvio::append_vec_headers(h, "w", n);
  return h;
}

inline std::vector<double> trace_csv_row(const StepRecord& s, int n) {
  std::vector<double> row;
  row.reserve(1 + 11 * n + 2 * n * n);
  row.push_back(s.t);
  auto pv = [&](const Vec& v) {
    for (int i = 0; i < n; ++i) row.push_back(v(i));
  };
  auto pm = [&](const Mat& m) {
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) row.push_back(m(r, c));
  };
  pv(s.x);
  pv(s.xdot);
  pv(s.x_r);
  pv(s.e);
  pv(s.epsilon);
  pv(s.F);
  pm(s.K_S);
  pm(s.K_D);
  pv(s.xi_r);
  pv(s.f);
  pv(s.u);
  pv(s.v);
  pv(s.w);
  return row;
}

inline void emit_trace_csv(const Trace& tr, const std::string& dir) {
  const std::string path = dir + "/trace.csv";
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  const auto header = trace_csv_header(tr.n);
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  for (const StepRecord& s : tr.steps) {
    const auto row = trace_csv_row(s, tr.n);
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << csvio::fmt(row[i]);
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path);

  const std::string ppath = dir + "/periods.csv";
  std::ofstream pout(ppath);
  if (!pout) throw IoError("cannot write " + ppath);
  pout << "period,J_c,J_e,J_r,J,delta_J,rms_eps,max_force_err,margin_min,slack_min\n";
  for (const PeriodCosts& p : tr.periods) {
    pout << p.k << ',' << csvio::fmt(p.J_c) << ',' << csvio::fmt(p.J_e) << ','
         << csvio::fmt(p.jr_available ? p.J_r : 0.0) << ',' << csvio::fmt(p.J) << ','
         << csvio::fmt(p.delta_J) << ',' << csvio::fmt(p.rms_eps) << ','
         << csvio::fmt(p.max_force_err) << ',' << csvio::fmt(p.margin_min) << ','
         << csvio::fmt(p.slack_min) << "\n";
  }
  if (!pout) throw IoError("write failed: " + ppath);
}

// Reader used by round-trip tests and post-hoc tooling.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty csv: " + path);
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(t.header.size());
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != t.header.size())
      throw IoError(path + ": ragged row with " + std::to_string(row.size()) + " cells");
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace ficsim

#endif
