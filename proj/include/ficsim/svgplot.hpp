#ifndef FICSIM_SVGPLOT_HPP
#define FICSIM_SVGPLOT_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "simulation.hpp"

namespace ficsim {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

namespace svgdetail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline const char* color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b"};
  return palette[i % 6];
}

}  // namespace svgdetail

// Minimal deterministic SVG line plot: axes box, 5 ticks per axis, one
// polyline per series, legend in the top-right corner. No external deps.
inline void write_svg_plot(const std::string& path, const std::string& title,
                           const std::string& xlabel, const std::string& ylabel,
                           const std::vector<PlotSeries>& series) {
  const double W = 760, H = 480;
  const double ml = 70, mr = 20, mt = 40, mb = 50;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) {
    ymax = ymin + 1.0;
    ymin -= 1.0;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
      << "' viewBox='0 0 " << W << " " << H << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n"
      << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16' "
         "font-family='sans-serif'>"
      << title << "</text>\n";
  // axes box + ticks
  out << "<rect x='" << ml << "' y='" << mt << "' width='" << W - ml - mr << "' height='"
      << H - mt - mb << "' fill='none' stroke='black'/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 5.0;
    const double fy = ymin + (ymax - ymin) * i / 5.0;
    out << "<line x1='" << px(fx) << "' y1='" << H - mb << "' x2='" << px(fx) << "' y2='"
        << H - mb + 5 << "' stroke='black'/>\n"
        << "<text x='" << px(fx) << "' y='" << H - mb + 18
        << "' text-anchor='middle' font-size='11' font-family='sans-serif'>"
        << svgdetail::num(fx) << "</text>\n"
        << "<line x1='" << ml - 5 << "' y1='" << py(fy) << "' x2='" << ml << "' y2='"
        << py(fy) << "' stroke='black'/>\n"
        << "<text x='" << ml - 8 << "' y='" << py(fy) + 4
        << "' text-anchor='end' font-size='11' font-family='sans-serif'>"
        << svgdetail::num(fy) << "</text>\n";
  }
  out << "<text x='" << W / 2 << "' y='" << H - 12
      << "' text-anchor='middle' font-size='13' font-family='sans-serif'>" << xlabel
      << "</text>\n"
      << "<text x='16' y='" << H / 2
      << "' text-anchor='middle' font-size='13' font-family='sans-serif' transform='rotate(-90 "
         "16 "
      << H / 2 << ")'>" << ylabel << "</text>\n";
  // series
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    out << "<polyline fill='none' stroke='" << svgdetail::color(si)
        << "' stroke-width='1.3' points='";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      out << svgdetail::num(px(s.x[i])) << "," << svgdetail::num(py(s.y[i])) << " ";
    out << "'/>\n";
    out << "<text x='" << W - mr - 8 << "' y='" << mt + 18 + 16 * static_cast<double>(si)
        << "' text-anchor='end' font-size='12' font-family='sans-serif' fill='"
        << svgdetail::color(si) << "'>" << s.label << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("write failed: " + path);
}

// Standard diagnostic plot set for a finished run.
inline void emit_plots(const Trace& tr, const ScenarioConfig& cfg, const std::string& dir) {
  // ||eps||(t)
  {
    PlotSeries s;
    s.label = "||eps||";
    s.x.reserve(tr.steps.size());
    s.y.reserve(tr.steps.size());
    for (const auto& st : tr.steps) {
      s.x.push_back(st.t);
      s.y.push_back(st.epsilon.norm());
    }
    write_svg_plot(dir + "/eps_norm.svg", "Tracking error", "t [s]", "||eps||", {s});
  }
  // per-period cost components
  {
    std::vector<PlotSeries> ss(3);
    ss[0].label = "J_c";
    ss[1].label = "J_e";
    ss[2].label = "J_r";
    for (const auto& p : tr.periods) {
      const double k = p.k;
      ss[0].x.push_back(k);
      ss[0].y.push_back(p.J_c);
      ss[1].x.push_back(k);
      ss[1].y.push_back(p.J_e);
      ss[2].x.push_back(k);
      ss[2].y.push_back(p.jr_available ? p.J_r : 0.0);
    }
    write_svg_plot(dir + "/costs.svg", "Per-period costs", "period", "J", ss);
  }
  // f vs F_d over final period
  {
    std::vector<PlotSeries> ss;
    const std::size_t b = static_cast<std::size_t>(tr.P - 1) * tr.N;
    for (int i = 0; i < tr.n; ++i) {
      PlotSeries sf, sd;
      sf.label = "f_" + std::to_string(i + 1);
      sd.label = "Fd_" + std::to_string(i + 1);
      for (std::size_t k = b; k < tr.steps.size(); ++k) {
        const auto& st = tr.steps[k];
        sf.x.push_back(st.t);
        sf.y.push_back(st.f(i));
        sd.x.push_back(st.t);
        sd.y.push_back(cfg.F_d.eval(st.t, tr.T)(i));
      }
      ss.push_back(std::move(sf));
      ss.push_back(std::move(sd));
    }
    write_svg_plot(dir + "/force_final.svg", "Contact force, final period", "t [s]", "force [N]",
                   ss);
  }
  // x vs x_r (vs x_d when the oracle exists)
  {
    std::vector<PlotSeries> ss;
    for (int i = 0; i < tr.n; ++i) {
      PlotSeries sx, sr;
      sx.label = "x_" + std::to_string(i + 1);
      sr.label = "xr_" + std::to_string(i + 1);
      for (const auto& st : tr.steps) {
        sx.x.push_back(st.t);
        sx.y.push_back(st.x(i));
        sr.x.push_back(st.t);
        sr.y.push_back(st.x_r(i));
      }
      ss.push_back(std::move(sx));
      ss.push_back(std::move(sr));
    }
    if (cfg.F_d.is_constant() && cfg.env.is_constant() && !cfg.env.is_zero()) {
      try {
        const Vec xd = cfg.env.steady_desired_position(cfg.F_d.a0);
        for (int i = 0; i < tr.n; ++i) {
          PlotSeries sd;
          sd.label = "xd_" + std::to_string(i + 1);
          sd.x = {tr.steps.front().t, tr.steps.back().t};
          sd.y = {xd(i), xd(i)};
          ss.push_back(std::move(sd));
        }
      } catch (const SingularStiffness&) {
        // no oracle, skip the x_d line
      }
    }
    write_svg_plot(dir + "/position.svg", "Position vs reference", "t [s]", "x [m]", ss);
  }
}

}  // namespace ficsim

#endif
