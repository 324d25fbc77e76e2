#include "icbf/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "icbf/errors.hpp"

namespace icbf {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-9) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

void render_panel(std::ostringstream& os, const PlotPanel& p, double ox, double oy, double w, double h) {
  const double ml = 52, mr = 12, mt = 24, mb = 38;
  const double pw = w - ml - mr;
  const double ph = h - mt - mb;
  Range rx, ry;
  for (const PlotSeries& s : p.series) {
    for (double v : s.x) rx.add(v);
    for (double v : s.y) ry.add(v);
  }
  if (p.zero_line) ry.add(0.0);
  rx.pad();
  ry.pad();
  const double ystep = nice_step(ry.hi - ry.lo, 5);
  ry.lo = std::floor(ry.lo / ystep) * ystep;
  ry.hi = std::ceil(ry.hi / ystep) * ystep;
  const double xstep = nice_step(rx.hi - rx.lo, 6);

  auto X = [&](double v) { return ox + ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto Y = [&](double v) { return oy + mt + (ry.hi - v) / (ry.hi - ry.lo) * ph; };

  os << "<g>\n";
  os << "<text x=\"" << num(ox + ml + pw / 2) << "\" y=\"" << num(oy + 16)
     << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(p.title) << "</text>\n";
  os << "<rect x=\"" << num(ox + ml) << "\" y=\"" << num(oy + mt) << "\" width=\"" << num(pw) << "\" height=\""
     << num(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (double t = ry.lo; t <= ry.hi + 1e-9 * ystep; t += ystep) {
    os << "<line x1=\"" << num(ox + ml) << "\" x2=\"" << num(ox + ml + pw) << "\" y1=\"" << num(Y(t)) << "\" y2=\""
       << num(Y(t)) << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << num(ox + ml - 4) << "\" y=\"" << num(Y(t) + 4)
       << "\" text-anchor=\"end\" font-size=\"10\">" << tick_label(t) << "</text>\n";
  }
  for (double t = std::ceil(rx.lo / xstep) * xstep; t <= rx.hi + 1e-9 * xstep; t += xstep) {
    os << "<text x=\"" << num(X(t)) << "\" y=\"" << num(oy + mt + ph + 14)
       << "\" text-anchor=\"middle\" font-size=\"10\">" << tick_label(t) << "</text>\n";
  }
  os << "<text x=\"" << num(ox + ml + pw / 2) << "\" y=\"" << num(oy + h - 6)
     << "\" text-anchor=\"middle\" font-size=\"11\">" << escape(p.x_label) << "</text>\n";
  os << "<text transform=\"translate(" << num(ox + 12) << "," << num(oy + mt + ph / 2)
     << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"11\">" << escape(p.y_label) << "</text>\n";
  if (p.zero_line && ry.lo <= 0.0 && ry.hi >= 0.0) {
    os << "<line x1=\"" << num(ox + ml) << "\" x2=\"" << num(ox + ml + pw) << "\" y1=\"" << num(Y(0)) << "\" y2=\""
       << num(Y(0)) << "\" stroke=\"#000\" stroke-width=\"0.8\"/>\n";
  }
  for (const PlotSeries& s : p.series) {
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.4\"";
    if (!s.dash.empty()) os << " stroke-dasharray=\"" << s.dash << "\"";
    os << " points=\"";
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t k = 0; k < n; ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      os << num(X(s.x[k])) << ',' << num(Y(std::clamp(s.y[k], ry.lo, ry.hi))) << ' ';
    }
    os << "\"><title>" << escape(s.label) << "</title></polyline>\n";
  }
  // legend
  double ly = oy + mt + 12;
  for (const PlotSeries& s : p.series) {
    if (s.label.empty()) continue;
    os << "<line x1=\"" << num(ox + ml + pw - 70) << "\" x2=\"" << num(ox + ml + pw - 52) << "\" y1=\"" << num(ly - 4)
       << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << s.color << "\" stroke-width=\"1.4\"";
    if (!s.dash.empty()) os << " stroke-dasharray=\"" << s.dash << "\"";
    os << "/>\n<text x=\"" << num(ox + ml + pw - 48) << "\" y=\"" << num(ly) << "\" font-size=\"9\">"
       << escape(s.label) << "</text>\n";
    ly += 12;
  }
  os << "</g>\n";
}

std::vector<double> times(const SimTrace& trace) {
  std::vector<double> t;
  for (const StepRecord& r : trace.steps) t.push_back(r.t_s);
  return t;
}

template <class F>
std::vector<double> column(const SimTrace& trace, F f) {
  std::vector<double> out;
  for (const StepRecord& r : trace.steps) out.push_back(f(r));
  return out;
}

// h_c_<i><j> with 1-based ids; picks the first split with both ids in range
bool parse_collision_name(const std::string& name, int n, int& i, int& j) {
  const std::string prefix = "h_c_";
  if (name.rfind(prefix, 0) != 0) return false;
  const std::string ids = name.substr(prefix.size());
  for (std::size_t cut = 1; cut < ids.size(); ++cut) {
    const int a = std::atoi(ids.substr(0, cut).c_str());
    const int b = std::atoi(ids.substr(cut).c_str());
    if (a >= 1 && a <= n && b >= 1 && b <= n && a != b) {
      i = a - 1;
      j = b - 1;
      return true;
    }
  }
  return false;
}

}  // namespace

std::string agent_color(int agent) {
  static const char* palette[] = {"#d62728", "#1f77b4", "#2ca02c", "#17becf", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};
  return palette[static_cast<std::size_t>(agent) % std::size(palette)];
}

std::string render_svg(const std::vector<PlotPanel>& panels, int columns, const std::string& title,
                       int panel_width, int panel_height) {
  if (columns < 1) throw InvalidInput("render_svg: columns must be >= 1");
  const int rows = std::max<int>(1, (static_cast<int>(panels.size()) + columns - 1) / columns);
  const int header = 28;
  const int width = columns * panel_width;
  const int height = header + rows * panel_height;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"19\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
     << "</text>\n";
  for (std::size_t k = 0; k < panels.size(); ++k) {
    const int r = static_cast<int>(k) / columns;
    const int c = static_cast<int>(k) % columns;
    render_panel(os, panels[k], c * panel_width, header + r * panel_height, panel_width, panel_height);
  }
  os << "</svg>\n";
  return os.str();
}

std::string render_state_plot(const SimTrace& trace) {
  const std::vector<double> t = times(trace);
  PlotPanel pv{"velocity", "t [s]", "v [m/s]", {}, false};
  PlotPanel ps{"path coordinate", "t [s]", "s [m]", {}, false};
  PlotPanel pu{"acceleration input", "t [s]", "u [m/s^2]", {}, true};
  for (int i = 0; i < trace.agent_count; ++i) {
    const std::string id = std::to_string(i + 1);
    const std::string col = agent_color(i);
    pv.series.push_back({t, column(trace, [i](const StepRecord& r) { return r.x.at(i).v_mps; }), col, "", "agent " + id});
    ps.series.push_back({t, column(trace, [i](const StepRecord& r) { return r.x.at(i).s_m; }), col, "", "agent " + id});
    pu.series.push_back({t, column(trace, [i](const StepRecord& r) {
                           return static_cast<std::size_t>(i) < r.u.size() ? r.u[i] : std::nan("");
                         }), col, "", "u_" + id});
    pu.series.push_back({t, column(trace, [i](const StepRecord& r) {
                           return static_cast<std::size_t>(i) < r.u_nom.size() ? r.u_nom[i] : std::nan("");
                         }), col, "2,3", ""});
  }
  return render_svg({pv, ps, pu}, 1, trace.scenario + ": states and inputs", 720, 240);
}

std::string render_cbf_plot(const SimTrace& trace) {
  const std::vector<double> t = times(trace);
  std::vector<PlotPanel> panels;
  for (int i = 0; i < trace.agent_count; ++i) {
    panels.push_back({"agent " + std::to_string(i + 1), "t [s]", "h", {}, true});
  }
  for (std::size_t c = 0; c < trace.cbf_names.size(); ++c) {
    const std::string& name = trace.cbf_names[c];
    auto values = column(trace, [c](const StepRecord& r) { return r.h.at(c); });
    int i = 0, j = 0;
    if (name.rfind("h_vlo_", 0) == 0 || name.rfind("h_vhi_", 0) == 0) {
      i = std::atoi(name.substr(6).c_str()) - 1;
      if (i < 0 || i >= trace.agent_count) continue;
      const bool lower = name[3] == 'l';
      panels[i].series.push_back({t, values, agent_color(i), lower ? "6,4" : "2,3", name});
    } else if (parse_collision_name(name, trace.agent_count, i, j)) {
      panels[i].series.push_back({t, values, agent_color(j), "", name});
    }
  }
  return render_svg(panels, std::max(1, trace.agent_count), trace.scenario + ": barrier values", 360, 300);
}

void write_plots(const SimTrace& trace, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [file, body] : {std::pair{"states.svg", render_state_plot(trace)},
                                   std::pair{"barriers.svg", render_cbf_plot(trace)}}) {
    std::ofstream out(dir / file, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + (dir / file).string());
    out << body;
  }
}

}  // namespace icbf
