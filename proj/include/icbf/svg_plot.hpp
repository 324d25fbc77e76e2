#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "icbf/simulation.hpp"

namespace icbf {

struct PlotSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#000000";
  std::string dash;  // SVG stroke-dasharray, empty = solid
  std::string label;
};

struct PlotPanel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  bool zero_line = false;
};

/// Grid of line charts, filled row by row.
std::string render_svg(const std::vector<PlotPanel>& panels, int columns, const std::string& title,
                       int panel_width = 420, int panel_height = 260);

/// Agent colour: red, blue, green, cyan, then a fixed palette.
std::string agent_color(int agent);

/// Velocities, path coordinates and inputs (u solid, u_nom dotted).
std::string render_state_plot(const SimTrace& trace);
/// One column per agent: velocity barriers dashed in the agent colour,
/// collision barriers solid in the colour of the other agent.
std::string render_cbf_plot(const SimTrace& trace);

/// Writes states.svg and barriers.svg into `dir`.
void write_plots(const SimTrace& trace, const std::filesystem::path& dir);

}  // namespace icbf
