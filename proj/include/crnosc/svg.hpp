// Minimal SVG writer: polylines, filled cells, markers, axes with ticks.
// Enough to render two-parameter bifurcation diagrams and phase portraits
// without an external plotting dependency.
#pragma once

#include <string>
#include <vector>

#include "crnosc/dynamics.hpp"
#include "crnosc/hopf.hpp"

namespace crn {

class SvgCanvas {
 public:
  SvgCanvas(double x_lo, double x_hi, double y_lo, double y_hi, int width = 720,
            int height = 540);

  void add_rect(double x0, double y0, double x1, double y1, const std::string& fill);
  void add_polyline(const std::vector<std::pair<double, double>>& pts,
                    const std::string& stroke, double stroke_width = 1.5);
  void add_marker(double x, double y, const std::string& fill, double radius = 4.0);
  void add_text(double px, double py, const std::string& text, int font_size = 12);

  // Frame, tick marks and numeric labels along both axes.
  void add_axes(const std::string& x_label, const std::string& y_label);

  std::string finish() const;

 private:
  double map_x(double x) const;
  double map_y(double y) const;

  double x_lo_, x_hi_, y_lo_, y_hi_;
  int width_, height_;
  int margin_ = 56;
  std::vector<std::string> body_;
};

// Region-shaded classification diagram with the refined boundary polyline
// and degenerate-point markers.
std::string hopf_diagram_svg(const HopfScanResult& scan);

// 2D projection of a trajectory (and optional cycle overlays).
std::string phase_portrait_svg(const Trajectory& traj, int cx, int cy,
                               const std::vector<std::string>& species,
                               const std::vector<const LimitCycleReport*>& cycles = {});

}  // namespace crn
