#include "crnosc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace crn {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

SvgCanvas::SvgCanvas(double x_lo, double x_hi, double y_lo, double y_hi, int width,
                     int height)
    : x_lo_(x_lo), x_hi_(x_hi), y_lo_(y_lo), y_hi_(y_hi), width_(width), height_(height) {}

double SvgCanvas::map_x(double x) const {
  return margin_ + (x - x_lo_) / (x_hi_ - x_lo_) * (width_ - 2 * margin_);
}

double SvgCanvas::map_y(double y) const {
  return height_ - margin_ - (y - y_lo_) / (y_hi_ - y_lo_) * (height_ - 2 * margin_);
}

void SvgCanvas::add_rect(double x0, double y0, double x1, double y1,
                         const std::string& fill) {
  double px = map_x(x0), py = map_y(y1);
  double w = map_x(x1) - map_x(x0), h = map_y(y0) - map_y(y1);
  std::ostringstream os;
  os << "<rect x=\"" << num(px) << "\" y=\"" << num(py) << "\" width=\"" << num(w)
     << "\" height=\"" << num(h) << "\" fill=\"" << fill << "\"/>";
  body_.push_back(os.str());
}

void SvgCanvas::add_polyline(const std::vector<std::pair<double, double>>& pts,
                             const std::string& stroke, double stroke_width) {
  if (pts.size() < 2) return;
  std::ostringstream os;
  os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
     << stroke_width << "\" points=\"";
  for (auto& [x, y] : pts) os << num(map_x(x)) << ',' << num(map_y(y)) << ' ';
  os << "\"/>";
  body_.push_back(os.str());
}

void SvgCanvas::add_marker(double x, double y, const std::string& fill, double radius) {
  std::ostringstream os;
  os << "<circle cx=\"" << num(map_x(x)) << "\" cy=\"" << num(map_y(y)) << "\" r=\""
     << radius << "\" fill=\"" << fill << "\"/>";
  body_.push_back(os.str());
}

void SvgCanvas::add_text(double px, double py, const std::string& text, int font_size) {
  std::ostringstream os;
  os << "<text x=\"" << num(px) << "\" y=\"" << num(py) << "\" font-size=\"" << font_size
     << "\" font-family=\"sans-serif\">" << text << "</text>";
  body_.push_back(os.str());
}

void SvgCanvas::add_axes(const std::string& x_label, const std::string& y_label) {
  std::ostringstream frame;
  frame << "<rect x=\"" << margin_ << "\" y=\"" << margin_ << "\" width=\""
        << width_ - 2 * margin_ << "\" height=\"" << height_ - 2 * margin_
        << "\" fill=\"none\" stroke=\"black\"/>";
  body_.push_back(frame.str());
  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    double fx = x_lo_ + (x_hi_ - x_lo_) * i / ticks;
    double fy = y_lo_ + (y_hi_ - y_lo_) * i / ticks;
    double px = map_x(fx), py = map_y(fy);
    std::ostringstream t1, t2;
    t1 << "<line x1=\"" << num(px) << "\" y1=\"" << height_ - margin_ << "\" x2=\""
       << num(px) << "\" y2=\"" << height_ - margin_ + 5 << "\" stroke=\"black\"/>";
    t2 << "<line x1=\"" << margin_ - 5 << "\" y1=\"" << num(py) << "\" x2=\"" << margin_
       << "\" y2=\"" << num(py) << "\" stroke=\"black\"/>";
    body_.push_back(t1.str());
    body_.push_back(t2.str());
    add_text(px - 12, height_ - margin_ + 20, num(fx), 11);
    add_text(4, py + 4, num(fy), 11);
  }
  add_text(width_ / 2.0 - 10, height_ - 8, x_label);
  add_text(8, margin_ - 12, y_label);
}

std::string SvgCanvas::finish() const {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
     << height_ << "\" viewBox=\"0 0 " << width_ << ' ' << height_ << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (auto& e : body_) os << e << '\n';
  os << "</svg>\n";
  return os.str();
}

std::string hopf_diagram_svg(const HopfScanResult& scan) {
  const auto& a1 = scan.axis1;
  const auto& a2 = scan.axis2;
  SvgCanvas canvas(a1.lo, a1.hi, a2.lo, a2.hi);
  double dx = (a1.hi - a1.lo) / std::max(1, a1.count - 1);
  double dy = (a2.hi - a2.lo) / std::max(1, a2.count - 1);
  for (auto& p : scan.grid) {
    std::string fill = "#bbbbbb";
    switch (p.cls) {
      case StabilityClass::Stable: fill = "#c9dff2"; break;
      case StabilityClass::Unstable: fill = "#f2cfc9"; break;
      case StabilityClass::HopfBoundary: fill = "#f5a623"; break;
      case StabilityClass::Degenerate: fill = "#e0e0e0"; break;
    }
    canvas.add_rect(p.p1 - dx / 2, p.p2 - dy / 2, p.p1 + dx / 2, p.p2 + dy / 2, fill);
  }
  std::vector<std::pair<double, double>> curve;
  for (auto& b : scan.boundary) curve.emplace_back(b.p1, b.p2);
  canvas.add_polyline(curve, "#e07b00", 2.0);
  for (auto& [x, y] : scan.degenerate_points) canvas.add_marker(x, y, "#1f5fd0", 5.0);
  canvas.add_axes(a1.name, a2.name);
  return canvas.finish();
}

std::string phase_portrait_svg(const Trajectory& traj, int cx, int cy,
                               const std::vector<std::string>& species,
                               const std::vector<const LimitCycleReport*>& cycles) {
  double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
  auto grow = [&](double x, double y) {
    x_lo = std::min(x_lo, x);
    x_hi = std::max(x_hi, x);
    y_lo = std::min(y_lo, y);
    y_hi = std::max(y_hi, y);
  };
  for (auto& s : traj.states) grow(s[cx], s[cy]);
  for (auto* c : cycles)
    for (auto& s : c->cycle_points) grow(s[cx], s[cy]);
  if (!(x_hi > x_lo)) x_hi = x_lo + 1;
  if (!(y_hi > y_lo)) y_hi = y_lo + 1;
  double padx = 0.05 * (x_hi - x_lo), pady = 0.05 * (y_hi - y_lo);
  SvgCanvas canvas(x_lo - padx, x_hi + padx, y_lo - pady, y_hi + pady);
  std::vector<std::pair<double, double>> pts;
  for (auto& s : traj.states) pts.emplace_back(s[cx], s[cy]);
  canvas.add_polyline(pts, "#777777", 1.0);
  const char* colors[] = {"#1f5fd0", "#d03b1f"};
  int ci = 0;
  for (auto* c : cycles) {
    std::vector<std::pair<double, double>> loop;
    for (auto& s : c->cycle_points) loop.emplace_back(s[cx], s[cy]);
    if (!loop.empty()) loop.push_back(loop.front());
    canvas.add_polyline(loop, colors[ci++ % 2], 2.0);
  }
  canvas.add_axes(species[cx], species[cy]);
  return canvas.finish();
}

}  // namespace crn
