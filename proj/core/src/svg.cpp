#include "navflow/svg.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "navflow/errors.hpp"

namespace navflow {

namespace {

struct Frame {
  double xmin, ymin, scale;
  int height;

  double px(double x) const { return (x - xmin) * scale; }
  double py(double y) const { return height - (y - ymin) * scale; }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// {y : (y - c)^T M (y - c) = level} as an SVG ellipse.
std::string ellipse(const Frame& f, const SpdMatrix& m, const Vector& c, double level, const std::string& style) {
  const Vector& eig = m.eigenvalues();
  const Matrix& vec = m.eigenvectors();
  const double rx = std::sqrt(level / eig[0]) * f.scale;
  const double ry = std::sqrt(level / eig[1]) * f.scale;
  // SVG y axis points down, so the angle flips sign.
  const double angle = -std::atan2(vec(1, 0), vec(0, 0)) * 180.0 / std::numbers::pi;
  std::ostringstream s;
  s << "<ellipse cx=\"" << num(f.px(c[0])) << "\" cy=\"" << num(f.py(c[1])) << "\" rx=\"" << num(rx)
    << "\" ry=\"" << num(ry) << "\" transform=\"rotate(" << num(angle) << ' ' << num(f.px(c[0])) << ' '
    << num(f.py(c[1])) << ")\" " << style << "/>\n";
  return s.str();
}

}  // namespace

std::string render_svg(const World& w, const std::vector<PlotPath>& paths, const PlotOptions& options) {
  if (w.dimension() != 2) throw DimensionError("render_svg: only planar worlds can be plotted");
  const Workspace& ws = w.workspace();
  const Matrix& inv0 = ws.a0().inverse();
  const double hx = ws.r0() * std::sqrt(inv0(0, 0));
  const double hy = ws.r0() * std::sqrt(inv0(1, 1));
  const double pad = 0.04 * std::max(hx, hy);
  Frame f{ws.center()[0] - hx - pad, ws.center()[1] - hy - pad, 0.0, options.height};
  f.scale = std::min(options.width / (2.0 * (hx + pad)), options.height / (2.0 * (hy + pad)));

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
    << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << ellipse(f, ws.a0(), ws.center(), ws.r0() * ws.r0(), "fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"");

  // Level sets of f0 evenly spaced in sqrt(f0) up to the workspace boundary.
  const auto& p = w.potential();
  const double reach = std::max(hx, hy) + (p.target() - ws.center()).norm();
  for (int l = 1; l <= options.level_sets; ++l) {
    const double rad = reach * l / options.level_sets;
    s << ellipse(f, p.q(), p.target(), rad * rad * p.lambda_min(),
                 "fill=\"none\" stroke=\"#9ab\" stroke-width=\"0.6\" stroke-dasharray=\"3,3\"");
  }

  for (const auto& o : w.obstacles()) {
    s << ellipse(f, o.a(), o.center(), o.radius() * o.radius(),
                 "fill=\"#bbb\" stroke=\"#444\" stroke-width=\"1\"");
  }

  if (options.quiver && options.quiver_grid > 0) {
    const int g = options.quiver_grid;
    const double cell = 2.0 * std::max(hx, hy) / g;
    s << "<g stroke=\"#36c\" stroke-width=\"0.8\">\n";
    for (int i = 0; i < g; ++i) {
      for (int j = 0; j < g; ++j) {
        Vector x(2);
        x << ws.center()[0] - hx + (i + 0.5) * cell, ws.center()[1] - hy + (j + 0.5) * cell;
        if (!in_free_space(w, x)) continue;
        Vector v;
        try {
          v = dynamics_field(w, *options.quiver, x);
        } catch (const std::exception&) {
          continue;
        }
        if (!(v.norm() > 0.0) || !v.allFinite()) continue;
        const Vector tip = x + 0.4 * cell * v.normalized();
        s << "<line x1=\"" << num(f.px(x[0])) << "\" y1=\"" << num(f.py(x[1])) << "\" x2=\"" << num(f.px(tip[0]))
          << "\" y2=\"" << num(f.py(tip[1])) << "\"/>";
        s << "<circle cx=\"" << num(f.px(tip[0])) << "\" cy=\"" << num(f.py(tip[1]))
          << "\" r=\"1.2\" fill=\"#36c\"/>\n";
      }
    }
    s << "</g>\n";
  }

  for (const auto& path : paths) {
    if (path.states.empty()) continue;
    s << "<polyline fill=\"none\" stroke=\"#c60\" stroke-width=\"1.4\" points=\"";
    for (const auto& x : path.states) s << num(f.px(x[0])) << ',' << num(f.py(x[1])) << ' ';
    s << "\"/>\n";
    const Vector& a = path.states.front();
    s << "<circle cx=\"" << num(f.px(a[0])) << "\" cy=\"" << num(f.py(a[1])) << "\" r=\"3\" fill=\"#c60\"/>\n";
    if (path.failed) {
      const Vector& b = path.states.back();
      s << "<rect x=\"" << num(f.px(b[0]) - 4) << "\" y=\"" << num(f.py(b[1]) - 4)
        << "\" width=\"8\" height=\"8\" fill=\"red\"/>\n";
    }
  }

  const Vector& t = p.target();
  s << "<circle cx=\"" << num(f.px(t[0])) << "\" cy=\"" << num(f.py(t[1]))
    << "\" r=\"4\" fill=\"#2a2\" stroke=\"black\" stroke-width=\"0.8\"/>\n";
  s << "</svg>\n";
  return s.str();
}

}  // namespace navflow
