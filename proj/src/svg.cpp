#include "gatesim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string_view>

namespace gatesim {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 60.0;

class Svg {
 public:
  Svg() {
    s_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s_ += fmt("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
              "viewBox=\"0 0 %g %g\">\n",
              kWidth, kHeight, kWidth, kHeight);
    s_ += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2, std::string_view stroke, double w = 1.0) {
    s_ += fmt("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" "
              "stroke-width=\"%g\"/>\n",
              x1, y1, x2, y2, std::string(stroke).c_str(), w);
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, std::string_view stroke,
                double w = 1.5, std::string_view dash = "") {
    if (pts.empty()) return;
    s_ += "<polyline fill=\"none\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" +
          fmt("%g", w) + "\"";
    if (!dash.empty()) s_ += " stroke-dasharray=\"" + std::string(dash) + "\"";
    s_ += " points=\"";
    for (const auto& [x, y] : pts) s_ += fmt("%.2f,%.2f ", x, y);
    s_ += "\"/>\n";
  }

  void circle(double x, double y, double r, std::string_view fill) {
    s_ += fmt("<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%g\" fill=\"%s\"/>\n", x, y, r,
              std::string(fill).c_str());
  }

  void cross(double x, double y, double r, std::string_view stroke) {
    line(x - r, y - r, x + r, y + r, stroke, 1.5);
    line(x - r, y + r, x + r, y - r, stroke, 1.5);
  }

  void rect(double x, double y, double w, double h, std::string_view fill) {
    s_ += fmt("<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\"/>\n", x, y,
              w, h, std::string(fill).c_str());
  }

  void text(double x, double y, const std::string& t, std::string_view anchor = "middle",
            double rotate = 0.0) {
    s_ += fmt("<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"12\" "
              "text-anchor=\"%s\"",
              x, y, std::string(anchor).c_str());
    if (rotate != 0.0) s_ += fmt(" transform=\"rotate(%g %.2f %.2f)\"", rotate, x, y);
    s_ += ">" + escape(t) + "</text>\n";
  }

  std::string finish() { return s_ + "</svg>\n"; }

  template <class... A>
  static std::string fmt(const char* f, A... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
  }

 private:
  static std::string escape(const std::string& t) {
    std::string out;
    for (char c : t) {
      if (c == '<') out += "&lt;";
      else if (c == '>') out += "&gt;";
      else if (c == '&') out += "&amp;";
      else out += c;
    }
    return out;
  }

  std::string s_;
};

struct Axes {
  double x0, x1, y0, y1;
  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double py(double y) const {
    return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin);
  }
};

void draw_axes(Svg& svg, const Axes& ax, const std::string& xlabel, const std::string& ylabel,
               int xticks, int yticks) {
  svg.line(kMargin, kHeight - kMargin, kWidth - kMargin, kHeight - kMargin, "black");
  svg.line(kMargin, kMargin, kMargin, kHeight - kMargin, "black");
  for (int i = 0; i <= xticks; ++i) {
    const double v = ax.x0 + (ax.x1 - ax.x0) * i / xticks;
    const double x = ax.px(v);
    svg.line(x, kHeight - kMargin, x, kHeight - kMargin + 5, "black");
    svg.text(x, kHeight - kMargin + 18, Svg::fmt("%.3g", v));
  }
  for (int i = 0; i <= yticks; ++i) {
    const double v = ax.y0 + (ax.y1 - ax.y0) * i / yticks;
    const double y = ax.py(v);
    svg.line(kMargin - 5, y, kMargin, y, "black");
    svg.text(kMargin - 8, y + 4, Svg::fmt("%.3g", v), "end");
  }
  svg.text(0.5 * kWidth, kHeight - 15, xlabel);
  svg.text(18, 0.5 * kHeight, ylabel, "middle", -90);
}

}  // namespace

std::string trajectory_svg(const EntryOutcome& outcome, const GateSpec& gate) {
  const GateOutline rest = gate_outline(gate, 0.0);
  const GateOutline open = gate_outline(gate, outcome.max_gate_deflection);
  const double half = 0.5 * gate.entrance_width + 0.03;
  Axes ax{-0.2, 0.5, -half, half};
  // Equal scale on both axes.
  const double sx = (ax.x1 - ax.x0) / (kWidth - 2 * kMargin);
  const double sy = (ax.y1 - ax.y0) / (kHeight - 2 * kMargin);
  if (sy < sx) {
    const double grow = 0.5 * (sx * (kHeight - 2 * kMargin) - (ax.y1 - ax.y0));
    ax.y0 -= grow;
    ax.y1 += grow;
  } else {
    const double grow = 0.5 * (sy * (kWidth - 2 * kMargin) - (ax.x1 - ax.x0));
    ax.x0 -= grow;
    ax.x1 += grow;
  }

  Svg svg;
  draw_axes(svg, ax, "x (m)", "y (m)", 7, 6);
  const auto pts = [&](const std::vector<Vec2>& poly) {
    std::vector<std::pair<double, double>> out;
    for (const auto& p : poly) out.emplace_back(ax.px(p.x), ax.py(p.y));
    return out;
  };
  for (const auto& [a, b] : rest.frame) svg.line(ax.px(a.x), ax.py(a.y), ax.px(b.x), ax.py(b.y), "gray", 2);
  svg.polyline(pts(rest.right_link), "black", 2.5);
  svg.polyline(pts(rest.left_link), "black", 2.5);
  if (outcome.max_gate_deflection != 0.0) {
    svg.polyline(pts(open.right_link), "steelblue", 1.5, "4 3");
    svg.polyline(pts(open.left_link), "steelblue", 1.5, "4 3");
  }
  std::vector<Vec2> path;
  for (const auto& s : outcome.trajectory) path.push_back(s.tip_position);
  svg.polyline(pts(path), "crimson", 1.5);
  for (const auto& c : outcome.collisions)
    svg.circle(ax.px(c.world_position.x), ax.py(c.world_position.y), 3, "orange");
  svg.line(ax.px(kRailCaptureX), ax.py(-0.02), ax.px(kRailCaptureX), ax.py(0.02), "green", 2);
  std::string title = "result: " + std::string(to_string(outcome.result));
  if (outcome.landing_time) title += Svg::fmt(", landing time %.3f s", *outcome.landing_time);
  svg.text(0.5 * kWidth, 25, title);
  return svg.finish();
}

std::string envelope_svg(const EnvelopeMap& map) {
  const SweepPlan& p = map.plan;
  const double ds = std::max(p.speed.spacing(), 0.1);
  const double da = std::max(p.angle.spacing(), deg_to_rad(5.0));
  Axes ax{p.speed.min - 0.5 * ds, p.speed.max + 0.5 * ds, rad_to_deg(p.angle.min - 0.5 * da),
          rad_to_deg(p.angle.max + 0.5 * da)};
  Svg svg;
  draw_axes(svg, ax, "entering velocity (m/s)", "entering angle (deg)", 7, 6);
  const int n = std::max(1, p.trials_per_cell);
  for (const auto& t : map.trials) {
    // Spread the trials of one cell horizontally so they stay visible.
    const double frac = n == 1 ? 0.0 : (double(t.trial) / (n - 1) - 0.5);
    const double x = ax.px(t.speed + 0.35 * ds * frac);
    const double y = ax.py(rad_to_deg(t.angle));
    if (t.outcome == TrialOutcome::Success) svg.circle(x, y, 3, "seagreen");
    else svg.cross(x, y, 3, "crimson");
  }
  svg.circle(kWidth - kMargin - 120, 28, 3, "seagreen");
  svg.text(kWidth - kMargin - 110, 32, "success", "start");
  svg.cross(kWidth - kMargin - 50, 28, 3, "crimson");
  svg.text(kWidth - kMargin - 40, 32, "failure", "start");
  svg.text(kMargin, 32, "gate: " + std::string(to_string(map.mode)), "start");
  return svg.finish();
}

std::string failure_bins_svg(const FailureRateBins& bins) {
  const int np = std::max(1, bins.position_bins);
  Axes ax{0.0, np * bins.position_width, 0.0, 1.0};
  Svg svg;
  draw_axes(svg, ax, "first collision position (m)", "failure rate", np, 5);
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  const int na = std::max(1, bins.angle_bins);
  const double group = (ax.px(bins.position_width) - ax.px(0.0)) * 0.8;
  const double bar = group / na;
  for (int a = 0; a < bins.angle_bins; ++a) {
    for (int p = 0; p < bins.position_bins; ++p) {
      const auto& b = bins.at(a, p);
      if (b.empty) continue;
      const double x = ax.px(p * bins.position_width) + 0.1 * (group / 0.8) + a * bar;
      const double top = ax.py(b.rate);
      svg.rect(x, top, std::max(bar - 1.0, 0.5), ax.py(0.0) - top, palette[a % 10]);
    }
    const double ly = 20.0 + 14.0 * (a % 12);
    const double lx = kWidth - kMargin - 90 - 100 * (a / 12);
    svg.rect(lx, ly - 9, 10, 10, palette[a % 10]);
    svg.text(lx + 14, ly, Svg::fmt("%g-%g deg", rad_to_deg(a * bins.angle_width),
                                   rad_to_deg((a + 1) * bins.angle_width)),
             "start");
  }
  return svg.finish();
}

}  // namespace gatesim
