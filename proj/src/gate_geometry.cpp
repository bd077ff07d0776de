#include "gatesim/gate_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gatesim/error.hpp"

namespace gatesim {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidSpec, what);
}

double fillet_tangent_length(const GateSpec& spec) {
  return spec.joint_radius * std::tan(0.5 * spec.taper_angle);
}

double taper_length(const GateSpec& spec) {
  return 0.5 * (spec.entrance_width - spec.end_width) / std::sin(spec.taper_angle);
}

}  // namespace

void validate(const GateSpec& spec) {
  require(std::isfinite(spec.entrance_width) && std::isfinite(spec.end_width),
          "widths must be finite");
  require(spec.end_width > 0.0, "end_width must be > 0");
  require(spec.entrance_width > spec.end_width, "entrance_width must exceed end_width");
  require(spec.depth > 0.0, "depth must be > 0");
  require(spec.taper_angle > 0.0 && spec.taper_angle < 0.5 * std::numbers::pi,
          "taper_angle must lie in (0, pi/2)");
  require(spec.straight_length >= 0.0, "straight_length must be >= 0");
  require(spec.link_mass > 0.0, "link_mass must be > 0");
  require(spec.restitution >= 0.0 && spec.restitution <= 1.0, "restitution must lie in [0, 1]");
  require(spec.restoring_torque_coeff >= 0.0, "restoring_torque_coeff must be >= 0");
  require(spec.damping_coeff >= 0.0, "damping_coeff must be >= 0");
  require(spec.coupler_mass >= 0.0, "coupler_mass must be >= 0");
  require(spec.polyline_resolution >= 1, "polyline_resolution must be >= 1");
  require(std::abs(norm(spec.pivot_left - spec.pivot_right) - spec.entrance_width) <= kEpsGeom,
          "pivot separation must equal entrance_width");
  require(spec.joint_radius >= 0.0, "joint_radius must be >= 0");
  if (spec.joint_radius > 0.0) {
    const double t = fillet_tangent_length(spec);
    require(t <= taper_length(spec) && t <= spec.straight_length,
            "joint_radius too large for the taper/straight segments");
  }
  if (spec.inertia_override) {
    require(*spec.inertia_override > 0.0, "inertia_override must be > 0");
  }
}

SegmentProjection project_onto_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len_sq = norm_sq(ab);
  double t = 0.0;
  if (len_sq > 0.0) t = std::clamp(dot(p - a, ab) / len_sq, 0.0, 1.0);
  const Vec2 c = a + ab * t;
  return {c, norm(p - c), t};
}

double polyline_rod_inertia(const std::vector<Vec2>& polyline, double mass) {
  double total = 0.0;
  for (std::size_t i = 1; i < polyline.size(); ++i) total += norm(polyline[i] - polyline[i - 1]);
  if (total <= 0.0) return 0.0;
  const double density = mass / total;
  double inertia = 0.0;
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    const Vec2 a = polyline[i - 1];
    const Vec2 d = polyline[i] - a;
    const double len = norm(d);
    // integral over s in [0,1] of |a + s d|^2, times segment mass
    inertia += density * len * (norm_sq(a) + dot(a, d) + norm_sq(d) / 3.0);
  }
  return inertia;
}

LinkShape build_link_shape(const GateSpec& spec) {
  validate(spec);
  const double lateral = 0.5 * (spec.entrance_width - spec.end_width);
  const Vec2 taper_dir{std::cos(spec.taper_angle), std::sin(spec.taper_angle)};
  const Vec2 corner{lateral / std::tan(spec.taper_angle), lateral};

  LinkShape shape;
  shape.polyline.push_back({0.0, 0.0});
  if (spec.joint_radius > 0.0) {
    const double t = fillet_tangent_length(spec);
    const Vec2 start = corner - taper_dir * t;
    const Vec2 center = start + Vec2{std::sin(spec.taper_angle), -std::cos(spec.taper_angle)} *
                                    spec.joint_radius;
    shape.polyline.push_back(start);
    const int n = spec.polyline_resolution;
    for (int k = 1; k <= n; ++k) {
      const double alpha = 0.5 * std::numbers::pi + spec.taper_angle * (1.0 - double(k) / n);
      shape.polyline.push_back(center +
                               Vec2{std::cos(alpha), std::sin(alpha)} * spec.joint_radius);
    }
    const double rest = spec.straight_length - t;
    if (rest > 0.0) shape.polyline.push_back(shape.polyline.back() + Vec2{rest, 0.0});
  } else {
    shape.polyline.push_back(corner);
    if (spec.straight_length > 0.0) shape.polyline.push_back(corner + Vec2{spec.straight_length, 0.0});
  }

  // Lumped-mass slender rod: each segment split into `polyline_resolution`
  // equal elements with their mass at the element midpoint.
  double total_length = 0.0;
  for (std::size_t i = 1; i < shape.polyline.size(); ++i)
    total_length += norm(shape.polyline[i] - shape.polyline[i - 1]);
  const double density = spec.link_mass / total_length;
  const int n = spec.polyline_resolution;
  Vec2 first_moment{};
  double second_moment = 0.0;
  for (std::size_t i = 1; i < shape.polyline.size(); ++i) {
    const Vec2 a = shape.polyline[i - 1];
    const Vec2 d = shape.polyline[i] - a;
    const double dm = density * norm(d) / n;
    for (int k = 0; k < n; ++k) {
      const Vec2 p = a + d * ((k + 0.5) / n);
      first_moment += p * dm;
      second_moment += dm * norm_sq(p);
    }
  }
  shape.center_of_gravity = first_moment / spec.link_mass;
  shape.inertia_about_pivot = spec.inertia_override ? *spec.inertia_override : second_moment;
  return shape;
}

double mechanism_inertia(const GateSpec& spec, const LinkShape& link) {
  const Vec2 tip = link.polyline.back();
  return 2.0 * link.inertia_about_pivot + spec.coupler_mass * norm_sq(tip);
}

LeverBranch lever_arm_branch(const Vec2& cog, const Vec2& contact) {
  return (cog.x * contact.x + cog.y * contact.y <= cog.x * cog.x + cog.y * cog.y)
             ? LeverBranch::Minus
             : LeverBranch::Plus;
}

double effective_lever_arm(const Vec2& cog, const Vec2& contact) {
  const double gx = cog.x;
  const double gy = cog.y;
  const double g_sq = gx * gx + gy * gy;
  if (std::sqrt(g_sq) < kEpsGeom)
    throw Error(ErrorKind::DegenerateGeometry, "centre of gravity coincides with the pivot");
  const double d_g = std::sqrt(g_sq);
  // Distance from the CG to the foot of the perpendicular, taken along the
  // pivot-CG line directly rather than from two nearly equal squared lengths.
  const double d = std::abs(g_sq - (gx * contact.x + gy * contact.y)) / d_g;
  return lever_arm_branch(cog, contact) == LeverBranch::Minus ? d_g - d : d_g + d;
}

std::optional<ContactPoint> find_contact(const Vec2& tip, const LinkShape& link, double gate_angle,
                                         double tip_radius) {
  const Vec2 body_tip = rotate(tip, -gate_angle);
  std::optional<ContactPoint> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < link.polyline.size(); ++i) {
    const Vec2 a = link.polyline[i - 1];
    const Vec2 b = link.polyline[i];
    const auto proj = project_onto_segment(body_tip, a, b);
    // Ties (shared vertices) resolve to the lower segment index.
    if (proj.distance < best_dist - 1e-12) {
      best_dist = proj.distance;
      const Vec2 d = b - a;
      best = ContactPoint{proj.closest, std::atan2(d.y, d.x) + gate_angle, i - 1, proj.distance};
    }
  }
  if (!best || best_dist > tip_radius + kEpsContact) return std::nullopt;
  return best;
}

double link_end_x(const GateSpec& spec) {
  const double lateral = 0.5 * (spec.entrance_width - spec.end_width);
  return lateral / std::tan(spec.taper_angle) + spec.straight_length;
}

}  // namespace gatesim
