#pragma once

#include <cstddef>
#include <numbers>
#include <optional>
#include <vector>

#include "gatesim/vec2.hpp"

namespace gatesim {

inline constexpr double kEpsGeom = 1e-9;     // m, degeneracy threshold
inline constexpr double kEpsContact = 1e-4;  // m, contact detection slack
inline constexpr double kRailCaptureX = 0.410;  // where the rigid rail starts
inline constexpr double kLandingStartX = -0.100;

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Geometry and inertia of the two-link entry gate. World frame: origin on the
// gate mouth centreline, +x toward the rail, pivots on the mouth plane x = 0.
struct GateSpec {
  double entrance_width = 0.270;
  double end_width = 0.030;
  double depth = 0.280;
  double taper_angle = deg_to_rad(45.0);
  double straight_length = 0.050;
  double link_mass = 0.120;
  double restitution = 0.3;
  double restoring_torque_coeff = 50.0;  // N*m/rad
  double damping_coeff = 1.0;            // N*m*s/rad, slider friction
  double coupler_mass = 0.0;             // connecting member, lumped at the link ends
  double joint_radius = 0.0;             // fillet between taper and straight part
  std::optional<double> inertia_override;  // per-link inertia about the pivot
  Vec2 pivot_left{0.0, 0.135};
  Vec2 pivot_right{0.0, -0.135};
  int polyline_resolution = 32;

  bool operator==(const GateSpec&) const = default;
};

// Throws Error{InvalidSpec} naming the first violated invariant.
void validate(const GateSpec& spec);

// One link in its pivot frame: origin at the pivot, +x toward the rail,
// +y toward the opposite pivot.
struct LinkShape {
  std::vector<Vec2> polyline;
  Vec2 center_of_gravity;
  double inertia_about_pivot = 0.0;
};

struct ContactPoint {
  Vec2 position;                    // link (body) frame
  double local_opening_angle = 0.0;  // segment angle to the rail axis, rad
  std::size_t segment_index = 0;
  double distance = 0.0;  // tip to nearest point, m
};

LinkShape build_link_shape(const GateSpec& spec);

// Reference slender-rod inertia of a polyline about the origin, integrated
// segment by segment in closed form (no discretisation). Used to cross-check
// the lumped-mass result.
double polyline_rod_inertia(const std::vector<Vec2>& polyline, double mass);

// Inertia of the coupled one-DOF mechanism: both links plus the connecting
// member.
double mechanism_inertia(const GateSpec& spec, const LinkShape& link);

enum class LeverBranch { Minus, Plus };

// Which case of the two-case lever-arm formula applies: Minus when
// G.P <= |G|^2, Plus otherwise.
LeverBranch lever_arm_branch(const Vec2& cog, const Vec2& contact);

// Distance from the pivot to the foot of the perpendicular dropped from the
// contact point onto the pivot-to-CG line, evaluated as d_G -/+ d.
double effective_lever_arm(const Vec2& cog, const Vec2& contact);

// `tip` is expressed in the ground-fixed pivot frame; `gate_angle` is the
// link's counter-clockwise rotation in that frame. The returned position is in
// the link body frame. `tip_radius` widens the contact band for a round tip.
std::optional<ContactPoint> find_contact(const Vec2& tip, const LinkShape& link, double gate_angle,
                                         double tip_radius = 0.0);

struct SegmentProjection {
  Vec2 closest;
  double distance = 0.0;
  double param = 0.0;  // 0 at a, 1 at b
};

SegmentProjection project_onto_segment(const Vec2& p, const Vec2& a, const Vec2& b);

// x coordinate of the link tip at rest; the fixed guide channel starts here.
double link_end_x(const GateSpec& spec);

}  // namespace gatesim
