#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gatesim/collision.hpp"
#include "gatesim/gate_geometry.hpp"
#include "gatesim/vec2.hpp"

namespace gatesim {

struct DroneSpec {
  double total_mass = 0.5018;
  double rod_length = 0.180;
  double tip_half_width = 0.005;  // contact radius of the tip structure
  double drive_force = 2.0;       // N, held along the approach heading
  double max_speed = 2.5;         // m/s

  bool operator==(const DroneSpec&) const = default;
};

void validate(const DroneSpec& drone);

struct DroneState {
  Vec2 tip_position;  // world frame
  Vec2 velocity;
  double heading = 0.0;
  double time = 0.0;
  double gate_angle = 0.0;  // mechanism coordinate, rad
};

enum class GateMode { Passive, Fixed };

std::string_view to_string(GateMode mode);
std::optional<GateMode> parse_gate_mode(std::string_view text);

// One entry trial. Positive approach_angle heads toward the right-hand link
// (world -y); lateral_offset is where the undisturbed straight path crosses
// the gate mouth plane x = 0.
struct Scenario {
  GateSpec gate;
  DroneSpec drone;
  double approach_speed = 1.0;
  double approach_angle = 0.0;
  double lateral_offset = 0.0;
  GateMode gate_mode = GateMode::Passive;
  double time_step = 1e-4;
  double timeout = 5.0;
  FormulaMode formula = FormulaMode::Consistent;
  bool record_trajectory = true;
  int record_stride = 1;
};

void validate(const Scenario& scenario);

enum class EntryResult { Success, BounceBack, Stall, Timeout };

std::string_view to_string(EntryResult result);

enum class Surface { RightLink, LeftLink, Frame };

std::string_view to_string(Surface surface);

struct CollisionRecord {
  double time = 0.0;
  Vec2 world_position;
  Vec2 link_position;  // body frame of the contacted link; world frame for the frame
  Surface surface = Surface::Frame;
  std::size_t segment_index = 0;
  bool rigid = false;  // resolved in the infinite-inertia limit
  ImpactInput input;
  CollisionResponse response;
};

struct EntryOutcome {
  EntryResult result = EntryResult::Timeout;
  std::optional<double> landing_time;
  std::vector<DroneState> trajectory;
  std::vector<CollisionRecord> collisions;
  double max_gate_deflection = 0.0;
  DroneState final_state;
  double final_gate_rate = 0.0;
};

// Impacts slower than this are treated as sustained (sliding) contact and are
// not recorded as collisions.
inline constexpr double kImpactSpeedThreshold = 0.02;  // m/s
inline constexpr double kStallSpeed = 1e-3;            // m/s
inline constexpr double kStallWindow = 0.5;            // s
inline constexpr double kStartBeforeMouth = 0.150;     // m upstream of x = 0

// Throws Error{NumericalDivergence} if the state stops being finite.
EntryOutcome run_entry(const Scenario& scenario);

// Same trial with the mechanism locked at zero deflection.
EntryOutcome run_entry_fixed(Scenario scenario);

// Rail-start crossing minus landing-start crossing, interpolated between
// recorded samples; none unless the outcome is a success.
std::optional<double> landing_time(const EntryOutcome& outcome);

// Time after a reference successful entry until the mechanism stays within
// `tolerance` of rest. None if the gate never settles (no restoring torque or
// no damping with a large residual swing) or the reference entry fails.
std::optional<double> gate_settling_time(const GateSpec& gate, const DroneSpec& drone,
                                         double tolerance = deg_to_rad(1.0),
                                         double horizon = 30.0);

// World-frame polylines of both links at mechanism coordinate `gate_angle`,
// plus the fixed frame segments. Used for plotting.
struct GateOutline {
  std::vector<Vec2> right_link;
  std::vector<Vec2> left_link;
  std::vector<std::pair<Vec2, Vec2>> frame;
};

GateOutline gate_outline(const GateSpec& gate, double gate_angle = 0.0);

std::string trajectory_csv(const EntryOutcome& outcome);
std::string collisions_csv(const EntryOutcome& outcome);

}  // namespace gatesim
