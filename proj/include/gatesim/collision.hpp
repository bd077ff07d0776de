#pragma once

namespace gatesim {

// Single drone-to-link impact with the link initially at rest. The drone is a
// point mass; friction at the contact is zero.
struct ImpactInput {
  double drone_mass = 0.0;      // kg
  double speed_before = 0.0;    // m/s
  double approach_angle = 0.0;  // rad, drone heading relative to the rail axis
  double opening_angle = 0.0;   // rad, contacted segment relative to the rail axis
  double gate_inertia = 0.0;    // kg*m^2
  double restitution = 0.0;
  double lever_arm = 0.0;  // m, effective lever arm d'
};

// Velocities after the impact. `normal_velocity_after` is signed along the
// pre-impact approach normal: positive means the drone keeps moving into the
// link (it follows the opening link), negative means it rebounds.
// `tangential_velocity_after` is positive toward the rail.
struct CollisionResponse {
  double impulse = 0.0;                    // N*s
  double normal_velocity_after = 0.0;      // m/s
  double tangential_velocity_after = 0.0;  // m/s
  double gate_angular_velocity = 0.0;      // rad/s
};

// Consistent uses I + m d'^2 in the denominators. Printed reproduces the
// literal I + m d' form; it is dimensionally inconsistent and exists only for
// side-by-side comparison runs.
enum class FormulaMode { Consistent, Printed };

// Throws Error{InvalidInput} if a precondition fails.
void validate(const ImpactInput& input);

CollisionResponse resolve_impact(const ImpactInput& input,
                                 FormulaMode mode = FormulaMode::Consistent);

// Infinite-inertia limit (locked gate): v_v = -e v_n, omega = 0.
// `gate_inertia` and `lever_arm` are ignored.
CollisionResponse resolve_rigid_impact(const ImpactInput& input);

bool geometric_entry_feasible(double approach_angle, double opening_angle);

bool momentum_entry_feasible(double drone_mass, double lever_arm, double restitution,
                             double gate_inertia, FormulaMode mode = FormulaMode::Consistent);

// KE before minus KE after (drone translation plus gate rotation), J.
double energy_audit(const ImpactInput& input, const CollisionResponse& response);

}  // namespace gatesim
