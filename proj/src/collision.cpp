#include "gatesim/collision.hpp"

#include <cmath>
#include <numbers>

#include "gatesim/error.hpp"

namespace gatesim {
namespace {

double coupling_term(double m, double d, FormulaMode mode) {
  return mode == FormulaMode::Consistent ? m * d * d : m * d;
}

}  // namespace

void validate(const ImpactInput& in) {
  const auto fail = [](const char* what) { throw Error(ErrorKind::InvalidInput, what); };
  if (!(in.drone_mass > 0.0)) fail("drone_mass must be > 0");
  if (!(in.speed_before >= 0.0) || !std::isfinite(in.speed_before)) fail("speed_before must be >= 0");
  if (!(in.gate_inertia > 0.0)) fail("gate_inertia must be > 0");
  if (!(in.restitution >= 0.0 && in.restitution <= 1.0)) fail("restitution must lie in [0, 1]");
  if (!(in.lever_arm >= 0.0) || !std::isfinite(in.lever_arm)) fail("lever_arm must be >= 0");
  const double sum = in.approach_angle + in.opening_angle;
  if (!(sum >= 0.0 && sum <= std::numbers::pi)) fail("approach + opening angle must lie in [0, pi]");
}

CollisionResponse resolve_impact(const ImpactInput& in, FormulaMode mode) {
  validate(in);
  const double m = in.drone_mass;
  const double inertia = in.gate_inertia;
  const double e = in.restitution;
  const double d = in.lever_arm;
  const double sum = in.approach_angle + in.opening_angle;
  const double v_n = in.speed_before * std::sin(sum);
  const double denom = inertia + coupling_term(m, d, mode);

  CollisionResponse r;
  r.impulse = m * (1.0 + e) * inertia / denom * v_n;
  r.normal_velocity_after = (1.0 - (1.0 + e) * inertia / denom) * v_n;
  r.tangential_velocity_after = in.speed_before * std::cos(sum);
  r.gate_angular_velocity = m * d * (1.0 + e) / denom * v_n;
  return r;
}

CollisionResponse resolve_rigid_impact(const ImpactInput& in) {
  ImpactInput checked = in;
  checked.gate_inertia = 1.0;
  checked.lever_arm = 0.0;
  validate(checked);
  const double sum = in.approach_angle + in.opening_angle;
  const double v_n = in.speed_before * std::sin(sum);
  CollisionResponse r;
  r.impulse = in.drone_mass * (1.0 + in.restitution) * v_n;
  r.normal_velocity_after = -in.restitution * v_n;
  r.tangential_velocity_after = in.speed_before * std::cos(sum);
  r.gate_angular_velocity = 0.0;
  return r;
}

bool geometric_entry_feasible(double approach_angle, double opening_angle) {
  return approach_angle + opening_angle < 0.5 * std::numbers::pi;
}

bool momentum_entry_feasible(double drone_mass, double lever_arm, double restitution,
                             double gate_inertia, FormulaMode mode) {
  return coupling_term(drone_mass, lever_arm, mode) > restitution * gate_inertia;
}

double energy_audit(const ImpactInput& in, const CollisionResponse& r) {
  const double m = in.drone_mass;
  const double before = 0.5 * m * in.speed_before * in.speed_before;
  const double after = 0.5 * m *
                           (r.normal_velocity_after * r.normal_velocity_after +
                            r.tangential_velocity_after * r.tangential_velocity_after) +
                       0.5 * in.gate_inertia * r.gate_angular_velocity * r.gate_angular_velocity;
  return before - after;
}

}  // namespace gatesim
