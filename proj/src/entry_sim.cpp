#include "gatesim/entry_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "gatesim/error.hpp"

namespace gatesim {
namespace {

constexpr double kFrameOverhang = 0.30;  // front frame extends this far past each pivot
constexpr double kChannelOverrun = 0.05;
// Flared mouth of the guide channel, so a deflected link hands the tip over
// without a square lip.
constexpr double kLeadInLength = 0.02;
constexpr double kLeadInFlare = 0.005;

struct LinkFrame {
  Vec2 origin;
  Vec2 ex;
  Vec2 ey;

  Vec2 to_link(const Vec2& w) const {
    const Vec2 d = w - origin;
    return {dot(d, ex), dot(d, ey)};
  }
  Vec2 to_world(const Vec2& l) const { return origin + ex * l.x + ey * l.y; }
  Vec2 dir_to_world(const Vec2& l) const { return ex * l.x + ey * l.y; }
};

LinkFrame make_link_frame(const GateSpec& g, bool right) {
  const Vec2 self = right ? g.pivot_right : g.pivot_left;
  const Vec2 other = right ? g.pivot_left : g.pivot_right;
  const Vec2 ey = (other - self) / norm(other - self);
  const Vec2 ex = right ? Vec2{ey.y, -ey.x} : Vec2{-ey.y, ey.x};
  return {self, ex, ey};
}

std::vector<std::pair<Vec2, Vec2>> frame_segments(const GateSpec& g) {
  const double half_mouth = 0.5 * g.entrance_width;
  const double half_end = 0.5 * g.end_width;
  const double x_end = link_end_x(g);
  const double lead = std::min(kLeadInLength, 0.5 * (kRailCaptureX - x_end));
  const double flare = std::min(kLeadInFlare * lead / kLeadInLength, half_mouth - half_end);
  std::vector<std::pair<Vec2, Vec2>> segs;
  // Right side first (y < 0), then its mirror image, in the same order.
  for (const double s : {-1.0, 1.0}) {
    segs.push_back(
        {{x_end + lead, s * half_end}, {kRailCaptureX + kChannelOverrun, s * half_end}});
    segs.push_back({{x_end, s * (half_end + flare)}, {x_end + lead, s * half_end}});
    segs.push_back({{x_end, s * (half_end + flare)}, {x_end, s * half_mouth}});
    segs.push_back({{0.0, s * half_mouth}, {x_end, s * half_mouth}});
    segs.push_back({{0.0, s * half_mouth}, {0.0, s * (half_mouth + kFrameOverhang)}});
  }
  return segs;
}

// Contact candidate in world terms.
struct Contact {
  Surface surface = Surface::Frame;
  double distance = 0.0;
  Vec2 closest;
  Vec2 normal;   // unit, from surface toward tip
  Vec2 tangent;  // unit, oriented toward the rail (outward for faces normal to it)
  double opening_angle = 0.0;
  std::size_t segment_index = 0;
  Vec2 link_position;
  // Passive links only: effective lever arm along `normal` and the sign that
  // maps an impulse on the tip into the link's opening direction.
  double lever = 0.0;
  double opening_sign = 0.0;
};

Vec2 orient_tangent(Vec2 t, const Vec2& at) {
  if (t.x < -1e-12 || (std::abs(t.x) <= 1e-12 && t.y * at.y < 0.0)) t = -t;
  return t;
}

Vec2 safe_normal(const Vec2& tip, const Vec2& closest, const Vec2& fallback) {
  const Vec2 d = tip - closest;
  const double n = norm(d);
  return n > 1e-12 ? d / n : fallback;
}

class EntrySimulator {
 public:
  explicit EntrySimulator(const Scenario& sc)
      : sc_(sc),
        shape_(build_link_shape(sc.gate)),
        inertia_(mechanism_inertia(sc.gate, shape_)),
        right_(make_link_frame(sc.gate, true)),
        left_(make_link_frame(sc.gate, false)),
        frame_(frame_segments(sc.gate)),
        passive_(sc.gate_mode == GateMode::Passive) {}

  EntryOutcome run();

 private:
  void collect_contacts(const Vec2& tip, std::vector<Contact>& out) const;
  void add_link_contact(const Vec2& tip, bool right, std::vector<Contact>& out) const;
  // Returns true if an impulse was applied.
  bool apply_impulse(const Contact& c, double restitution, bool record, double time,
                     EntryOutcome& outcome);
  double opening_of(bool right) const { return right ? phi_ : -phi_; }

  Scenario sc_;
  LinkShape shape_;
  double inertia_;
  LinkFrame right_;
  LinkFrame left_;
  std::vector<std::pair<Vec2, Vec2>> frame_;
  bool passive_;

  Vec2 tip_;
  Vec2 vel_;
  double phi_ = 0.0;
  double omega_ = 0.0;
};

void EntrySimulator::add_link_contact(const Vec2& tip, bool right,
                                      std::vector<Contact>& out) const {
  const LinkFrame& f = right ? right_ : left_;
  const double opening = opening_of(right);
  const double gate_angle = -opening;  // opening turns the link clockwise in its frame
  const auto cp = find_contact(f.to_link(tip), shape_, gate_angle, sc_.drone.tip_half_width);
  if (!cp) return;
  const Vec2 a = shape_.polyline[cp->segment_index];
  const Vec2 b = shape_.polyline[cp->segment_index + 1];
  const Vec2 seg_link = rotate(b - a, gate_angle);
  const Vec2 seg_world = f.dir_to_world(seg_link) / norm(seg_link);
  const Vec2 interior = f.dir_to_world(Vec2{-seg_link.y, seg_link.x} / norm(seg_link));
  const Vec2 closest = f.to_world(rotate(cp->position, gate_angle));

  Contact c;
  c.surface = right ? Surface::RightLink : Surface::LeftLink;
  c.distance = cp->distance;
  c.closest = closest;
  c.normal = safe_normal(tip, closest, interior);
  c.tangent = orient_tangent(seg_world, closest);
  c.opening_angle = cp->local_opening_angle;
  c.segment_index = cp->segment_index;
  c.link_position = cp->position;
  if (passive_) {
    const double side = dot(c.normal, interior);
    const double d_eff = std::max(0.0, effective_lever_arm(shape_.center_of_gravity, cp->position));
    c.lever = d_eff * std::abs(side);
    c.opening_sign = side >= 0.0 ? 1.0 : -1.0;
  }
  out.push_back(c);
}

void EntrySimulator::collect_contacts(const Vec2& tip, std::vector<Contact>& out) const {
  out.clear();
  add_link_contact(tip, true, out);
  add_link_contact(tip, false, out);
  const double band = sc_.drone.tip_half_width + kEpsContact;
  for (std::size_t i = 0; i < frame_.size(); ++i) {
    const auto& [a, b] = frame_[i];
    const auto proj = project_onto_segment(tip, a, b);
    if (proj.distance > band) continue;
    const Vec2 seg = (b - a) / norm(b - a);
    Contact c;
    c.surface = Surface::Frame;
    c.distance = proj.distance;
    c.closest = proj.closest;
    const Vec2 fallback = Vec2{-seg.y, seg.x} * (tip.y >= 0.0 ? -1.0 : 1.0);
    c.normal = safe_normal(tip, proj.closest, fallback);
    c.tangent = orient_tangent(seg, proj.closest);
    c.opening_angle = std::atan2(std::abs(seg.y), std::abs(seg.x));
    c.segment_index = i;
    c.link_position = proj.closest;
    out.push_back(c);
  }
  // Deepest first; the stable sort keeps the fixed surface order on ties.
  std::stable_sort(out.begin(), out.end(),
                   [](const Contact& l, const Contact& r) { return l.distance < r.distance; });
}

bool EntrySimulator::apply_impulse(const Contact& c, double restitution, bool record, double time,
                                    EntryOutcome& outcome) {
  const bool link = c.surface != Surface::Frame;
  const bool movable = link && passive_;
  const bool right = c.surface == Surface::RightLink;
  const double opening_rate = movable ? (right ? omega_ : -omega_) : 0.0;
  const double surface_speed = -opening_rate * c.lever * c.opening_sign;  // along normal
  const double approach = -(dot(vel_, c.normal) - surface_speed);
  if (approach <= 0.0) return false;
  const double tangential = dot(vel_, c.tangent);

  ImpactInput in;
  in.drone_mass = sc_.drone.total_mass;
  in.speed_before = std::hypot(approach, tangential);
  const double incidence = std::atan2(approach, tangential);
  in.opening_angle = c.opening_angle;
  in.approach_angle = incidence - c.opening_angle;
  in.gate_inertia = inertia_;
  in.restitution = restitution;
  in.lever_arm = movable ? c.lever : 0.0;

  const CollisionResponse resp =
      movable ? resolve_impact(in, sc_.formula) : resolve_rigid_impact(in);
  vel_ += c.normal * (approach - resp.normal_velocity_after);
  if (movable) {
    const double d_opening = resp.gate_angular_velocity * c.opening_sign;
    omega_ += right ? d_opening : -d_opening;
  }
  if (record) {
    CollisionRecord rec;
    rec.time = time;
    rec.world_position = c.closest;
    rec.link_position = c.link_position;
    rec.surface = c.surface;
    rec.segment_index = c.segment_index;
    rec.rigid = !movable;
    rec.input = in;
    rec.response = resp;
    outcome.collisions.push_back(rec);
  }
  return true;
}

EntryOutcome EntrySimulator::run() {
  const double dt = sc_.time_step;
  const double heading = sc_.approach_angle;
  const Vec2 drive_dir{std::cos(heading), -std::sin(heading)};
  const double accel = sc_.drone.drive_force / sc_.drone.total_mass;
  const double speed_cap = sc_.approach_speed;
  const double k = sc_.gate.restoring_torque_coeff;
  const double damping = sc_.gate.damping_coeff;
  const double stop = sc_.gate.taper_angle;
  const double radius = sc_.drone.tip_half_width;
  const double e = sc_.gate.restitution;

  const double x0 = -kStartBeforeMouth;
  tip_ = {x0, sc_.lateral_offset - x0 * std::tan(heading)};
  vel_ = drive_dir * sc_.approach_speed;
  phi_ = 0.0;
  omega_ = 0.0;

  EntryOutcome out;
  const auto steps_total = static_cast<long long>(std::ceil(sc_.timeout / dt - 1e-9));
  if (sc_.record_trajectory) out.trajectory.reserve(std::min<long long>(steps_total + 2, 20000));

  auto snapshot = [&](double t) { return DroneState{tip_, vel_, heading, t, phi_}; };
  if (sc_.record_trajectory) out.trajectory.push_back(snapshot(0.0));

  std::vector<Contact> contacts;
  contacts.reserve(8);
  bool entered = false;
  double stall_time = 0.0;
  std::optional<double> t_start;
  double t = 0.0;
  long long step = 0;
  bool done = false;

  while (!done) {
    const Vec2 prev_tip = tip_;
    const double t_prev = t;

    // Forces.
    vel_ += drive_dir * (accel * dt);
    const double speed = norm(vel_);
    if (speed > speed_cap) vel_ = speed_cap > 0.0 ? vel_ * (speed_cap / speed) : Vec2{};
    if (passive_) omega_ += (-k * phi_ - damping * omega_) / inertia_ * dt;

    // Contacts at the current configuration.
    collect_contacts(tip_, contacts);
    for (std::size_t i = 0; i < contacts.size(); ++i) {
      const Contact& c = contacts[i];
      if (c.distance < radius) tip_ = c.closest + c.normal * radius;
      if (i == 0) {
        const double opening_rate =
            (c.surface != Surface::Frame && passive_)
                ? (c.surface == Surface::RightLink ? omega_ : -omega_)
                : 0.0;
        const double approach =
            -(dot(vel_, c.normal) + opening_rate * c.lever * c.opening_sign);
        const bool impact = approach > kImpactSpeedThreshold;
        apply_impulse(c, impact ? e : 0.0, impact, t, out);
      } else {
        apply_impulse(c, 0.0, false, t, out);
      }
    }

    // Integrate.
    tip_ += vel_ * dt;
    if (passive_) {
      phi_ += omega_ * dt;
      if (phi_ > stop) {
        phi_ = stop;
        omega_ = std::min(omega_, 0.0);
      } else if (phi_ < -stop) {
        phi_ = -stop;
        omega_ = std::max(omega_, 0.0);
      }
    }
    ++step;
    t = step * dt;
    out.max_gate_deflection = std::max(out.max_gate_deflection, std::abs(phi_));

    if (!is_finite(tip_) || !is_finite(vel_) || !std::isfinite(phi_) || !std::isfinite(omega_)) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "non-finite state at t = %.6f s", t);
      throw Error(ErrorKind::NumericalDivergence, buf);
    }

    if (!t_start && prev_tip.x < kLandingStartX && tip_.x >= kLandingStartX)
      t_start = t_prev + (kLandingStartX - prev_tip.x) / (tip_.x - prev_tip.x) * dt;
    if (tip_.x >= 0.0) entered = true;

    const bool record_now =
        sc_.record_trajectory && (step % std::max(1, sc_.record_stride) == 0);

    if (prev_tip.x < kRailCaptureX && tip_.x >= kRailCaptureX) {
      out.result = EntryResult::Success;
      if (t_start) {
        const double t_end = t_prev + (kRailCaptureX - prev_tip.x) / (tip_.x - prev_tip.x) * dt;
        out.landing_time = t_end - *t_start;
      }
      done = true;
    } else if (entered && tip_.x < 0.0 && vel_.x < 0.0) {
      out.result = EntryResult::BounceBack;
      done = true;
    } else {
      if (!contacts.empty() && norm(vel_) < kStallSpeed) {
        stall_time += dt;
      } else {
        stall_time = 0.0;
      }
      if (stall_time >= kStallWindow - 1e-12) {
        out.result = EntryResult::Stall;
        done = true;
      } else if (step >= steps_total) {
        out.result = EntryResult::Timeout;
        done = true;
      }
    }
    if (sc_.record_trajectory && (record_now || done)) out.trajectory.push_back(snapshot(t));
  }
  out.final_state = snapshot(t);
  out.final_gate_rate = omega_;
  return out;
}

double interpolate_crossing(const DroneState& a, const DroneState& b, double x) {
  return a.time + (x - a.tip_position.x) / (b.tip_position.x - a.tip_position.x) * (b.time - a.time);
}

}  // namespace

std::string_view to_string(GateMode mode) {
  return mode == GateMode::Passive ? "passive" : "fixed";
}

std::optional<GateMode> parse_gate_mode(std::string_view text) {
  if (text == "passive") return GateMode::Passive;
  if (text == "fixed") return GateMode::Fixed;
  return std::nullopt;
}

std::string_view to_string(EntryResult result) {
  switch (result) {
    case EntryResult::Success: return "Success";
    case EntryResult::BounceBack: return "BounceBack";
    case EntryResult::Stall: return "Stall";
    case EntryResult::Timeout: return "Timeout";
  }
  return "?";
}

std::string_view to_string(Surface surface) {
  switch (surface) {
    case Surface::RightLink: return "right_link";
    case Surface::LeftLink: return "left_link";
    case Surface::Frame: return "frame";
  }
  return "?";
}

void validate(const DroneSpec& d) {
  const auto fail = [](const char* what) { throw Error(ErrorKind::InvalidSpec, what); };
  if (!(d.total_mass > 0.0)) fail("drone total_mass must be > 0");
  if (!(d.rod_length >= 0.0)) fail("drone rod_length must be >= 0");
  if (!(d.tip_half_width >= 0.0)) fail("drone tip_half_width must be >= 0");
  if (!(d.drive_force >= 0.0)) fail("drone drive_force must be >= 0");
  if (!(d.max_speed > 0.0)) fail("drone max_speed must be > 0");
}

void validate(const Scenario& sc) {
  validate(sc.gate);
  validate(sc.drone);
  const auto fail = [](const char* what) { throw Error(ErrorKind::InvalidSpec, what); };
  if (!(sc.approach_speed >= 0.0)) fail("approach_speed must be >= 0");
  if (sc.approach_speed > sc.drone.max_speed + 1e-6) fail("approach_speed exceeds drone max_speed");
  if (!(std::abs(sc.approach_angle) < 0.5 * std::numbers::pi))
    fail("approach_angle must lie in (-pi/2, pi/2)");
  if (!std::isfinite(sc.lateral_offset)) fail("lateral_offset must be finite");
  if (!(sc.time_step > 0.0 && sc.time_step <= 1e-3)) fail("time_step must lie in (0, 1e-3]");
  if (!(sc.timeout > 0.0)) fail("timeout must be > 0");
  if (sc.record_stride < 1) fail("record_stride must be >= 1");
  const double half = 0.5 * sc.gate.entrance_width;
  if (std::abs(sc.gate.pivot_right.x) > kEpsGeom || std::abs(sc.gate.pivot_left.x) > kEpsGeom ||
      std::abs(sc.gate.pivot_right.y + half) > kEpsGeom ||
      std::abs(sc.gate.pivot_left.y - half) > kEpsGeom)
    fail("simulation requires pivots at (0, -w/2) and (0, +w/2)");
  if (link_end_x(sc.gate) >= kRailCaptureX)
    throw Error(ErrorKind::InfeasibleGeometry, "link extends past the rail start");
  if (sc.drone.tip_half_width >= 0.5 * sc.gate.end_width)
    throw Error(ErrorKind::InfeasibleGeometry, "tip does not fit the guide channel");
}

EntryOutcome run_entry(const Scenario& scenario) {
  validate(scenario);
  EntrySimulator sim(scenario);
  return sim.run();
}

EntryOutcome run_entry_fixed(Scenario scenario) {
  scenario.gate_mode = GateMode::Fixed;
  return run_entry(scenario);
}

std::optional<double> landing_time(const EntryOutcome& outcome) {
  if (outcome.result != EntryResult::Success) return std::nullopt;
  const auto& tr = outcome.trajectory;
  if (tr.size() < 2) return outcome.landing_time;
  std::optional<double> t_start;
  for (std::size_t i = 1; i < tr.size(); ++i) {
    const double xa = tr[i - 1].tip_position.x;
    const double xb = tr[i].tip_position.x;
    if (!t_start && xa < kLandingStartX && xb >= kLandingStartX)
      t_start = interpolate_crossing(tr[i - 1], tr[i], kLandingStartX);
    if (xa < kRailCaptureX && xb >= kRailCaptureX) {
      if (!t_start) return std::nullopt;
      return interpolate_crossing(tr[i - 1], tr[i], kRailCaptureX) - *t_start;
    }
  }
  return std::nullopt;
}

std::optional<double> gate_settling_time(const GateSpec& gate, const DroneSpec& drone,
                                         double tolerance, double horizon) {
  Scenario sc;
  sc.gate = gate;
  sc.drone = drone;
  sc.approach_speed = 1.0;
  sc.approach_angle = deg_to_rad(20.0);
  sc.lateral_offset = 0.0;
  sc.record_trajectory = false;
  const EntryOutcome out = run_entry(sc);
  if (out.result != EntryResult::Success) return std::nullopt;

  // Free swing of the mechanism after the drone has left it.
  const LinkShape shape = build_link_shape(gate);
  const double inertia = mechanism_inertia(gate, shape);
  const double k = gate.restoring_torque_coeff;
  const double c = gate.damping_coeff;
  const double stop = gate.taper_angle;
  double phi = out.final_state.gate_angle;
  double omega = out.final_gate_rate;
  const double dt = sc.time_step;
  // Settled once the swing amplitude bound sqrt(phi^2 + I omega^2 / k) is
  // within tolerance; without damping this bound never shrinks.
  const auto amplitude = [&] {
    return k > 0.0 ? std::sqrt(phi * phi + inertia * omega * omega / k) : std::abs(phi);
  };
  if (k <= 0.0) return std::abs(phi) <= tolerance && omega == 0.0 ? std::optional(0.0) : std::nullopt;
  double t = 0.0;
  while (amplitude() > tolerance) {
    if (t > horizon) return std::nullopt;
    omega += (-k * phi - c * omega) / inertia * dt;
    phi += omega * dt;
    if (phi > stop) {
      phi = stop;
      omega = std::min(omega, 0.0);
    } else if (phi < -stop) {
      phi = -stop;
      omega = std::max(omega, 0.0);
    }
    t += dt;
  }
  return t;
}

GateOutline gate_outline(const GateSpec& gate, double gate_angle) {
  const LinkShape shape = build_link_shape(gate);
  GateOutline o;
  for (const bool right : {true, false}) {
    const LinkFrame f = make_link_frame(gate, right);
    const double opening = right ? gate_angle : -gate_angle;
    auto& dst = right ? o.right_link : o.left_link;
    for (const Vec2& p : shape.polyline) dst.push_back(f.to_world(rotate(p, -opening)));
  }
  o.frame = frame_segments(gate);
  return o;
}

std::string trajectory_csv(const EntryOutcome& outcome) {
  std::string s = "t_s,x_m,y_m,vx_mps,vy_mps,gate_angle_rad\n";
  char buf[192];
  for (const auto& st : outcome.trajectory) {
    std::snprintf(buf, sizeof buf, "%.6f,%.9g,%.9g,%.9g,%.9g,%.9g\n", st.time, st.tip_position.x,
                  st.tip_position.y, st.velocity.x, st.velocity.y, st.gate_angle);
    s += buf;
  }
  return s;
}

std::string collisions_csv(const EntryOutcome& outcome) {
  std::string s =
      "t_s,surface,segment,x_m,y_m,link_x_m,link_y_m,speed_mps,approach_angle_rad,"
      "opening_angle_rad,lever_arm_m,impulse_Ns,v_normal_after_mps,v_tangential_after_mps,"
      "gate_rate_radps\n";
  char buf[384];
  for (const auto& c : outcome.collisions) {
    std::snprintf(buf, sizeof buf, "%.6f,%s,%zu,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                  c.time, std::string(to_string(c.surface)).c_str(), c.segment_index,
                  c.world_position.x, c.world_position.y, c.link_position.x, c.link_position.y,
                  c.input.speed_before, c.input.approach_angle, c.input.opening_angle,
                  c.input.lever_arm, c.response.impulse, c.response.normal_velocity_after,
                  c.response.tangential_velocity_after, c.response.gate_angular_velocity);
    s += buf;
  }
  return s;
}

}  // namespace gatesim
