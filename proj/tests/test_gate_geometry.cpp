#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gatesim/error.hpp"
#include "gatesim/gate_geometry.hpp"

using namespace gatesim;

namespace {

// Slender uniform rod from a to b: centroidal inertia plus parallel axis.
double rod_about_origin(Vec2 a, Vec2 b, double mass) {
  const double len = norm(b - a);
  const Vec2 mid = (a + b) * 0.5;
  return mass * len * len / 12.0 + mass * norm_sq(mid);
}

Vec2 normalize(Vec2 v) { return v / norm(v); }

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(GateSpec, DocumentedDefaults) {
  GateSpec g;
  EXPECT_DOUBLE_EQ(g.entrance_width, 0.270);
  EXPECT_DOUBLE_EQ(g.end_width, 0.030);
  EXPECT_DOUBLE_EQ(g.depth, 0.280);
  EXPECT_DOUBLE_EQ(g.taper_angle, deg_to_rad(45.0));
  EXPECT_DOUBLE_EQ(g.link_mass, 0.120);
  EXPECT_NO_THROW(validate(g));
  EXPECT_NEAR(norm(g.pivot_left - g.pivot_right), g.entrance_width, 1e-15);
}

TEST(GateSpec, InvariantsRejected) {
  const auto bad = [](auto mutate) {
    GateSpec g;
    mutate(g);
    try {
      validate(g);
    } catch (const Error& e) {
      return e.kind() == ErrorKind::InvalidSpec;
    }
    return false;
  };
  EXPECT_TRUE(bad([](GateSpec& g) { g.end_width = g.entrance_width; }));
  EXPECT_TRUE(bad([](GateSpec& g) { g.end_width = 0.0; }));
  EXPECT_TRUE(bad([](GateSpec& g) { g.depth = 0.0; }));
  EXPECT_TRUE(bad([](GateSpec& g) { g.taper_angle = 0.0; }));
  EXPECT_TRUE(bad([](GateSpec& g) { g.taper_angle = deg_to_rad(90.0); }));
  EXPECT_TRUE(bad([](GateSpec& g) { g.straight_length = -0.01; }));
  EXPECT_TRUE(bad([](GateSpec& g) { g.link_mass = 0.0; }));
  EXPECT_TRUE(bad([](GateSpec& g) { g.restitution = 1.1; }));
  EXPECT_TRUE(bad([](GateSpec& g) { g.restitution = -0.1; }));
  EXPECT_TRUE(bad([](GateSpec& g) { g.pivot_left = {0.0, 0.2}; }));
  EXPECT_TRUE(bad([](GateSpec& g) { g.polyline_resolution = 0; }));
}

TEST(BuildLinkShape, DefaultNarrowing) {
  GateSpec g;
  const LinkShape s = build_link_shape(g);
  ASSERT_EQ(s.polyline.size(), 3u);
  EXPECT_EQ(s.polyline.front(), (Vec2{0.0, 0.0}));
  // Each link takes up half of the 0.270 - 0.030 narrowing.
  const double lateral = 0.5 * (0.270 - 0.030);
  EXPECT_NEAR(s.polyline[1].y, lateral, 1e-12);
  EXPECT_NEAR(s.polyline[1].x, lateral / std::tan(deg_to_rad(45.0)), 1e-12);
  EXPECT_NEAR(s.polyline[2].x - s.polyline[1].x, g.straight_length, 1e-12);
  EXPECT_NEAR(s.polyline[2].y, lateral, 1e-12);
  // Both links together close the mouth down to the end width.
  EXPECT_NEAR(g.entrance_width - 2.0 * s.polyline.back().y, g.end_width, 1e-12);
}

TEST(BuildLinkShape, CogInsideBoundingBox) {
  for (double straight : {0.0, 0.05, 0.2})
    for (double taper : {20.0, 45.0, 70.0}) {
      GateSpec g;
      g.straight_length = straight;
      g.taper_angle = deg_to_rad(taper);
      const LinkShape s = build_link_shape(g);
      double xmin = 1e9, xmax = -1e9, ymin = 1e9, ymax = -1e9;
      for (const auto& p : s.polyline) {
        xmin = std::min(xmin, p.x), xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y), ymax = std::max(ymax, p.y);
      }
      EXPECT_GE(s.center_of_gravity.x, xmin);
      EXPECT_LE(s.center_of_gravity.x, xmax);
      EXPECT_GE(s.center_of_gravity.y, ymin);
      EXPECT_LE(s.center_of_gravity.y, ymax);
      EXPECT_GT(s.inertia_about_pivot, 0.0);
    }
}

TEST(BuildLinkShape, SlenderRodLimit) {
  // With no straight part the link is one straight rod pivoted at its end.
  GateSpec g;
  g.straight_length = 0.0;
  g.polyline_resolution = 512;
  const LinkShape s = build_link_shape(g);
  ASSERT_EQ(s.polyline.size(), 2u);
  const double len = norm(s.polyline[1] - s.polyline[0]);
  const double expect = g.link_mass * len * len / 3.0;
  EXPECT_LT(rel(s.inertia_about_pivot, expect), 1e-3);
  EXPECT_NEAR(polyline_rod_inertia(s.polyline, g.link_mass), expect, 1e-15);
}

TEST(BuildLinkShape, ZeroStraightLengthMatchesOffsetAxisRod) {
  GateSpec g;
  g.straight_length = 0.0;
  const LinkShape s = build_link_shape(g);
  const double oracle = rod_about_origin(s.polyline[0], s.polyline[1], g.link_mass);
  EXPECT_LT(rel(s.inertia_about_pivot, oracle), 1e-3);
  EXPECT_LT(rel(polyline_rod_inertia(s.polyline, g.link_mass), oracle), 1e-12);
}

TEST(BuildLinkShape, TwoSegmentInertiaMatchesClosedForm) {
  GateSpec g;
  const LinkShape s = build_link_shape(g);
  const double l1 = norm(s.polyline[1] - s.polyline[0]);
  const double l2 = norm(s.polyline[2] - s.polyline[1]);
  const double m1 = g.link_mass * l1 / (l1 + l2);
  const double oracle = rod_about_origin(s.polyline[0], s.polyline[1], m1) +
                        rod_about_origin(s.polyline[1], s.polyline[2], g.link_mass - m1);
  EXPECT_LT(rel(polyline_rod_inertia(s.polyline, g.link_mass), oracle), 1e-12);
  EXPECT_LT(rel(s.inertia_about_pivot, oracle), 1e-3);
}

TEST(BuildLinkShape, InertiaConvergesMonotonically) {
  GateSpec g;
  double prev_err = std::numeric_limits<double>::infinity();
  double prev = 0.0;
  const double exact = polyline_rod_inertia(build_link_shape(g).polyline, g.link_mass);
  for (int res = 1; res <= 1024; res *= 2) {
    g.polyline_resolution = res;
    const double I = build_link_shape(g).inertia_about_pivot;
    const double err = std::abs(I - exact);
    EXPECT_LE(err, prev_err) << "resolution " << res;
    if (res == 64) {
      // Default resolution is 32: its step to the next doubling.
      EXPECT_LT(rel(I, prev), 1e-3);
    }
    prev_err = err;
    prev = I;
  }
}

TEST(BuildLinkShape, InertiaOverride) {
  GateSpec g;
  g.inertia_override = 0.0042;
  EXPECT_DOUBLE_EQ(build_link_shape(g).inertia_about_pivot, 0.0042);
}

TEST(BuildLinkShape, FilletPolylineStaysOnLink) {
  GateSpec g;
  g.joint_radius = 0.02;
  g.polyline_resolution = 16;
  const LinkShape s = build_link_shape(g);
  EXPECT_GT(s.polyline.size(), 3u);
  EXPECT_EQ(s.polyline.front(), (Vec2{0.0, 0.0}));
  const double lateral = 0.5 * (g.entrance_width - g.end_width);
  EXPECT_NEAR(s.polyline.back().y, lateral, 1e-12);
  for (std::size_t i = 1; i < s.polyline.size(); ++i) {
    EXPECT_GE(s.polyline[i].x, s.polyline[i - 1].x - 1e-12);
    EXPECT_GE(s.polyline[i].y, s.polyline[i - 1].y - 1e-12);
  }
}

TEST(EffectiveLeverArm, CoincidentPoint) {
  EXPECT_NEAR(effective_lever_arm({0, 1}, {0, 1}), 1.0, 1e-15);
}

TEST(EffectiveLeverArm, CollinearBeyondCog) {
  EXPECT_EQ(lever_arm_branch({1, 0}, {2, 0}), LeverBranch::Plus);
  EXPECT_NEAR(effective_lever_arm({1, 0}, {2, 0}), 2.0, 1e-15);
}

TEST(EffectiveLeverArm, ProjectionExample) {
  // Foot of the perpendicular from P onto the pivot-CG line.
  const Vec2 G{3, 4}, P{1, 2};
  const double oracle = dot(G, P) / norm(G);
  EXPECT_NEAR(oracle, 2.2, 1e-15);
  EXPECT_EQ(lever_arm_branch(G, P), LeverBranch::Minus);
  EXPECT_NEAR(effective_lever_arm(G, P), oracle, 1e-14);
}

TEST(EffectiveLeverArm, DegenerateCog) {
  try {
    effective_lever_arm({1e-10, 0.0}, {1, 1});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateGeometry);
  }
}

TEST(EffectiveLeverArm, MatchesProjectionOnRandomInputs) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    Vec2 G{u(rng), u(rng)}, P{u(rng) * 2, u(rng) * 2};
    if (norm(G) <= 1e-3) continue;
    const double proj = dot(G, P) / norm(G);
    const double d = effective_lever_arm(G, P);
    EXPECT_LE(std::abs(d - proj), 1e-9 * std::max(1.0, std::abs(proj))) << i;
    const bool minus = dot(G, P) - norm_sq(G) <= 0.0;
    EXPECT_EQ(lever_arm_branch(G, P) == LeverBranch::Minus, minus) << i;
  }
}

TEST(FindContact, FarTipHasNoContact) {
  const LinkShape s = build_link_shape(GateSpec{});
  EXPECT_FALSE(find_contact({-1.0, -1.0}, s, 0.0).has_value());
  EXPECT_FALSE(find_contact({0.05, 0.2}, s, 0.0).has_value());
}

TEST(FindContact, TaperMidpoint) {
  GateSpec g;
  const LinkShape s = build_link_shape(g);
  const Vec2 mid = (s.polyline[0] + s.polyline[1]) * 0.5;
  const auto c = find_contact(mid, s, 0.0);
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(c->segment_index, 0u);
  EXPECT_NEAR(c->local_opening_angle, deg_to_rad(45.0), 1e-12);
  EXPECT_NEAR(c->distance, 0.0, 1e-12);
  EXPECT_NEAR(norm(c->position - mid), 0.0, 1e-12);
}

TEST(FindContact, WithinContactBand) {
  const LinkShape s = build_link_shape(GateSpec{});
  const Vec2 a = s.polyline[1], b = s.polyline[2];
  const Vec2 on = (a + b) * 0.5;
  EXPECT_TRUE(find_contact(on + Vec2{0, 0.5 * kEpsContact}, s, 0.0).has_value());
  EXPECT_FALSE(find_contact(on + Vec2{0, 2.0 * kEpsContact}, s, 0.0).has_value());
  EXPECT_TRUE(find_contact(on + Vec2{0, 0.005}, s, 0.0, 0.005).has_value());
}

TEST(FindContact, TieGoesToLowerSegment) {
  // The shared vertex is equidistant from both segments.
  const LinkShape s = build_link_shape(GateSpec{});
  const Vec2 corner = s.polyline[1];
  // Outside the corner on the bisector of the exterior angle.
  const Vec2 t0 = normalize(s.polyline[1] - s.polyline[0]);
  const Vec2 t1 = normalize(s.polyline[2] - s.polyline[1]);
  const Vec2 n0{-t0.y, t0.x}, n1{-t1.y, t1.x};
  const Vec2 bis = normalize(n0 + n1);
  const auto c = find_contact(corner + bis * (0.5 * kEpsContact), s, 0.0);
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(c->segment_index, 0u);
}

TEST(FindContact, RotationEquivariant) {
  GateSpec g;
  const LinkShape s = build_link_shape(g);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> t(0.0, 1.0), delta(-0.5, 0.5), off(-5e-5, 5e-5);
  for (int i = 0; i < 500; ++i) {
    const std::size_t seg = i % (s.polyline.size() - 1);
    const Vec2 on = s.polyline[seg] + (s.polyline[seg + 1] - s.polyline[seg]) * t(rng);
    const Vec2 tip = on + Vec2{off(rng), off(rng)};
    const auto base = find_contact(tip, s, 0.0);
    ASSERT_TRUE(base.has_value());
    const double d = delta(rng);
    const auto rot = find_contact(rotate(tip, d), s, d);
    ASSERT_TRUE(rot.has_value());
    EXPECT_EQ(rot->segment_index, base->segment_index);
    EXPECT_NEAR(norm(rot->position - base->position), 0.0, 1e-12);
    EXPECT_NEAR(rot->local_opening_angle, base->local_opening_angle + d, 1e-12);
  }
}

TEST(ProjectOntoSegment, ClampsToEnds) {
  const auto p = project_onto_segment({-1, 1}, {0, 0}, {2, 0});
  EXPECT_EQ(p.closest, (Vec2{0, 0}));
  EXPECT_DOUBLE_EQ(p.param, 0.0);
  const auto q = project_onto_segment({1, 1}, {0, 0}, {2, 0});
  EXPECT_EQ(q.closest, (Vec2{1, 0}));
  EXPECT_DOUBLE_EQ(q.distance, 1.0);
}

TEST(LinkEnd, DefaultGate) { EXPECT_NEAR(link_end_x(GateSpec{}), 0.17, 1e-12); }
