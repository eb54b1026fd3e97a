#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fmcf/channel.hpp"

using namespace fmcf;

namespace {

const ChannelParams kUnit{1.0, 1.0};

double numeric_r_min(const ChannelParams& p) {
  return double(golden_section_min_in<long double>([&](long double a) { return arc_radius<long double>(p, a); },
                                                   1e-6L, 1e6L, 1e-14L)
                    .first);
}

struct Setup {
  double c, a1, a2, l;
};

Setup unit_setup() {
  const double c = 0.9 / channel_r_min(kUnit);
  const auto r = solve_radii(kUnit, c);
  return {c, r.a1, r.a2, 0.3 * (r.a2 - r.a1)};
}

}  // namespace

TEST(Arc, AStarClosedFormAgainstMinimization) {
  EXPECT_NEAR(a_star(kUnit), std::sqrt(-1.0 + std::sqrt(17.0)) / 2.0, 1e-15);
  EXPECT_NEAR(a_star(kUnit), 0.8837, 1e-4);
  EXPECT_NEAR(channel_r_min(kUnit), 2.100, 1e-3);
  EXPECT_NEAR(a_star(kUnit), numeric_r_min(kUnit), 1e-9);
  EXPECT_NEAR(arc_radius_slope(kUnit, a_star(kUnit)), 0.0, 1e-10);
}

TEST(Arc, ScaledParameters) {
  const ChannelParams p{1.0, 4.0};
  EXPECT_NEAR(a_star(p), std::sqrt(-1.0 + std::sqrt(1.0 + 16.0 * 4.0)) / 2.0, 1e-15);
  EXPECT_NEAR(a_star(p), numeric_r_min(p), 1e-9);
}

TEST(Arc, SlopeSignsAndCentreIdentity) {
  const double as = a_star(kUnit);
  EXPECT_LT(arc_radius_slope(kUnit, 0.5 * as), 0.0);
  EXPECT_GT(arc_radius_slope(kUnit, 2.0 * as), 0.0);
  EXPECT_NEAR(arc_centre(kUnit, std::sqrt(2.0 * kUnit.k / kUnit.m)), 0.0, 1e-15);
  const double d = 1e-6;
  for (double a : {0.3, 0.9, 2.0}) {
    const double fd = (arc_radius(kUnit, a + d) - arc_radius(kUnit, a - d)) / (2 * d);
    EXPECT_NEAR(arc_radius_slope(kUnit, a), fd, 1e-7);
  }
}

TEST(Radii, RecoversConstructedRoot) {
  const double a_hat = 0.4;
  const auto r = solve_radii(kUnit, 1.0 / arc_radius(kUnit, a_hat));
  EXPECT_NEAR(r.a1, a_hat, 1e-9);
}

TEST(Radii, UnitCaseAgainstSignScan) {
  const auto s = unit_setup();
  EXPECT_LT(s.a1, a_star(kUnit));
  EXPECT_GT(s.a2, a_star(kUnit));
  EXPECT_LE(std::abs(arc_radius(kUnit, s.a1) - 1.0 / s.c), 1e-10 / s.c);
  EXPECT_LE(std::abs(arc_radius(kUnit, s.a2) - 1.0 / s.c), 1e-10 / s.c);
  // Independent scan: sign changes of r(a) - 1/c on a fine grid.
  std::vector<double> roots;
  const double da = 1e-5;
  for (double a = da; a < 5.0; a += da) {
    const double g0 = arc_radius(kUnit, a) - 1.0 / s.c, g1 = arc_radius(kUnit, a + da) - 1.0 / s.c;
    if (g0 * g1 <= 0.0) roots.push_back(a);
  }
  ASSERT_EQ(roots.size(), 2u);
  EXPECT_NEAR(roots[0], s.a1, 2 * da);
  EXPECT_NEAR(roots[1], s.a2, 2 * da);
}

TEST(Radii, RootsMergeTowardTangency) {
  const double rmin = channel_r_min(kUnit), as = a_star(kUnit);
  const double d = 1e-4;
  const double curv = (arc_radius(kUnit, as + d) - 2 * rmin + arc_radius(kUnit, as - d)) / (d * d);
  double prev = INFINITY;
  for (double f : {0.9, 0.99, 0.999, 0.9999}) {
    const auto r = solve_radii(kUnit, f / rmin);
    const double gap = r.a2 - r.a1;
    EXPECT_LT(gap, prev);
    prev = gap;
    // Near a*, r(a) ~ r_min + r''(a*)(a - a*)^2 / 2.
    const double quad = 2.0 * std::sqrt(2.0 * (rmin / f - rmin) / curv);
    if (f >= 0.999) {
      EXPECT_NEAR(gap / quad, 1.0, 0.05);
    }
  }
}

TEST(Radii, RejectsOutOfRange) {
  const double rmin = channel_r_min(kUnit);
  EXPECT_THROW(solve_radii(kUnit, 0.0), std::invalid_argument);
  EXPECT_THROW(solve_radii(kUnit, 1.5 / rmin), std::invalid_argument);
  EXPECT_THROW(solve_radii(kUnit, 1.0 / rmin), TangentialRoot);
}

TEST(RightAngle, ExactOnDenseSample) {
  for (const ChannelParams p : {ChannelParams{1.0, 1.0}, ChannelParams{0.5, 2.0}, ChannelParams{3.0, 0.1}}) {
    for (int i = 1; i <= 200; ++i) EXPECT_LE(right_angle_residual(p, 0.02 * i), 1e-12);
    EXPECT_LE(right_angle_residual(p, std::sqrt(2.0 * p.k / p.m)), 1e-12);
  }
}

TEST(RightAngle, PerturbedRadiusBreaksIdentity) {
  for (double a : {0.4, 0.9, 1.5}) {
    const double centre = arc_centre(kUnit, a), r = arc_radius(kUnit, a);
    EXPECT_LE(arc_contact_residual(kUnit, centre, r), 1e-9);
    EXPECT_GT(arc_contact_residual(kUnit, centre, 1.01 * r), 1e-4);
  }
}

TEST(Curvature, StationaryArcMatchesForcing) {
  const auto s = unit_setup();
  EXPECT_NEAR(1.0 / arc_radius(kUnit, s.a1), s.c, 1e-10 * s.c);
  EXPECT_NEAR(1.0 / arc_radius(kUnit, s.a2), s.c, 1e-10 * s.c);
}

TEST(UMask, OriginInsideAndEndpointOnBoundary) {
  const double h = 0.02;
  auto g = make_grid(DomainSpec::channel(1.0, 1.0, 3.0), h);
  for (double a : {0.2, 0.6, 1.2}) {
    const auto m = build_U_mask(kUnit, a, g);
    EXPECT_EQ(m.indicator[*g->locate(std::vector<double>{0.0, 0.0})], 1.0);
    // Just inside and just outside the wall point along the arc direction.
    const double fx = kUnit.f(a);
    const double c = m.region.centre();
    const double ux = (a - c) / m.region.radius(), uy = fx / m.region.radius();
    EXPECT_TRUE(m.region.contains(a - h * ux - 1e-3, 0.99 * (fx - h * uy)));
    EXPECT_FALSE(m.region.contains(a + h * ux, fx + h * uy));
    EXPECT_NEAR(m.region.level(a, fx), 0.0, 1e-12);
  }
}

TEST(UMask, NestedAcrossBarrierInterval) {
  const auto s = unit_setup();
  auto g = make_grid(DomainSpec::channel(1.0, 1.0, 3.2), 0.02);
  ScalarField prev(g, 0.0);
  for (int k = 0; k <= 20; ++k) {
    const double a = s.a1 - s.l + 2.0 * s.l * k / 20.0;
    const auto m = build_U_mask(kUnit, a, g);
    for (std::size_t i : g->inside_cells()) EXPECT_LE(prev[i], m.indicator[i]);
    prev = m.indicator;
  }
}

TEST(UMask, FlagsArcsLeavingWindow) {
  auto g = make_grid(DomainSpec::channel(1.0, 1.0, 1.0), 0.02);
  EXPECT_TRUE(build_U_mask(kUnit, 1.2, g).exits_window);
  auto wide = make_grid(DomainSpec::channel(1.0, 1.0, 3.0), 0.02);
  EXPECT_FALSE(build_U_mask(kUnit, 0.9, wide).exits_window);
}

TEST(Delta0, RatioLimitAtA1) {
  const auto s = unit_setup();
  const double limit = barrier_ratio(kUnit, s.a1, s.a1);
  const double r1 = arc_radius(kUnit, s.a1);
  EXPECT_DOUBLE_EQ(limit, -r1 * r1 / arc_radius_slope(kUnit, s.a1));
  EXPECT_GT(limit, 0.0);
  EXPECT_NEAR(barrier_ratio(kUnit, s.a1, s.a1 * (1 + 1e-4)), limit, 1e-3 * limit);
}

TEST(Delta0, PositiveAndMatchesBruteForce) {
  const auto s = unit_setup();
  const auto d = delta0(kUnit, s.a1, s.l, s.l);
  EXPECT_GT(d.delta0, 0.0);
  EXPECT_TRUE(std::isfinite(d.delta0));
  double brute = 0.0;
  const std::size_t N = 1000000;
  for (std::size_t i = 0; i <= N; ++i) {
    const double a = s.a1 - s.l + 2.0 * s.l * double(i) / double(N);
    brute = std::max(brute, barrier_ratio(kUnit, s.a1, a));
  }
  EXPECT_NEAR(d.sup_h, brute, 1e-6 * brute);
}

TEST(Delta0, NondecreasingAsIntervalShrinks) {
  const auto s = unit_setup();
  double prev = 0.0;
  for (double f : {1.0, 0.7, 0.4, 0.1}) {
    const double v = delta0(kUnit, s.a1, f * s.l, f * s.l).delta0;
    EXPECT_GE(v, prev * (1 - 1e-12));
    prev = v;
  }
}

TEST(Delta0, RejectsIntervalTouchingA2) {
  const auto s = unit_setup();
  EXPECT_THROW(delta0(kUnit, s.a1, s.l, s.a2 - s.a1), std::invalid_argument);
  EXPECT_THROW(delta0(kUnit, s.a1, s.a1, s.l), std::invalid_argument);
}

TEST(Barrier, Schedule) {
  BarrierSchedule sub{0.5, 0.1, 0.2, 0.3, BarrierSide::sub};
  BarrierSchedule sup{0.5, 0.1, 0.2, 0.3, BarrierSide::super};
  EXPECT_DOUBLE_EQ(barrier_a(sub, 0.0), 0.4);
  EXPECT_DOUBLE_EQ(barrier_a(sup, 0.0), 0.7);
  EXPECT_NEAR(barrier_a(sub, 1e4), 0.5, 1e-15);
  EXPECT_NEAR(barrier_a(sup, 1e4), 0.5, 1e-15);
  const double t = std::log(2.0) / 0.3;
  EXPECT_NEAR(0.5 - barrier_a(sub, t), 0.05, 1e-15);
  EXPECT_NEAR(barrier_a(sup, t) - 0.5, 0.1, 1e-15);
}

TEST(Barrier, SubMaskInsideSuperMask) {
  const auto s = unit_setup();
  auto g = make_grid(DomainSpec::channel(1.0, 1.0, 3.2), 0.03);
  BarrierSchedule sub{s.a1, s.l, s.l, 0.05, BarrierSide::sub}, sup = sub;
  sup.side = BarrierSide::super;
  for (double t : {0.0, 1.0, 10.0, 100.0}) {
    const auto lo = build_U_mask(kUnit, barrier_a(sub, t), g), hi = build_U_mask(kUnit, barrier_a(sup, t), g);
    for (std::size_t i : g->inside_cells()) EXPECT_LE(lo.indicator[i], hi.indicator[i]);
  }
}

TEST(InitialData, ValuesAndSlopeBound) {
  const auto s = unit_setup();
  const double h = 0.02;
  auto g = make_grid(DomainSpec::channel(1.0, 1.0, channel_window(kUnit, s.a1 + s.l, h)), h);
  const auto u0 = make_initial_data(kUnit, s.a1, s.l, s.l, 0.0, 1.0, g);
  EXPECT_EQ(u0[*g->locate(std::vector<double>{0.0, 0.0})], 1.0);
  const ArcRegion inner(kUnit, s.a1 - s.l), outer(kUnit, s.a1 + s.l);
  for (std::size_t i : g->inside_cells()) {
    const double x = g->coord(i, 0), y = g->coord(i, 1);
    EXPECT_GE(u0[i], 0.0);
    EXPECT_LE(u0[i], 1.0);
    if (!outer.contains(x, y)) {
      EXPECT_EQ(u0[i], 0.0);
    }
    if (inner.contains(x, y)) {
      EXPECT_EQ(u0[i], 1.0);
    }
  }
  // |Da| <= 1 / min over the band of the arc speed |d(level)/da|; bound the
  // profile slope by the smoothstep peak over the band width in a.
  double min_speed = INFINITY;
  for (int k = 0; k <= 200; ++k) {
    const double a = s.a1 - s.l + 2.0 * s.l * k / 200.0;
    const double d = 1e-6;
    // Normal speed of the arc at its axis crossing and at its wall contact.
    const double axis = (arc_centre(kUnit, a + d) + arc_radius(kUnit, a + d) - arc_centre(kUnit, a - d) -
                         arc_radius(kUnit, a - d)) / (2 * d);
    min_speed = std::min(min_speed, std::abs(axis));
  }
  EXPECT_LE(lipschitz_x(u0), 2.0 * kSmoothstep5MaxSlope / (2.0 * s.l * min_speed));
}

TEST(InitialData, RejectsUnderResolvedBand) {
  const auto s = unit_setup();
  auto g = make_grid(DomainSpec::channel(1.0, 1.0, 3.0), 0.1);
  EXPECT_THROW(make_initial_data(kUnit, s.a1, 0.2, 0.2, 0.0, 1.0, g), GridTooCoarse);
}

TEST(Metric, ZeroOnLimitAndBandMassOnInitialData) {
  const auto s = unit_setup();
  const double h = 0.02, band = 6 * h;
  auto g = make_grid(DomainSpec::channel(1.0, 1.0, channel_window(kUnit, s.a1 + s.l, h)), h);
  const auto limit = build_U_mask(kUnit, s.a1, g).indicator;
  EXPECT_EQ(convergence_metric(limit, kUnit, s.a1, 0.0, 1.0, band), 0.0);
  const auto u0 = make_initial_data(kUnit, s.a1, s.l, s.l, 0.0, 1.0, g);
  const double m = convergence_metric(u0, kUnit, s.a1, 0.0, 1.0, band);
  EXPECT_GT(m, 0.0);
  // Oracle: the smoothstep of the arc index, evaluated independently.
  const ArcRegion U(kUnit, s.a1);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i : g->inside_cells()) {
    const double x = g->coord(i, 0), y = g->coord(i, 1);
    if (std::abs(U.level(x, y)) <= band) continue;
    const double a = arc_index(kUnit, x, y, s.a1 - s.l, s.a1 + s.l);
    const double v = smoothstep5((s.a1 + s.l - a) / (2.0 * s.l));
    sum += std::abs(v - (U.contains(x, y) ? 1.0 : 0.0));
    ++count;
  }
  EXPECT_NEAR(m, sum / double(count), 1e-9);
}

TEST(Sandwich, HoldsForBarrierIndicators) {
  const auto s = unit_setup();
  const double h = 0.02;
  auto g = make_grid(DomainSpec::channel(1.0, 1.0, 3.2), h);
  const auto mid = build_U_mask(kUnit, s.a1, g).indicator;
  EXPECT_TRUE(sandwich_check(mid, kUnit, s.a1 - 0.5 * s.l, s.a1 + 0.5 * s.l, 0.0, 1.0, 2 * h).holds);
  const auto big = build_U_mask(kUnit, s.a1 + s.l, g).indicator;
  const auto rep = sandwich_check(big, kUnit, s.a1 - 0.5 * s.l, s.a1 + 0.5 * s.l, 0.0, 1.0, 2 * h);
  EXPECT_FALSE(rep.holds);
  EXPECT_GT(rep.excess_outer, 0u);
  EXPECT_EQ(rep.missing_inner, 0u);
}
