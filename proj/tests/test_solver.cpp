#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fmcf/channel.hpp"
#include "fmcf/io.hpp"
#include "fmcf/solver.hpp"

using namespace fmcf;

namespace {

ScalarField radial_field(std::shared_ptr<const GridGeometry> g, std::function<double(double)> f) {
  auto u = ScalarField::sample(std::move(g), [&](auto x) { return f(std::hypot(x[0], x[1])); });
  fill_ghosts_in_place(u);
  return u;
}

// Radius where a radially decreasing field crosses `level` along +x1.
double crossing_radius(const ScalarField& u, double level) {
  const auto& g = u.geometry();
  std::vector<std::pair<double, double>> ray;
  for (std::size_t i : g.inside_cells())
    if (std::abs(g.coord(i, 1)) < 1e-12 && g.coord(i, 0) >= 0.0) ray.push_back({g.coord(i, 0), u[i]});
  std::sort(ray.begin(), ray.end());
  for (std::size_t k = 1; k < ray.size(); ++k) {
    const auto [x0, v0] = ray[k - 1];
    const auto [x1, v1] = ray[k];
    if ((v0 - level) * (v1 - level) <= 0.0 && v0 != v1) return x0 + (level - v0) / (v1 - v0) * (x1 - x0);
  }
  return NAN;
}

}  // namespace

TEST(Cfl, Examples) {
  EXPECT_DOUBLE_EQ(cfl_dt(0.25, 0.01, 2, 0.0), 3.125e-6);
  EXPECT_DOUBLE_EQ(cfl_dt(0.25, 0.02, 2, 0.0), 4.0 * cfl_dt(0.25, 0.01, 2, 0.0));
  EXPECT_DOUBLE_EQ(cfl_dt(0.25, 0.01, 2, 100.0), 3.125e-6);
  EXPECT_DOUBLE_EQ(cfl_dt(0.25, 0.01, 2, 1e4), 0.25 * 0.01 / (1e4 * std::sqrt(2.0)));
  EXPECT_THROW(cfl_dt(0.25, 0.01, 2, INFINITY), std::invalid_argument);
  EXPECT_THROW(cfl_dt(0.25, NAN, 2, 1.0), std::invalid_argument);
}

TEST(Step, ConstantDataGainsForcingFloor) {
  auto g = make_grid(DomainSpec::disk(1.0), 0.05);
  ScalarField u(g, 0.7);
  const double eps = 0.05, dt = 1e-4, c0 = 0.5;
  const auto next = step(u, dt, ForcingSpec::constant(c0), eps);
  for (std::size_t i : g->inside_cells()) EXPECT_EQ(next[i], 0.7 + dt * (c0 * eps));
}

TEST(Step, PinnedCellsUnchanged) {
  auto g = make_grid(DomainSpec::disk(1.0), 0.05);
  auto u = radial_field(g, [](double r) { return std::cos(M_PI * r); });
  std::vector<std::uint8_t> pin(g->size(), 0);
  for (std::size_t i : g->inside_cells())
    if (g->coord(i, 0) > 0.5) pin[i] = 1;
  const auto next = step(u, 1e-4, ForcingSpec::constant(1.0), 0.05, pin);
  for (std::size_t i : g->inside_cells())
    if (pin[i]) {
      EXPECT_EQ(next[i], u[i]);
    }
}

TEST(Step, BumpDecreasesWithinParabolicBound) {
  auto g = make_grid(DomainSpec::disk(1.0), 0.05);
  auto u = radial_field(g, [](double r) { return std::exp(-8 * r * r); });
  const double eps = 0.05, dt = cfl_dt(0.25, g->h(), 2, 0.0);
  const auto b = bij_contract(u, eps);
  double bound = 0.0;
  for (std::size_t i : g->inside_cells()) bound = std::max(bound, std::abs(b[i]));
  const auto next = step(u, dt, ForcingSpec::constant(0.0), eps);
  const auto o = *g->locate(std::vector<double>{0.0, 0.0});
  EXPECT_LT(next[o], u[o]);
  EXPECT_LE(u[o] - next[o], dt * bound * (1 + 1e-12));
}

TEST(Step, RejectsNonFinite) {
  auto g = make_grid(DomainSpec::disk(1.0), 0.1);
  ScalarField u(g, 0.0);
  u[g->inside_cells()[3]] = NAN;
  EXPECT_ANY_THROW(step(u, 1e-4, ForcingSpec::constant(1.0), 0.1));
}

TEST(Run, ConstantDataWithoutForcingIsStationary) {
  auto g = make_grid(DomainSpec::disk(1.0), 0.1);
  ScalarField u0(g, 0.3);
  SolverConfig sc;
  sc.t_final = 0.05;
  sc.snapshot_every = 0.01;
  const auto res = run(u0, sc, ForcingSpec::constant(0.0));
  for (std::size_t i : g->inside_cells()) EXPECT_EQ(res.final[i], 0.3);
  const auto& rows = res.diagnostics.rows;
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    EXPECT_GT(rows[k].t, rows[k - 1].t);
    EXPECT_EQ(rows[k].max_w, rows[0].max_w);
    EXPECT_EQ(rows[k].lyapunov_E, rows[0].lyapunov_E);
    EXPECT_EQ(rows[k].sup_u, 0.3);
  }
}

TEST(Run, ConstantDataExactness) {
  auto g = make_grid(DomainSpec::disk(1.0), 0.1);
  ScalarField u0(g, 0.7);
  SolverConfig sc;
  sc.epsilon = 0.1;
  const double c0 = 0.5;
  const double dt = cfl_dt(sc.cfl_safety, g->h(), 2, c0);
  const std::size_t steps = 2000;
  sc.t_final = dt * double(steps);
  const auto res = run(u0, sc, ForcingSpec::constant(c0));
  EXPECT_EQ(res.steps, steps);
  const double expect = 0.7 + c0 * 0.1 * dt * double(steps);
  for (std::size_t i : g->inside_cells()) EXPECT_NEAR(res.final[i], expect, 1e-12 * expect);
}

TEST(Run, RefusesTooManySteps) {
  auto g = make_grid(DomainSpec::disk(1.0), 0.01);
  SolverConfig sc;
  sc.t_final = 1e6;
  EXPECT_THROW(run(ScalarField(g, 0.0), sc, ForcingSpec::constant(0.0)), std::invalid_argument);
}

TEST(Run, ConfigValidation) {
  auto g = make_grid(DomainSpec::disk(1.0), 0.1);
  SolverConfig sc;
  sc.cfl_safety = 1.5;
  EXPECT_THROW(sc.validate(*g), std::invalid_argument);
  sc.cfl_safety = 0.5;
  sc.epsilon = 0.0;
  EXPECT_THROW(sc.validate(*g), std::invalid_argument);
  sc.epsilon.reset();
  EXPECT_DOUBLE_EQ(sc.epsilon_for(*g), g->h());
  sc.t_final = 0.0;
  EXPECT_THROW(sc.validate(*g), std::invalid_argument);
}

TEST(Run, CurvatureFlowShrinksCircle) {
  // c = 0: a circle of radius R0 shrinks as r^2 = R0^2 - 2t.
  const double h = 0.01;
  auto g = make_grid(DomainSpec::disk(1.0), h);
  auto u0 = radial_field(g, [](double r) { return 0.5 * (1.0 + std::cos(M_PI * r)); });
  SolverConfig sc;
  sc.epsilon = 1e-3;
  sc.t_final = 0.05;
  const auto res = run(u0, sc, ForcingSpec::constant(0.0));
  const double r = crossing_radius(res.final, 0.5);
  EXPECT_NEAR(r, std::sqrt(0.25 - 2.0 * sc.t_final), 5e-3);
}

TEST(Run, SupNormBoundedByForcingFloor) {
  auto g = make_grid(DomainSpec::disk(1.0), 0.05);
  auto u0 = radial_field(g, [](double r) { return std::cos(M_PI * r); });
  SolverConfig sc;
  sc.t_final = 0.2;
  sc.snapshot_every = 0.05;
  sc.keep_snapshots = true;
  const double c = 1.5, eps = g->h();
  const auto res = run(u0, sc, ForcingSpec::constant(c));
  const double lo = u0.min_inside(), hi = u0.max_inside();
  for (const auto& s : res.snapshots) {
    EXPECT_GE(s.u.min_inside(), lo - c * eps * s.t - 1e-12);
    EXPECT_LE(s.u.max_inside(), hi + c * eps * s.t + 1e-12);
  }
}

TEST(Run, LyapunovNonincreasing) {
  auto g = make_grid(DomainSpec::disk(1.0), 0.04);
  auto u0 = radial_field(g, [](double r) { return 0.5 * (1.0 + std::cos(M_PI * r)) + 0.1 * r * r * r; });
  SolverConfig sc;
  sc.t_final = 0.5;
  sc.snapshot_every = 0.02;
  const auto res = run(u0, sc, ForcingSpec::constant(2.0));
  const auto& rows = res.diagnostics.rows;
  for (std::size_t k = 1; k < rows.size(); ++k)
    EXPECT_LE(rows[k].lyapunov_E, rows[k - 1].lyapunov_E + 1e-8 * std::abs(rows[k - 1].lyapunov_E) + 1e-12);
}

TEST(Run, CurvatureOnlyMaxWNonincreasingOnDisk) {
  auto g = make_grid(DomainSpec::disk(1.0), 0.04);
  auto u0 = ScalarField::sample(g, [](auto x) {
    const double q = x[0] * x[0] + x[1] * x[1];
    return 0.5 * (3 * q * q - 2 * q * q * q) + 0.2 * x[0] * x[1] * (1 - q) * (1 - q);
  });
  SolverConfig sc;
  sc.t_final = 0.2;
  sc.snapshot_every = 0.02;
  const auto res = run(u0, sc, ForcingSpec::constant(0.0));
  const auto& rows = res.diagnostics.rows;
  for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_LE(rows[k].max_w, rows[k - 1].max_w + 1e-8);
}

TEST(Run, ThreadCountDoesNotChangeOutput) {
  auto g = make_grid(DomainSpec::disk(1.0), 0.02);
  auto u0 = radial_field(g, [](double r) { return std::cos(M_PI * r) + 0.05 * std::sin(7 * r); });
  std::string csv[2];
  std::vector<double> final_values[2];
  for (unsigned t : {1u, 3u}) {
    SolverConfig sc;
    sc.t_final = 0.02;
    sc.snapshot_every = 0.005;
    sc.threads = t;
    const auto res = run(u0, sc, ForcingSpec::constant(1.0));
    Table tab{{"t", "max_w", "lip_x", "sup_ut", "lyapunov_E", "sup_u"}, {}};
    for (const auto& r : res.diagnostics.rows) tab.add({r.t, r.max_w, r.lip_x, r.sup_ut, r.lyapunov_E, r.sup_u});
    csv[t == 1 ? 0 : 1] = to_csv(tab);
    final_values[t == 1 ? 0 : 1] = {res.final.values().begin(), res.final.values().end()};
  }
  EXPECT_EQ(csv[0], csv[1]);
  EXPECT_EQ(final_values[0], final_values[1]);
}

TEST(Run, StationaryChannelArcHalfLevelHolds) {
  // Smoothed indicator of U(a1) with c = 1/r(a1): the half level barely moves.
  const ChannelParams p{1.0, 1.0};
  const double c = 0.9 / channel_r_min(p);
  const auto roots = solve_radii(p, c);
  const double h = 0.02;
  const double l = 4 * h;
  auto g = make_grid(DomainSpec::channel(p.m, p.k, channel_window(p, roots.a1 + l, h) + 0.5), h);
  const auto u0 = make_initial_data(p, roots.a1, l, l, 0.0, 1.0, g);
  SolverConfig sc;
  sc.epsilon = h;
  sc.t_final = 0.5;
  const auto res = run(u0, sc, ForcingSpec::constant(c));
  const double x0 = crossing_radius(u0, 0.5), x1 = crossing_radius(res.final, 0.5);
  EXPECT_LT(std::abs(x1 - x0) / sc.t_final, h / 100.0);
}

TEST(Lyapunov, ConstantFieldMeasuresDomain) {
  auto g = make_grid(DomainSpec::disk(1.0), 0.01);
  ScalarField u(g, 2.0);
  fill_ghosts_in_place(u);
  EXPECT_NEAR(lyapunov(u, ForcingSpec::constant(0.0), 0.1), 0.1 * M_PI, 0.1 * M_PI * 0.01);
}

TEST(Lyapunov, ConstantShiftMovesDriftTermOnly) {
  auto g = make_grid(DomainSpec::disk(1.0), 0.05);
  auto u = radial_field(g, [](double r) { return std::cos(M_PI * r); });
  auto v = radial_field(g, [](double r) { return std::cos(M_PI * r) + 0.25; });
  const auto c = ForcingSpec::radial({[](double r) { return 1.0 + r; }, [](double) { return 1.0; }});
  const auto cells = sample_forcing(*g, c);
  double sum_c = 0.0;
  for (std::size_t i : g->inside_cells()) sum_c += cells[i];
  EXPECT_NEAR(lyapunov(v, c, 0.05) - lyapunov(u, c, 0.05), -0.25 * g->cell_volume() * sum_c, 1e-12);
}

TEST(Comparison, IdenticalAndShifted) {
  auto g = make_grid(DomainSpec::disk(1.0), 0.05);
  auto u = radial_field(g, [](double r) { return std::cos(M_PI * r); });
  SolverConfig sc;
  sc.t_final = 0.05;
  const auto c = ForcingSpec::constant(1.0);
  EXPECT_TRUE(comparison_check(u, u, sc, c));
  auto up = u;
  for (double& v : up.storage()) v += 1.0;
  EXPECT_TRUE(comparison_check(u, up, sc, c));
  const auto a = run(u, sc, c), b = run(up, sc, c);
  for (std::size_t i : g->inside_cells()) EXPECT_NEAR(b.final[i] - a.final[i], 1.0, 1e-12);
}

TEST(Comparison, RejectsUnorderedInput) {
  auto g = make_grid(DomainSpec::disk(1.0), 0.1);
  SolverConfig sc;
  sc.t_final = 0.01;
  EXPECT_THROW(comparison_check(ScalarField(g, 1.0), ScalarField(g, 0.0), sc, ForcingSpec::constant(0.0)),
               std::invalid_argument);
}

TEST(Comparison, RandomOrderedPairsStayOrdered) {
  auto g = make_grid(DomainSpec::disk(1.0), 0.1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  SolverConfig sc;
  sc.t_final = 0.05;
  for (int trial = 0; trial < 10; ++trial) {
    const double a = U(rng), b = U(rng), k = 1 + 3 * std::abs(U(rng)), off = 0.2 * std::abs(U(rng));
    auto lo = ScalarField::sample(g, [&](auto x) { return a * std::cos(k * x[0]) + b * x[1] * x[1]; });
    auto hi = ScalarField::sample(g, [&](auto x) { return a * std::cos(k * x[0]) + b * x[1] * x[1] + off * (1 + x[0] * x[0]); });
    EXPECT_TRUE(comparison_check(lo, hi, sc, ForcingSpec::constant(1.2))) << "trial " << trial;
  }
}

TEST(PredictedBounds, DiskExample) {
  InitialStats u0;
  u0.sup_grad = 1.0;
  u0.sup_hess = 1.0;
  ForcingStats c;
  c.sup_c = 2.0;
  const auto pb = predicted_bounds(u0, c, {-1.0, 2.0}, 1.0, 2, 0.0);
  EXPECT_DOUBLE_EQ(pb.M, 4.0 + 2.0 * std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(pb.global_L, 2.0 * pb.M);
  EXPECT_THROW(predicted_bounds(u0, c, {-1.0, 2.0}, 0.0, 2, 0.0), std::invalid_argument);
}

TEST(PredictedBounds, LocalBoundAtTimeZeroIgnoresForcing) {
  InitialStats u0;
  u0.sup_grad = 3.0;
  ForcingStats weak, strong;
  strong.sup_c = 10.0;
  strong.sup_grad_c = 4.0;
  const BoundaryMetrics bm{0.5, 1.0};
  const double expect = ((0.5 + 1.0) * 1.0 / 4.0 + 1.0) * 4.0;
  EXPECT_DOUBLE_EQ(predicted_bounds(u0, weak, bm, 1.0, 2, 0.0).local_CT, expect);
  EXPECT_DOUBLE_EQ(predicted_bounds(u0, strong, bm, 1.0, 2, 0.0).local_CT, expect);
}

TEST(PredictedBounds, MonotoneInData) {
  InitialStats a, b;
  a.sup_grad = 1.0;
  a.sup_hess = 1.0;
  b.sup_grad = 2.0;
  b.sup_hess = 3.0;
  ForcingStats c;
  c.sup_c = 2.0;
  const BoundaryMetrics bm{-1.0, 2.0};
  const auto pa = predicted_bounds(a, c, bm, 1.0, 2, 1.0), pb = predicted_bounds(b, c, bm, 1.0, 2, 1.0);
  EXPECT_LE(pa.M, pb.M);
  EXPECT_LE(pa.global_L, pb.global_L);
  EXPECT_LE(pa.local_CT, pb.local_CT);
  EXPECT_EQ(predicted_bounds({}, {}, bm, 1.0, 2, 1.0).M, 0.0);
}
