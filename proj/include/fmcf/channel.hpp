#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fmcf/error.hpp"
#include "fmcf/fields.hpp"
#include "fmcf/geometry.hpp"
#include "fmcf/numerics.hpp"

namespace fmcf {

// Channel walls |x2| = m x1^2 / 2 + k.
struct ChannelParams {
  double m = 1.0;
  double k = 1.0;

  void validate() const {
    if (!(std::isfinite(m) && m > 0.0 && std::isfinite(k) && k > 0.0))
      throw std::invalid_argument("channel parameters need m > 0 and k > 0");
  }
  double f(double x) const { return 0.5 * m * x * x + k; }
};

// Arcs centred on the axis at (p(a), 0) with radius r(a), meeting the wall
// at (a, f(a)) perpendicularly.
inline double arc_centre(const ChannelParams& c, double a) { return 0.5 * a - c.k / (c.m * a); }

template <class Real = double>
Real arc_radius(const ChannelParams& c, Real a) {
  const Real m = c.m, k = c.k;
  return (a / 2 + k / (m * a)) * std::sqrt(m * m * a * a + 1);
}

inline double arc_radius_slope(const ChannelParams& c, double a) {
  const double ma2 = c.m * c.m * a * a;
  return (ma2 + 0.5 - c.k / (c.m * a * a)) / std::sqrt(ma2 + 1.0);
}

inline double a_star(const ChannelParams& c) {
  c.validate();
  return std::sqrt(-1.0 + std::sqrt(1.0 + 16.0 * c.m * c.k)) / (2.0 * c.m);
}

inline double channel_r_min(const ChannelParams& c) { return arc_radius(c, a_star(c)); }

struct RadiiPair {
  double a1 = 0.0, a2 = 0.0;
};

// Both solutions of r(a) = 1/c for 0 < c < 1/r_min.
inline RadiiPair solve_radii(const ChannelParams& p, double c) {
  p.validate();
  const double as = a_star(p);
  const double rmin = arc_radius(p, as);
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("forcing must be positive");
  if (std::abs(c * rmin - 1.0) <= 1e-12) throw TangentialRoot("c equals 1/r_min: the two radii coincide");
  if (c * rmin > 1.0) throw std::invalid_argument("forcing exceeds 1/r_min: no arc has curvature c");
  const double target = 1.0 / c;
  auto g = [&](double a) { return arc_radius(p, a) - target; };
  double lo = 0.5 * as;
  while (g(lo) <= 0.0) lo *= 0.5;
  double hi = 2.0 * as;
  while (g(hi) <= 0.0) hi *= 2.0;
  return {bisect_root(g, lo, as), bisect_root(g, as, hi)};
}

// Residual of the right-angle contact at (a, f(a)).
inline double right_angle_residual(const ChannelParams& p, double a) {
  const double jx = a - arc_centre(p, a), jy = p.f(a);
  const double slope = p.m * a;
  const double nrm = std::hypot(slope, 1.0);
  const double dot = (jx * -slope + jy) / nrm;
  return std::abs(dot) / arc_radius(p, a);
}

// Same residual for a general axis-centred circle, evaluated where it meets
// the upper wall with x1 > centre.
inline double arc_contact_residual(const ChannelParams& p, double centre, double radius) {
  auto gap = [&](double s) { return std::hypot(s - centre, p.f(s) - 0.0) - radius; };
  double lo = std::max(centre, 0.0), hi = lo + 1.0;
  if (gap(lo) >= 0.0) throw std::invalid_argument("circle does not reach the wall");
  while (gap(hi) < 0.0) hi *= 2.0;
  const double s = bisect_root(gap, lo, hi);
  const double jx = s - centre, jy = p.f(s);
  const double slope = p.m * s;
  const double dot = (jx * -slope + jy) / std::hypot(slope, 1.0);
  return std::abs(dot) / std::hypot(jx, jy);
}

// U(a) = {x in channel : (|x1| - p(a))^2 + x2^2 < r(a)^2}. For p(a) <= 0
// this is the intersection of the disk about (p, 0) and its mirror.
class ArcRegion {
 public:
  ArcRegion(ChannelParams p, double a) : p_(p), a_(a), centre_(arc_centre(p, a)), radius_(arc_radius(p, a)) {}

  double a() const { return a_; }
  double centre() const { return centre_; }
  double radius() const { return radius_; }

  // Signed distance-like level: < 0 inside the arc side.
  double level(double x1, double x2) const { return std::hypot(std::abs(x1) - centre_, x2) - radius_; }

  bool contains(double x1, double x2) const {
    return std::abs(x2) < p_.f(x1) && level(x1, x2) < 0.0;
  }

 private:
  ChannelParams p_;
  double a_, centre_, radius_;
};

struct UMask {
  ScalarField indicator;
  ArcRegion region;
  bool exits_window = false;
};

inline UMask build_U_mask(const ChannelParams& p, double a, std::shared_ptr<const GridGeometry> grid) {
  const auto* ch = grid->spec().as_channel();
  if (!ch) throw std::invalid_argument("U mask needs a channel grid");
  if (!(a > 0.0)) throw std::invalid_argument("arc index must be positive");
  ArcRegion region(p, a);
  ScalarField ind(grid);
  const auto& g = *grid;
  for (std::size_t i : g.inside_cells()) ind[i] = region.contains(g.coord(i, 0), g.coord(i, 1)) ? 1.0 : 0.0;
  const bool exits = std::abs(region.centre()) + region.radius() > ch->x_max - g.h();
  return {std::move(ind), region, exits};
}

// Smallest a in [lo, hi] with x in U(a); clamps to the ends.
inline double arc_index(const ChannelParams& p, double x1, double x2, double lo, double hi) {
  if (ArcRegion(p, lo).contains(x1, x2)) return lo;
  if (!ArcRegion(p, hi).contains(x1, x2)) return hi;
  return bisect_predicate([&](double a) { return ArcRegion(p, a).contains(x1, x2); }, lo, hi);
}

// Expression whose supremum over (0, L] bounds the arc-speed factor.
inline double delta0_weight(const ChannelParams& p, double a) {
  const double ma2 = p.m * p.m * a * a;
  const double s = std::sqrt(ma2 + 1.0);
  return 0.5 + (ma2 + 0.5) / s + p.m * p.k / (ma2 + 1.0 + s);
}

// (a1 - a) / (1/r(a1) - 1/r(a)), continuous at a = a1.
inline double barrier_ratio(const ChannelParams& p, double a1, double a) {
  const double r1 = arc_radius(p, a1);
  if (std::abs(a - a1) <= 1e-6 * a1) return -r1 * r1 / arc_radius_slope(p, a1);
  return (a1 - a) / (1.0 / r1 - 1.0 / arc_radius(p, a));
}

struct Delta0Result {
  double delta0 = 0.0;
  double C = 0.0;
  double sup_h = 0.0;
  double a2 = 0.0;
};

inline Delta0Result delta0(const ChannelParams& p, double a1, double l1, double l2) {
  p.validate();
  if (!(a1 > 0.0 && a1 < a_star(p))) throw std::invalid_argument("a1 must be the smaller root (0 < a1 < a*)");
  const double a2 = solve_radii(p, 1.0 / arc_radius(p, a1)).a2;
  if (!(l1 > 0.0 && l1 < a1)) throw std::invalid_argument("l1 must lie in (0, a1)");
  if (!(l2 > 0.0 && l2 < a2 - a1)) throw std::invalid_argument("l2 must lie in (0, a2 - a1)");
  const double L = a1 + l2;
  Delta0Result out;
  out.a2 = a2;
  out.C = sampled_max([&](double a) { return delta0_weight(p, a); }, L * 1e-9, L, 4096).value;
  out.sup_h = sampled_max([&](double a) { return barrier_ratio(p, a1, a); }, a1 - l1, a1 + l2, 4096).value;
  out.delta0 = 1.0 / (out.C * out.sup_h);
  return out;
}

enum class BarrierSide { sub, super };

struct BarrierSchedule {
  double a1 = 0.0, l1 = 0.0, l2 = 0.0, delta = 0.0;
  BarrierSide side = BarrierSide::sub;
};

inline double barrier_a(const BarrierSchedule& s, double t) {
  const double decay = std::exp(-s.delta * t);
  return s.side == BarrierSide::sub ? s.a1 - s.l1 * decay : s.a1 + s.l2 * decay;
}

inline constexpr double kMinResolvedCells = 6.0;

// alpha + (beta - alpha) S((a1 + l2 - a(x)) / (l1 + l2)) from the arc index.
inline ScalarField make_initial_data(const ChannelParams& p, double a1, double l1, double l2, double alpha, double beta,
                                     std::shared_ptr<const GridGeometry> grid) {
  if (!(alpha < beta)) throw std::invalid_argument("initial data needs alpha < beta");
  if (!(l1 > 0.0 && l1 < a1 && l2 > 0.0)) throw std::invalid_argument("invalid barrier interval");
  if ((l1 + l2) / grid->h() < kMinResolvedCells) throw GridTooCoarse("grid does not resolve l1 + l2 with 6 cells");
  const double lo = a1 - l1, hi = a1 + l2;
  auto value = [&](std::span<const double> x) {
    const double a = arc_index(p, x[0], x[1], lo, hi);
    return alpha + (beta - alpha) * smoothstep5((hi - a) / (l1 + l2));
  };
  ScalarField u = ScalarField::sample(grid, value);
  fill_ghosts_in_place(u);
  return u;
}

// Mean |u - limit| over inside cells farther than `band` from the arc
// boundary of U(a1); `support` (optional, nonzero = counted) restricts cells.
inline double convergence_metric(const ScalarField& u, const ChannelParams& p, double a1, double alpha, double beta,
                                 double band, std::span<const std::uint8_t> support = {}) {
  const auto& g = u.geometry();
  ArcRegion U(p, a1);
  std::vector<double> dev;
  for (std::size_t i : g.inside_cells()) {
    if (!support.empty() && support[i] == 0) continue;
    const double x1 = g.coord(i, 0), x2 = g.coord(i, 1);
    if (std::abs(U.level(x1, x2)) <= band) continue;
    const double target = U.contains(x1, x2) ? beta : alpha;
    dev.push_back(std::abs(u[i] - target));
  }
  if (dev.empty()) return 0.0;
  return deterministic_sum(dev) / double(dev.size());
}

struct SandwichReport {
  bool holds = true;
  std::size_t missing_inner = 0;  // cells of the eroded lower mask below the half level
  std::size_t excess_outer = 0;   // cells above the half level outside the dilated upper mask
};

// {u >= (alpha+beta)/2} contains U(a_sub) eroded by `margin` and is contained
// in U(a_super) dilated by `margin`, both measured from the arcs.
inline SandwichReport sandwich_check(const ScalarField& u, const ChannelParams& p, double a_sub, double a_super,
                                     double alpha, double beta, double margin) {
  const auto& g = u.geometry();
  const ArcRegion lo(p, a_sub), hi(p, a_super);
  const double half = 0.5 * (alpha + beta);
  SandwichReport rep;
  for (std::size_t i : g.inside_cells()) {
    const double x1 = g.coord(i, 0), x2 = g.coord(i, 1);
    const bool above = u[i] >= half;
    if (lo.level(x1, x2) < -margin && !above) ++rep.missing_inner;
    if (hi.level(x1, x2) >= margin && above) ++rep.excess_outer;
  }
  rep.holds = rep.missing_inner == 0 && rep.excess_outer == 0;
  return rep;
}

// Cells of U(a_outer) dilated by `margin` stay free; every other inside cell
// is pinned.
inline std::vector<std::uint8_t> channel_pin_mask(const GridGeometry& g, const ChannelParams& p, double a_outer,
                                                  double margin) {
  ArcRegion U(p, a_outer);
  std::vector<std::uint8_t> pin(g.size(), 0);
  for (std::size_t i : g.inside_cells())
    if (U.level(g.coord(i, 0), g.coord(i, 1)) >= margin) pin[i] = 1;
  return pin;
}

// Truncation half-width covering U(a1 + l2) with a 4h margin.
inline double channel_window(const ChannelParams& p, double a_outer, double h) {
  return std::abs(arc_centre(p, a_outer)) + arc_radius(p, a_outer) + 4.0 * h;
}

}  // namespace fmcf
