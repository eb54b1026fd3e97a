#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fmcf/error.hpp"
#include "fmcf/forcing.hpp"
#include "fmcf/numerics.hpp"

namespace fmcf {

struct RadialProblem {
  int n = 2;
  double R = 1.0;
  RadialProfile c;
  std::function<double(double)> u0;

  void validate() const {
    if (n < 2) throw std::invalid_argument("radial problem needs n >= 2");
    if (!(std::isfinite(R) && R > 0.0)) throw std::invalid_argument("radial problem needs R > 0");
    if (!c.value) throw std::invalid_argument("radial problem needs a forcing profile");
  }

  // c(r) - (n-1)/r
  double excess(double r) const { return c.value(r) - double(n - 1) / r; }
  double zero_tolerance(double r) const { return std::max(1e-10, 1e-6 * double(n - 1) / r); }
};

enum class Region { A, A_plus, A_minus };

inline const char* region_name(Region r) {
  switch (r) {
    case Region::A: return "A";
    case Region::A_plus: return "A+";
    default: return "A-";
  }
}

struct RadialInterval {
  double lo = 0.0, hi = 0.0;
  bool lo_closed = false, hi_closed = false;
  Region label = Region::A;

  bool contains(double r) const {
    return (lo < r || (lo_closed && r == lo)) && (r < hi || (hi_closed && r == hi));
  }
};

// Ordered partition of (0, R] into A, A+ and A- pieces.
struct RegionClassification {
  std::vector<RadialInterval> pieces;
  double tol_r = 0.0;
  double R = 0.0;

  std::vector<RadialInterval> of(Region label) const {
    std::vector<RadialInterval> out;
    for (const auto& p : pieces)
      if (p.label == label) out.push_back(p);
    return out;
  }

  Region label_at(double r) const {
    for (const auto& p : pieces)
      if (p.label == Region::A && p.contains(r)) return Region::A;
    for (const auto& p : pieces)
      if (p.contains(r)) return p.label;
    throw std::out_of_range("radius outside (0, R]");
  }
};

namespace detail {

inline Region radial_label(const RadialProblem& pb, double r) {
  const double g = pb.excess(r);
  if (std::abs(g) <= pb.zero_tolerance(r)) return Region::A;
  return g > 0.0 ? Region::A_plus : Region::A_minus;
}

}  // namespace detail

// Labels a dense sample of (0, R], splits sign-consistent runs at isolated
// touch points of c with (n-1)/r, and locates every label change by bisection.
inline RegionClassification classify(const RadialProblem& pb, double tol_r) {
  pb.validate();
  if (!(tol_r > 0.0)) throw std::invalid_argument("tol_r must be positive");
  const std::size_t N = std::clamp<std::size_t>(std::size_t(std::ceil(pb.R / tol_r)), 4000, 200000);
  std::vector<double> r(N + 1), g(N + 1);
  std::vector<Region> lab(N + 1);
  for (std::size_t j = 1; j <= N; ++j) {
    r[j] = j == N ? pb.R : pb.R * double(j) / double(N);
    g[j] = pb.excess(r[j]);
    lab[j] = detail::radial_label(pb, r[j]);
  }

  // Each event is a point where the label changes (or a touch singleton).
  struct Cut {
    double at;
    bool singleton;
  };
  std::vector<Cut> cuts;
  auto label_fn = [&](double x) { return detail::radial_label(pb, x); };
  auto bisect_change = [&](double lo, double hi, Region left) {
    return bisect_predicate([&](double x) { return label_fn(x) != left; }, lo, hi);
  };
  for (std::size_t j = 1; j < N; ++j) {
    const Region L = lab[j], Rr = lab[j + 1];
    if (L == Rr) {
      // Touch: local minimum of |g| inside a non-A run.
      if (L != Region::A && j > 1 && lab[j - 1] == L && std::abs(g[j]) <= std::abs(g[j - 1]) &&
          std::abs(g[j]) <= std::abs(g[j + 1])) {
        auto absg = [&](double x) { return std::abs(pb.excess(x)); };
        const Extremum e = golden_section_min(absg, r[j - 1], r[j + 1]);
        if (e.value <= pb.zero_tolerance(e.x) && (cuts.empty() || e.x > cuts.back().at))
          cuts.push_back({e.x, true});
      }
      continue;
    }
    if (L != Region::A && Rr != Region::A) {
      // Sign change without an A sample: the root is a singleton.
      const double root = bisect_root([&](double x) { return pb.excess(x); }, r[j], r[j + 1]);
      cuts.push_back({root, true});
    } else {
      cuts.push_back({bisect_change(r[j], r[j + 1], L), false});
    }
  }

  RegionClassification rc;
  rc.tol_r = tol_r;
  rc.R = pb.R;
  // Walk the runs between cuts.
  double start = 0.0;
  bool start_closed = false;
  Region current = lab[1];
  auto push = [&](double lo, bool lo_c, double hi, bool hi_c, Region label) {
    if (hi < lo || (hi == lo && !(lo_c && hi_c))) return;
    rc.pieces.push_back({lo, hi, lo_c, hi_c, label});
  };
  std::size_t sample = 1;
  for (const Cut& cut : cuts) {
    while (sample < N && r[sample + 1] <= cut.at) ++sample;
    if (cut.singleton) {
      push(start, start_closed, cut.at, false, current);
      push(cut.at, true, cut.at, true, Region::A);
      start = cut.at;
      start_closed = false;
      const std::size_t nxt = std::min(N, sample + 1);
      current = lab[nxt] == Region::A ? current : lab[nxt];
      if (cut.at < r[nxt]) current = label_fn(0.5 * (cut.at + r[nxt]));
      continue;
    }
    // A pieces own their endpoints (A is closed).
    const Region next_label = label_fn(cut.at);
    if (current == Region::A) {
      // cut.at is the first point after the A run.
      const double end = std::nextafter(cut.at, 0.0);
      push(start, start_closed, end, true, Region::A);
      start = end;
      start_closed = false;
      current = next_label;
    } else {
      push(start, start_closed, cut.at, false, current);
      start = cut.at;
      start_closed = true;
      current = Region::A;
    }
  }
  push(start, start_closed, pb.R, true, current);
  // Merge adjacent pieces with equal labels.
  std::vector<RadialInterval> merged;
  for (const auto& p : rc.pieces) {
    if (!merged.empty() && merged.back().label == p.label && merged.back().hi == p.lo &&
        (merged.back().hi_closed || p.lo_closed)) {
      merged.back().hi = p.hi;
      merged.back().hi_closed = p.hi_closed;
    } else {
      merged.push_back(p);
    }
  }
  rc.pieces = std::move(merged);
  return rc;
}

// The attractor radius map d: (0, R] -> (0, R].
inline double d_of(double r0, const RegionClassification& rc, double R) {
  if (!(r0 > 0.0 && r0 <= R)) throw std::out_of_range("d_of needs r0 in (0, R]");
  const Region label = rc.label_at(r0);
  if (label == Region::A) return r0;
  if (label == Region::A_plus) {
    double best = -1.0;
    for (const auto& p : rc.pieces)
      if (p.label == Region::A && p.hi < r0) best = std::max(best, p.hi);
    if (best <= 0.0) throw ConsistencyError("r0 in A+ with no A point below it");
    return best;
  }
  for (const auto& p : rc.pieces)
    if (p.label == Region::A && p.lo > r0) return p.lo;
  return R;
}

// max of u0 over [d(r0), R].
inline double phi_infinity(double r0, const RadialProblem& pb, const RegionClassification& rc) {
  const double d = d_of(r0, rc, pb.R);
  if (d >= pb.R) return pb.u0(pb.R);
  const Extremum e = sampled_max(pb.u0, d, pb.R, 2001);
  return std::max({e.value, pb.u0(d), pb.u0(pb.R)});
}

struct RadialSolution {
  std::vector<double> r;
  std::vector<double> phi;
  double t = 0.0;
  double dt = 0.0;
  std::size_t steps = 0;
};

// Monotone explicit scheme for phi_t = ((n-1)/r) phi_r + c |phi_r| on nodes
// r_i = (i + 1/2) h. The Hamiltonian is split by the sign of phi_r:
//   phi_r > 0: speed (n-1)/r + c > 0, difference toward larger r;
//   phi_r < 0: speed (n-1)/r - c, differenced upwind by its sign.
// Coefficients are evaluated on the face each difference crosses, so a
// stationary radius lying on a face carries no flux.
inline RadialSolution solve_radial(const RadialProblem& pb, double h, double T, double cfl_safety = 0.9,
                                   double node_offset = 0.5) {
  pb.validate();
  if (!pb.u0) throw std::invalid_argument("radial problem needs u0");
  if (!(h > 0.0) || h > pb.R / 16.0 * (1.0 + 1e-12)) throw std::invalid_argument("solve_radial needs 0 < h <= R/16");
  if (!(T >= 0.0)) throw std::invalid_argument("solve_radial needs T >= 0");
  if (!(node_offset > 0.0 && node_offset < 1.0)) throw std::invalid_argument("radial nodes must not sit at r = 0");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw std::invalid_argument("cfl_safety must lie in (0, 1]");
  const auto N = std::size_t(std::llround(pb.R / h));
  h = pb.R / double(N);
  const double nm1 = double(pb.n - 1);

  RadialSolution sol;
  sol.r.resize(N);
  sol.phi.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    sol.r[i] = (double(i) + node_offset) * h;
    sol.phi[i] = pb.u0(sol.r[i]);
  }
  // Face j sits at r = (j + node_offset - 1/2) h for j = 0..N; with the
  // default offset that is j h. Face j is left of node j.
  std::vector<double> up_speed(N + 1), down_speed(N + 1);
  for (std::size_t j = 0; j <= N; ++j) {
    const double rf = std::min(pb.R, (double(j) + node_offset - 0.5) * h);
    const double cf = pb.c.value(std::max(rf, 0.0));
    if (rf <= 0.0) {
      up_speed[j] = std::numeric_limits<double>::infinity();
      down_speed[j] = std::numeric_limits<double>::infinity();
    } else {
      up_speed[j] = nm1 / rf + cf;
      down_speed[j] = nm1 / rf - cf;
    }
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double right = up_speed[i + 1];
    const double left = i == 0 ? 0.0 : std::max(-down_speed[i], 0.0);
    worst = std::max(worst, right + left);
  }
  const double dt = worst > 0.0 ? cfl_safety * h / worst : T;
  sol.dt = dt;
  if (T > 0.0 && T / dt > 1e9) throw std::invalid_argument("radial run would exceed 1e9 steps");

  std::vector<double> next(N);
  const double inv_h = 1.0 / h;
  double t = 0.0;
  while (t < T) {
    const double step_dt = (T - t < dt * (1.0 + 1e-12)) ? T - t : dt;
    double bad = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double c0 = sol.phi[i];
      const double left = i == 0 ? c0 : sol.phi[i - 1];
      const double right = i + 1 == N ? c0 : sol.phi[i + 1];
      const double dp = (right - c0) * inv_h;
      const double dm = (c0 - left) * inv_h;
      double rate = up_speed[i + 1] * std::max(dp, 0.0) + std::max(down_speed[i + 1], 0.0) * std::min(dp, 0.0);
      if (i > 0) rate += std::min(down_speed[i], 0.0) * std::min(dm, 0.0);
      bad += rate - rate;
      next[i] = c0 + step_dt * rate;
    }
    if (!std::isfinite(bad)) throw NumericalBlowup("non-finite value in radial step");
    sol.phi.swap(next);
    t = (T - t < dt * (1.0 + 1e-12)) ? T : t + dt;
    ++sol.steps;
  }
  sol.t = T;
  return sol;
}

struct EtaCurve {
  std::vector<double> s;
  std::vector<double> eta;
  bool absorbed = false;   // reached R and held there
  bool converged = false;  // settled at an equilibrium
};

// eta' = -c(eta) + (n-1)/eta, held at R once reached.
inline EtaCurve eta1_curve(double r0, const RadialProblem& pb, double t_max, std::size_t max_samples = 20000) {
  pb.validate();
  if (!(r0 > 0.0 && r0 <= pb.R)) throw std::out_of_range("eta1_curve needs r0 in (0, R]");
  auto f = [&](double y) { return -pb.c.value(y) + double(pb.n - 1) / y; };
  EtaCurve out;
  double s = 0.0, y = r0;
  out.s.push_back(s);
  out.eta.push_back(y);
  if (y >= pb.R && f(y) >= 0.0) {
    out.absorbed = true;
  }
  double dt = std::min(1e-3, t_max / 100.0);
  const double tol = 1e-11;
  while (s < t_max && !out.absorbed) {
    dt = std::min(dt, t_max - s);
    const double full = rk4_step(f, y, dt);
    const double half = rk4_step(f, rk4_step(f, y, 0.5 * dt), 0.5 * dt);
    const double err = std::abs(full - half);
    if (err > tol * std::max(1.0, std::abs(y)) && dt > 1e-14) {
      dt *= 0.5;
      continue;
    }
    if (dt <= 1e-14) {
      out.converged = true;
      break;
    }
    double ny = half;
    double ns = s + dt;
    if (ny >= pb.R) {
      // Land on R and stop moving.
      const double frac = bisect_predicate(
          [&](double tau) { return rk4_step(f, y, tau) >= pb.R; }, 0.0, dt);
      ns = s + frac;
      ny = pb.R;
      out.absorbed = true;
    }
    if (std::abs(ny - y) <= 1e-15 * std::max(1.0, y) && std::abs(f(ny)) <= 1e-12) out.converged = true;
    s = ns;
    y = ny;
    out.s.push_back(s);
    out.eta.push_back(y);
    if (err < 0.01 * tol) dt *= 2.0;
    if (out.converged) break;
    if (out.s.size() > max_samples) {
      // Thin the record, keeping the endpoints.
      std::vector<double> ts, es;
      for (std::size_t i = 0; i < out.s.size(); i += 2) {
        ts.push_back(out.s[i]);
        es.push_back(out.eta[i]);
      }
      if (ts.back() != s) {
        ts.push_back(s);
        es.push_back(y);
      }
      out.s.swap(ts);
      out.eta.swap(es);
    }
  }
  if (out.s.back() < t_max) {
    out.s.push_back(t_max);
    out.eta.push_back(y);
  }
  return out;
}

struct ComponentResidual {
  double lo = 0.0, hi = 0.0;
  double oscillation = 0.0;
  std::size_t nodes = 0;
};

// For each connected component of (0, R] minus the interior of A, the
// spread max phi - min phi over the nodes it contains. Nodes within
// `exclude` of a component end are skipped.
inline std::vector<ComponentResidual> component_constancy(const std::vector<double>& r, const std::vector<double>& phi,
                                                          const RegionClassification& rc, double exclude = 0.0) {
  std::vector<std::pair<double, double>> interiors;
  for (const auto& p : rc.pieces)
    if (p.label == Region::A && p.hi > p.lo) interiors.push_back({p.lo, p.hi});
  std::vector<ComponentResidual> comps;
  double start = 0.0;
  for (const auto& [lo, hi] : interiors) {
    if (lo > start) comps.push_back({start, lo, 0.0, 0});
    start = hi;
  }
  if (start < rc.R) comps.push_back({start, rc.R, 0.0, 0});
  for (auto& c : comps) {
    double mn = INFINITY, mx = -INFINITY;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double lo_gap = c.lo <= 0.0 ? INFINITY : r[i] - c.lo;
      const double hi_gap = c.hi >= rc.R ? INFINITY : c.hi - r[i];
      if (r[i] < c.lo || r[i] > c.hi || lo_gap < exclude || hi_gap < exclude) continue;
      mn = std::min(mn, phi[i]);
      mx = std::max(mx, phi[i]);
      ++c.nodes;
    }
    c.oscillation = c.nodes ? mx - mn : 0.0;
  }
  return comps;
}

// Piecewise forcing: (n-1)/a below a, (n-1)/r on [a, b], (n-1)/b above b.
inline RadialProfile toy_model_profile(double a, double b, int n) {
  if (!(a > 0.0 && b > a)) throw std::invalid_argument("toy model needs 0 < a < b");
  const double k = double(n - 1);
  return {[=](double r) {
            if (r < a) return k / a;
            if (r <= b) return k / r;
            return k / b;
          },
          [=](double r) {
            if (r <= a || r > b) return 0.0;
            return -k / (r * r);
          }};
}

inline ForcingSpec toy_model_c(double a, double b, int n) {
  return ForcingSpec::radial(toy_model_profile(a, b, n), ForcingKind::toy_model);
}

// Toy model with the middle branch lowered to (n-1)/r (1 - q sin^2(pi (r-a)/(b-a))),
// so that a and b stay in A while (a, b) lies in A-.
inline RadialProfile notched_toy_profile(double a, double b, int n, double depth) {
  if (!(a > 0.0 && b > a)) throw std::invalid_argument("notched toy model needs 0 < a < b");
  if (!(depth > 0.0 && depth < 1.0)) throw std::invalid_argument("notch depth must lie in (0, 1)");
  const double k = double(n - 1);
  const double w = M_PI / (b - a);
  return {[=](double r) {
            if (r < a) return k / a;
            if (r <= b) {
              const double s = std::sin(w * (r - a));
              return k / r * (1.0 - depth * s * s);
            }
            return k / b;
          },
          [=](double r) {
            if (r <= a || r > b) return 0.0;
            const double th = w * (r - a);
            const double s = std::sin(th);
            return -k / (r * r) * (1.0 - depth * s * s) - k / r * depth * std::sin(2.0 * th) * w;
          }};
}

inline ForcingSpec notched_toy_model_c(double a, double b, int n, double depth) {
  return ForcingSpec::radial(notched_toy_profile(a, b, n, depth));
}

// 1 on [0, a], smoothstep down to 0 on [a, b], 0 beyond.
inline std::function<double(double)> plateau_profile(double a, double b, double high = 1.0, double low = 0.0) {
  return [=](double r) { return low + (high - low) * (1.0 - smoothstep5((r - a) / (b - a))); };
}

}  // namespace fmcf
