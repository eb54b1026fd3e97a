#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace fmcf {

// Quintic smoothstep on [0,1], C2 at both ends.
inline double smoothstep5(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * s * (s * (s * 6.0 - 15.0) + 10.0);
}

inline double smoothstep5_slope(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double t = s * (1.0 - s);
  return 30.0 * t * t;
}

// Largest slope of smoothstep5, attained at s = 1/2.
inline constexpr double kSmoothstep5MaxSlope = 1.875;

// Bisection for the switch point of a predicate that is false at lo and
// true at hi. Returns the bracket end where pred holds.
template <class Pred>
double bisect_predicate(Pred&& pred, double lo, double hi, int max_iter = 200) {
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (pred(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

// Root of f on [lo, hi] given a sign change.
template <class F>
double bisect_root(F&& f, double lo, double hi, int max_iter = 200) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  const bool lo_neg = flo < 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == lo_neg)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct Extremum {
  double x = 0.0;
  double value = 0.0;
};

// Golden-section search for a maximum of a unimodal f on [lo, hi].
template <class F>
Extremum golden_section_max(F&& f, double lo, double hi, double tol = 1e-13) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (std::abs(b - a) > tol * (1.0 + std::abs(a) + std::abs(b))) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  Extremum best{lo, f(lo)};
  for (double x : {c, d, hi}) {
    const double v = f(x);
    if (v > best.value) best = {x, v};
  }
  return best;
}

template <class F>
Extremum golden_section_min(F&& f, double lo, double hi, double tol = 1e-13) {
  auto neg = [&](double x) { return -f(x); };
  Extremum e = golden_section_max(neg, lo, hi, tol);
  e.value = -e.value;
  return e;
}

// Golden-section minimum in a caller-chosen precision (the double version
// above cannot resolve a flat minimum below about sqrt(machine epsilon)).
template <class Real, class F>
std::pair<Real, Real> golden_section_min_in(F&& f, Real lo, Real hi, Real tol) {
  const Real invphi = (std::sqrt(Real(5)) - Real(1)) / Real(2);
  Real a = lo, b = hi;
  Real c = b - invphi * (b - a), d = a + invphi * (b - a);
  Real fc = f(c), fd = f(d);
  while (b - a > tol * (Real(1) + std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
}

// Supremum of f over [lo, hi]: dense uniform sampling, then golden-section
// refinement around every sampled local maximum.
template <class F>
Extremum sampled_max(F&& f, double lo, double hi, std::size_t samples = 4096) {
  samples = std::max<std::size_t>(samples, 3);
  std::vector<double> xs(samples), vs(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    xs[i] = (i + 1 == samples) ? hi : lo + (hi - lo) * double(i) / double(samples - 1);
    vs[i] = f(xs[i]);
  }
  Extremum best{xs[0], vs[0]};
  for (std::size_t i = 0; i < samples; ++i) {
    if (vs[i] > best.value) best = {xs[i], vs[i]};
    const bool left_ok = i == 0 || vs[i] >= vs[i - 1];
    const bool right_ok = i + 1 == samples || vs[i] >= vs[i + 1];
    if (left_ok && right_ok) {
      const double a = xs[i == 0 ? 0 : i - 1];
      const double b = xs[i + 1 == samples ? i : i + 1];
      if (b > a) {
        Extremum e = golden_section_max(f, a, b);
        if (e.value > best.value) best = e;
      }
    }
  }
  return best;
}

// Fixed-shape summation: contiguous blocks summed left to right, block sums
// combined by a pairwise tree. The result depends only on the input order.
inline constexpr std::size_t kReductionBlock = 1024;

inline double pairwise_combine(std::span<const double> parts) {
  if (parts.empty()) return 0.0;
  std::vector<double> level(parts.begin(), parts.end());
  while (level.size() > 1) {
    std::vector<double> next((level.size() + 1) / 2);
    for (std::size_t i = 0; i < next.size(); ++i) {
      const std::size_t j = 2 * i;
      next[i] = (j + 1 < level.size()) ? level[j] + level[j + 1] : level[j];
    }
    level.swap(next);
  }
  return level[0];
}

inline double deterministic_sum(std::span<const double> values) {
  const std::size_t blocks = (values.size() + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks, 0.0);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t end = std::min(values.size(), (b + 1) * kReductionBlock);
    double s = 0.0;
    for (std::size_t i = b * kReductionBlock; i < end; ++i) s += values[i];
    partial[b] = s;
  }
  return pairwise_combine(partial);
}

// One classical Runge-Kutta step for a scalar autonomous ODE.
template <class F>
double rk4_step(F&& f, double y, double dt) {
  const double k1 = f(y);
  const double k2 = f(y + 0.5 * dt * k1);
  const double k3 = f(y + 0.5 * dt * k2);
  const double k4 = f(y + dt * k3);
  return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace fmcf
