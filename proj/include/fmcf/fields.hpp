#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "fmcf/geometry.hpp"

namespace fmcf {

// Values on every cell of the grid box. Inside and ghost cells are
// meaningful; outside cells hold whatever was last written (zero by default).
class ScalarField {
 public:
  explicit ScalarField(std::shared_ptr<const GridGeometry> geometry, double fill = 0.0)
      : geometry_(std::move(geometry)), values_(geometry_->size(), fill) {}

  // Samples f at inside and ghost cell centres.
  static ScalarField sample(std::shared_ptr<const GridGeometry> geometry,
                            const std::function<double(std::span<const double>)>& f) {
    ScalarField u(std::move(geometry));
    const auto& g = u.geometry();
    std::vector<double> x(g.dim());
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.kind(i) == CellKind::outside) continue;
      g.center(i, x);
      u.values_[i] = f(x);
    }
    return u;
  }

  const GridGeometry& geometry() const { return *geometry_; }
  const std::shared_ptr<const GridGeometry>& geometry_ptr() const { return geometry_; }
  std::span<double> values() { return values_; }
  std::vector<double>& storage() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  bool finite() const {
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (geometry_->kind(i) != CellKind::outside && !std::isfinite(values_[i])) return false;
    return true;
  }

  double max_inside() const {
    double m = -INFINITY;
    for (std::size_t i : geometry_->inside_cells()) m = std::max(m, values_[i]);
    return m;
  }
  double min_inside() const {
    double m = INFINITY;
    for (std::size_t i : geometry_->inside_cells()) m = std::min(m, values_[i]);
    return m;
  }

 private:
  std::shared_ptr<const GridGeometry> geometry_;
  std::vector<double> values_;
};

struct VectorField {
  std::vector<ScalarField> components;
};

inline void fill_ghosts_in_place(ScalarField& u) {
  const auto& g = u.geometry();
  const auto ghosts = g.ghosts();
  auto vals = u.values();
  for (std::size_t k = 0; k < ghosts.size(); ++k) {
    const auto src = g.stencil_sources(k);
    const auto w = g.stencil_weights(k);
    double v = 0.0;
    for (std::size_t j = 0; j < src.size(); ++j) v += w[j] * vals[src[j]];
    vals[ghosts[k].index] = v;
  }
}

// Zero normal derivative: each ghost takes the value at its mirror point
// across the boundary (pure reflection on rectangles).
inline ScalarField neumann_fill_ghosts(const ScalarField& u) {
  ScalarField out = u;
  fill_ghosts_in_place(out);
  return out;
}

namespace detail {

inline double second_diff(std::span<const double> u, std::size_t i, std::size_t s, double inv_h2) {
  return (u[i + s] - 2.0 * u[i] + u[i - s]) * inv_h2;
}

inline double cross_diff(std::span<const double> u, std::size_t i, std::size_t sa, std::size_t sb,
                         double inv_4h2) {
  return (u[i + sa + sb] - u[i + sa - sb] - u[i - sa + sb] + u[i - sa - sb]) * inv_4h2;
}

}  // namespace detail

inline VectorField grad_central(const ScalarField& u) {
  const auto& g = u.geometry();
  const int n = g.dim();
  VectorField out;
  for (int a = 0; a < n; ++a) out.components.emplace_back(u.geometry_ptr());
  const auto v = u.values();
  const double inv2h = 0.5 / g.h();
  for (std::size_t i : g.inside_cells())
    for (int a = 0; a < n; ++a) {
      const std::size_t s = g.stride(a);
      out.components[a][i] = (v[i + s] - v[i - s]) * inv2h;
    }
  return out;
}

// b^{ij}(Du) u_ij with b(p) = I - p (x) p / (eps^2 + |p|^2).
inline double bij_at(std::span<const double> v, std::size_t i, const GridGeometry& g, double eps) {
  const int n = g.dim();
  const double h = g.h();
  const double inv2h = 0.5 / h, inv_h2 = 1.0 / (h * h), inv_4h2 = 0.25 / (h * h);
  double p[8];
  double q = eps * eps;
  for (int a = 0; a < n; ++a) {
    const std::size_t s = g.stride(a);
    p[a] = (v[i + s] - v[i - s]) * inv2h;
    q += p[a] * p[a];
  }
  const double inv_q = 1.0 / q;
  double acc = 0.0;
  for (int a = 0; a < n; ++a) {
    acc += (1.0 - p[a] * p[a] * inv_q) * detail::second_diff(v, i, g.stride(a), inv_h2);
    for (int b = a + 1; b < n; ++b)
      acc -= 2.0 * p[a] * p[b] * inv_q * detail::cross_diff(v, i, g.stride(a), g.stride(b), inv_4h2);
  }
  return acc;
}

inline ScalarField bij_contract(const ScalarField& u, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const auto& g = u.geometry();
  if (g.dim() > 8) throw std::invalid_argument("dimension above 8 is not supported");
  ScalarField out(u.geometry_ptr());
  for (std::size_t i : g.inside_cells()) out[i] = bij_at(u.values(), i, g, eps);
  return out;
}

// Same quantity written as w * div(Du / w), w = sqrt(eps^2 + |Du|^2), with
// face fluxes: normal derivative across the face, tangential derivatives
// averaged from the two adjacent cells.
inline ScalarField curvature_divergence_form(const ScalarField& u, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const auto& g = u.geometry();
  const int n = g.dim();
  const double h = g.h();
  const auto v = u.values();
  auto central = [&](std::size_t i, int b) {
    const std::size_t s = g.stride(b);
    return (v[i + s] - v[i - s]) / (2.0 * h);
  };
  auto face_flux = [&](std::size_t lo, int a) {
    const std::size_t hi = lo + g.stride(a);
    const double normal = (v[hi] - v[lo]) / h;
    double w2 = eps * eps + normal * normal;
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      const double t = 0.5 * (central(lo, b) + central(hi, b));
      w2 += t * t;
    }
    return normal / std::sqrt(w2);
  };
  ScalarField out(u.geometry_ptr());
  for (std::size_t i : g.inside_cells()) {
    double div = 0.0, w2 = eps * eps;
    for (int a = 0; a < n; ++a) {
      div += (face_flux(i, a) - face_flux(i - g.stride(a), a)) / h;
      const double p = central(i, a);
      w2 += p * p;
    }
    out[i] = std::sqrt(w2) * div;
  }
  return out;
}

// Rouy-Tourin magnitude oriented for u_t = +c|Du| with c >= 0: per axis the
// larger of the uphill one-sided slopes toward either neighbour.
inline double upwind_magnitude_at(std::span<const double> v, std::size_t i, const GridGeometry& g) {
  const double inv_h = 1.0 / g.h();
  double acc = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    const std::size_t s = g.stride(a);
    const double back = (v[i - s] - v[i]) * inv_h;
    const double fwd = (v[i + s] - v[i]) * inv_h;
    const double m = std::max({back, fwd, 0.0});
    acc += m * m;
  }
  return std::sqrt(acc);
}

inline ScalarField upwind_gradient_magnitude(const ScalarField& u) {
  const auto& g = u.geometry();
  ScalarField out(u.geometry_ptr());
  for (std::size_t i : g.inside_cells()) out[i] = upwind_magnitude_at(u.values(), i, g);
  return out;
}

inline ScalarField w_field(const ScalarField& u, double eps) {
  const auto& g = u.geometry();
  ScalarField out(u.geometry_ptr());
  const auto v = u.values();
  const double inv2h = 0.5 / g.h();
  for (std::size_t i : g.inside_cells()) {
    double q = eps * eps;
    for (int a = 0; a < g.dim(); ++a) {
      const std::size_t s = g.stride(a);
      const double p = (v[i + s] - v[i - s]) * inv2h;
      q += p * p;
    }
    out[i] = std::sqrt(q);
  }
  return out;
}

// max |u_i - u_j| / h over inside cells i and their face neighbours j
// (inside or ghost).
inline double lipschitz_x(const ScalarField& u) {
  const auto& g = u.geometry();
  const auto v = u.values();
  double m = 0.0;
  for (std::size_t i : g.inside_cells())
    for (int a = 0; a < g.dim(); ++a) {
      const std::size_t s = g.stride(a);
      m = std::max({m, std::abs(v[i + s] - v[i]), std::abs(v[i] - v[i - s])});
    }
  return m / g.h();
}

}  // namespace fmcf
