#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fmcf/error.hpp"
#include "fmcf/forcing.hpp"
#include "fmcf/numerics.hpp"

namespace fmcf {

struct Rectangle {
  std::vector<double> half_extents;
};

struct Disk {
  double radius = 1.0;
};

// {|x2| < m x1^2 / 2 + k, |x1| < x_max}
struct Channel {
  double m = 1.0;
  double k = 1.0;
  double x_max = 1.0;

  double profile(double x1) const { return 0.5 * m * x1 * x1 + k; }
};

// Closest point of the untruncated parabola x2 = m s^2/2 + k to (x, y).
struct ParabolaFoot {
  double s = 0.0;
  double distance = 0.0;
};

namespace detail {

// Real roots of s^3 + p s + q = 0.
inline std::vector<double> depressed_cubic_roots(double p, double q) {
  std::vector<double> roots;
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    roots.push_back(std::cbrt(-0.5 * q + sq) + std::cbrt(-0.5 * q - sq));
  } else if (p == 0.0) {
    roots.push_back(0.0);
  } else {
    const double rad = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * rad), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int j = 0; j < 3; ++j) roots.push_back(rad * std::cos(phi - 2.0 * M_PI * j / 3.0));
  }
  for (double& s : roots) {
    for (int it = 0; it < 3; ++it) {
      const double f = s * s * s + p * s + q;
      const double df = 3.0 * s * s + p;
      if (df == 0.0) break;
      s -= f / df;
    }
  }
  return roots;
}

}  // namespace detail

// Stationary points of |(s, f(s)) - (x, y)|^2 solve
// m^2/2 s^3 + (1 + m(k - y)) s - x = 0.
inline std::vector<double> parabola_foot_candidates(double m, double k, double x, double y) {
  const double p = 2.0 * (1.0 + m * (k - y)) / (m * m);
  const double q = -2.0 * x / (m * m);
  return detail::depressed_cubic_roots(p, q);
}

inline ParabolaFoot parabola_closest(double m, double k, double x, double y,
                                     double s_lo = -std::numeric_limits<double>::infinity(),
                                     double s_hi = std::numeric_limits<double>::infinity()) {
  auto dist = [&](double s) { return std::hypot(s - x, 0.5 * m * s * s + k - y); };
  ParabolaFoot best{0.0, std::numeric_limits<double>::infinity()};
  std::vector<double> cand = parabola_foot_candidates(m, k, x, y);
  if (std::isfinite(s_lo)) cand.push_back(s_lo);
  if (std::isfinite(s_hi)) cand.push_back(s_hi);
  for (double s : cand) {
    s = std::clamp(s, s_lo, s_hi);
    const double d = dist(s);
    if (d < best.distance) best = {s, d};
  }
  return best;
}

// Closest boundary point and the outward normal there.
struct BoundaryFoot {
  std::vector<double> point;
  std::vector<double> normal;
  double distance = 0.0;
};

class DomainSpec {
 public:
  using Shape = std::variant<Rectangle, Disk, Channel>;

  static DomainSpec rectangle(std::vector<double> half_extents) {
    DomainSpec d;
    d.dim_ = int(half_extents.size());
    d.shape_ = Rectangle{std::move(half_extents)};
    d.validate();
    return d;
  }
  static DomainSpec disk(double radius, int dim = 2) {
    DomainSpec d;
    d.dim_ = dim;
    d.shape_ = Disk{radius};
    d.validate();
    return d;
  }
  static DomainSpec channel(double m, double k, double x_max) {
    DomainSpec d;
    d.dim_ = 2;
    d.shape_ = Channel{m, k, x_max};
    d.validate();
    return d;
  }

  int dim() const { return dim_; }
  const Shape& shape() const { return shape_; }
  const Rectangle* as_rectangle() const { return std::get_if<Rectangle>(&shape_); }
  const Disk* as_disk() const { return std::get_if<Disk>(&shape_); }
  const Channel* as_channel() const { return std::get_if<Channel>(&shape_); }

  void validate() const {
    if (dim_ < 2) throw std::invalid_argument("domain dimension must be >= 2");
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (auto* r = as_rectangle()) {
      for (double e : r->half_extents)
        if (!positive(e)) throw std::invalid_argument("rectangle half-extents must be positive");
    } else if (auto* d = as_disk()) {
      if (!positive(d->radius)) throw std::invalid_argument("disk radius must be positive");
    } else if (auto* c = as_channel()) {
      if (dim_ != 2) throw std::invalid_argument("channel domain is two-dimensional");
      if (!positive(c->m) || !positive(c->k) || !positive(c->x_max))
        throw std::invalid_argument("channel m, k, x_max must be positive");
    }
  }

  std::vector<double> bounding_half_extents() const {
    if (auto* r = as_rectangle()) return r->half_extents;
    if (auto* d = as_disk()) return std::vector<double>(dim_, d->radius);
    const auto& c = *as_channel();
    return {c.x_max, c.profile(c.x_max)};
  }

  bool contains(std::span<const double> x) const {
    if (auto* r = as_rectangle()) {
      for (int a = 0; a < dim_; ++a)
        if (!(std::abs(x[a]) < r->half_extents[a])) return false;
      return true;
    }
    if (auto* d = as_disk()) {
      double s = 0.0;
      for (int a = 0; a < dim_; ++a) s += x[a] * x[a];
      return std::sqrt(s) < d->radius;
    }
    const auto& c = *as_channel();
    return std::abs(x[0]) < c.x_max && std::abs(x[1]) < c.profile(x[0]);
  }

  // Intended for points outside or on the boundary.
  BoundaryFoot closest_boundary(std::span<const double> x) const {
    BoundaryFoot out;
    out.point.assign(x.begin(), x.end());
    out.normal.assign(dim_, 0.0);
    if (auto* d = as_disk()) {
      double rho = 0.0;
      for (int a = 0; a < dim_; ++a) rho += x[a] * x[a];
      rho = std::sqrt(rho);
      if (rho == 0.0) {
        out.normal[0] = 1.0;
        out.point[0] = d->radius;
        for (int a = 1; a < dim_; ++a) out.point[a] = 0.0;
        out.distance = d->radius;
        return out;
      }
      for (int a = 0; a < dim_; ++a) {
        out.normal[a] = x[a] / rho;
        out.point[a] = d->radius * out.normal[a];
      }
      out.distance = std::abs(rho - d->radius);
      return out;
    }
    if (auto* r = as_rectangle()) {
      bool outside = false;
      for (int a = 0; a < dim_; ++a) {
        const double e = r->half_extents[a];
        out.point[a] = std::clamp(x[a], -e, e);
        if (std::abs(x[a]) > e) outside = true;
      }
      if (outside) {
        finish_from_offset(x, out);
        return out;
      }
      int best = 0;
      double gap = std::numeric_limits<double>::infinity();
      for (int a = 0; a < dim_; ++a) {
        const double g = r->half_extents[a] - std::abs(x[a]);
        if (g < gap) {
          gap = g;
          best = a;
        }
      }
      const double sgn = x[best] >= 0.0 ? 1.0 : -1.0;
      out.point[best] = sgn * r->half_extents[best];
      out.normal[best] = sgn;
      out.distance = gap;
      return out;
    }
    const auto& c = *as_channel();
    const double sgn = x[1] >= 0.0 ? 1.0 : -1.0;
    const double y = std::abs(x[1]);
    const ParabolaFoot pf = parabola_closest(c.m, c.k, x[0], y, -c.x_max, c.x_max);
    const double fx = c.profile(c.x_max);
    const double wall_x = x[0] >= 0.0 ? c.x_max : -c.x_max;
    const double wall_y = std::clamp(y, -fx, fx);
    const double wall_d = std::hypot(x[0] - wall_x, y - wall_y);
    const bool on_wall = wall_d < pf.distance;
    if (on_wall) {
      out.point = {wall_x, sgn * wall_y};
    } else {
      out.point = {pf.s, sgn * c.profile(pf.s)};
    }
    const bool corner = on_wall ? (wall_y == fx) : (std::abs(pf.s) == c.x_max);
    const double d = std::min(wall_d, pf.distance);
    if (corner && d > 0.0) {
      finish_from_offset(x, out);
      return out;
    }
    if (on_wall) {
      out.normal = {x[0] >= 0.0 ? 1.0 : -1.0, 0.0};
    } else {
      const double slope = c.m * pf.s;
      const double nrm = std::hypot(slope, 1.0);
      out.normal = {-slope / nrm, sgn / nrm};
    }
    out.distance = d;
    return out;
  }

 private:
  void finish_from_offset(std::span<const double> x, BoundaryFoot& out) const {
    double s = 0.0;
    for (int a = 0; a < dim_; ++a) {
      out.normal[a] = x[a] - out.point[a];
      s += out.normal[a] * out.normal[a];
    }
    s = std::sqrt(s);
    for (int a = 0; a < dim_; ++a) out.normal[a] /= s;
    out.distance = s;
  }

  int dim_ = 2;
  Shape shape_ = Disk{};
};

// Ghost cell: outside the domain and in the 3^n neighbourhood of an inside cell.
struct GhostCell {
  std::size_t index = 0;
  std::vector<double> normal;
  std::size_t nearest_interior = 0;
  bool face_adjacent = false;
};

struct BoundaryCell {
  std::size_t index = 0;
  std::vector<double> normal;
  std::size_t nearest_interior = 0;
};

enum class CellKind : std::uint8_t { outside = 0, inside = 1, ghost = 2 };

class GridGeometry {
 public:
  static constexpr int kPadding = 2;

  const DomainSpec& spec() const { return spec_; }
  double h() const { return h_; }
  int dim() const { return spec_.dim(); }
  std::size_t size() const { return kind_.size(); }
  std::span<const int> extents() const { return extents_; }
  std::size_t stride(int axis) const { return strides_[axis]; }
  double cell_volume() const { return std::pow(h_, dim()); }

  CellKind kind(std::size_t idx) const { return CellKind(kind_[idx]); }
  bool inside(std::size_t idx) const { return kind_[idx] == std::uint8_t(CellKind::inside); }
  bool ghost(std::size_t idx) const { return kind_[idx] == std::uint8_t(CellKind::ghost); }
  std::span<const std::size_t> inside_cells() const { return inside_cells_; }
  std::span<const GhostCell> ghosts() const { return ghosts_; }

  std::vector<BoundaryCell> boundary_cells() const {
    std::vector<BoundaryCell> out;
    for (const auto& g : ghosts_)
      if (g.face_adjacent) out.push_back({g.index, g.normal, g.nearest_interior});
    return out;
  }

  // Mirror stencil of ghost g: (source cell, weight) pairs with positive
  // weights summing to one.
  std::span<const std::size_t> stencil_sources(std::size_t g) const {
    return {stencil_src_.data() + stencil_offset_[g], stencil_offset_[g + 1] - stencil_offset_[g]};
  }
  std::span<const double> stencil_weights(std::size_t g) const {
    return {stencil_w_.data() + stencil_offset_[g], stencil_offset_[g + 1] - stencil_offset_[g]};
  }

  double coord_of_index(int axis, long i) const { return (double(i) - centre_[axis]) * h_; }
  double coord(std::size_t idx, int axis) const {
    return coord_of_index(axis, long((idx / strides_[axis]) % std::size_t(extents_[axis])));
  }
  void center(std::size_t idx, std::span<double> out) const {
    for (int a = 0; a < dim(); ++a) out[a] = coord(idx, a);
  }
  std::vector<double> center(std::size_t idx) const {
    std::vector<double> x(dim());
    center(idx, x);
    return x;
  }
  int axis_index(std::size_t idx, int axis) const {
    return int((idx / strides_[axis]) % std::size_t(extents_[axis]));
  }

  // Nearest cell centre to x, if x lies within the grid box.
  std::optional<std::size_t> locate(std::span<const double> x) const {
    std::size_t idx = 0;
    for (int a = 0; a < dim(); ++a) {
      const long i = std::lround(x[a] / h_ + centre_[a]);
      if (i < 0 || i >= extents_[a]) return std::nullopt;
      idx += std::size_t(i) * strides_[a];
    }
    return idx;
  }

  // Offsets to the 3^n neighbours (excluding the cell itself).
  const std::vector<std::ptrdiff_t>& neighbour_offsets() const { return neighbour_offsets_; }

  friend GridGeometry build_grid(const DomainSpec& spec, double h, int min_cells);

 private:
  void build_ghost_stencil(std::size_t g_slot, const BoundaryFoot& foot, std::span<const double> gx);
  bool interpolation_weights(std::span<const double> y, std::vector<std::size_t>& src, std::vector<double>& w) const;

  DomainSpec spec_;
  double h_ = 0.0;
  std::vector<int> extents_;
  std::vector<std::size_t> strides_;
  std::vector<double> centre_;
  std::vector<std::uint8_t> kind_;
  std::vector<std::size_t> inside_cells_;
  std::vector<GhostCell> ghosts_;
  std::vector<std::size_t> stencil_offset_{0};
  std::vector<std::size_t> stencil_src_;
  std::vector<double> stencil_w_;
  std::vector<std::ptrdiff_t> neighbour_offsets_;
};

inline bool GridGeometry::interpolation_weights(std::span<const double> y, std::vector<std::size_t>& src,
                                                std::vector<double>& w) const {
  const int n = dim();
  std::vector<long> base(n);
  std::vector<double> frac(n);
  for (int a = 0; a < n; ++a) {
    const double t = y[a] / h_ + centre_[a];
    long j = long(std::floor(t));
    double f = t - double(j);
    if (f < 1e-9) f = 0.0;
    if (f > 1.0 - 1e-9) {
      f = 0.0;
      ++j;
    }
    if (j < 0 || j + 1 >= extents_[a]) return false;
    base[a] = j;
    frac[a] = f;
  }
  auto corner_index = [&](unsigned corner) {
    std::size_t idx = 0;
    for (int a = 0; a < n; ++a) idx += std::size_t(base[a] + long((corner >> a) & 1u)) * strides_[a];
    return idx;
  };
  // Multilinear over the whole cell.
  src.clear();
  w.clear();
  bool ok = true;
  for (unsigned corner = 0; corner < (1u << n) && ok; ++corner) {
    double weight = 1.0;
    for (int a = 0; a < n; ++a) weight *= ((corner >> a) & 1u) ? frac[a] : 1.0 - frac[a];
    if (weight == 0.0) continue;
    const std::size_t idx = corner_index(corner);
    if (!inside(idx)) ok = false;
    src.push_back(idx);
    w.push_back(weight);
  }
  if (ok) return true;
  // Barycentric weights on the Kuhn simplices of each reflected cell.
  std::vector<int> order(n);
  std::vector<double> g(n);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    for (int a = 0; a < n; ++a) g[a] = ((mask >> a) & 1u) ? 1.0 - frac[a] : frac[a];
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int l, int r) { return g[l] > g[r]; });
    src.clear();
    w.clear();
    ok = true;
    unsigned vertex = 0;
    for (int k = 0; k <= n && ok; ++k) {
      if (k > 0) vertex |= 1u << order[k - 1];
      const double hi = k == 0 ? 1.0 : g[order[k - 1]];
      const double lo = k == n ? 0.0 : g[order[k]];
      const double weight = hi - lo;
      if (weight <= 0.0) continue;
      const std::size_t idx = corner_index(vertex ^ mask);
      if (!inside(idx)) ok = false;
      src.push_back(idx);
      w.push_back(weight);
    }
    if (ok) return true;
  }
  return false;
}

inline void GridGeometry::build_ghost_stencil(std::size_t, const BoundaryFoot& foot, std::span<const double> gx) {
  const int n = dim();
  std::vector<double> y(n);
  for (int a = 0; a < n; ++a) y[a] = 2.0 * foot.point[a] - gx[a];

  std::vector<std::size_t> src;
  std::vector<double> w;
  // Mirror point first, then further in along the normal; u_n = 0 keeps the
  // value second order along that line.
  std::vector<double> z(n);
  bool ok = false;
  for (int s = 0; s <= 8 && !ok; ++s) {
    for (int a = 0; a < n; ++a) z[a] = y[a] - 0.5 * h_ * s * foot.normal[a];
    ok = interpolation_weights(z, src, w);
  }
  if (!ok) {
    // Nearest inside cell, marching from the mirror point along the inward normal.
    src.clear();
    w.clear();
    for (int s = 0; s <= 32 && src.empty(); ++s) {
      for (int a = 0; a < n; ++a) z[a] = y[a] - 0.5 * h_ * s * foot.normal[a];
      if (auto idx = locate(z); idx && inside(*idx)) {
        src.push_back(*idx);
        w.push_back(1.0);
      }
    }
    // Acute corners: nearest inside cell to the ghost itself.
    if (src.empty()) {
      std::vector<long> gi(n);
      for (int a = 0; a < n; ++a) gi[a] = std::lround(gx[a] / h_ + centre_[a]);
      for (long radius = 1; radius <= 6 && src.empty(); ++radius) {
        double best = INFINITY;
        std::size_t best_idx = 0;
        std::vector<long> off(n, -radius);
        while (true) {
          bool valid = true;
          std::size_t idx = 0;
          double d2 = 0.0;
          for (int a = 0; a < n; ++a) {
            const long j = gi[a] + off[a];
            if (j < 0 || j >= extents_[a]) valid = false;
            idx += std::size_t(std::max(j, 0L)) * strides_[a];
            d2 += double(off[a]) * double(off[a]);
          }
          if (valid && inside(idx) && d2 < best) {
            best = d2;
            best_idx = idx;
          }
          int a = n - 1;
          while (a >= 0 && off[a] == radius) off[a--] = -radius;
          if (a < 0) break;
          ++off[a];
        }
        if (best < INFINITY) {
          src.push_back(best_idx);
          w.push_back(1.0);
        }
      }
    }
    if (src.empty()) throw ConsistencyError("no inside cell found for a ghost mirror point");
  }
  double total = 0.0;
  for (double v : w) total += v;
  for (std::size_t i = 0; i < src.size(); ++i) {
    stencil_src_.push_back(src[i]);
    stencil_w_.push_back(w[i] / total);
  }
  stencil_offset_.push_back(stencil_src_.size());
}

// Cell-centred grid over the bounding box. Rectangles keep faces on cell
// faces; disks and channels use an odd cell count so the origin is a centre.
inline GridGeometry build_grid(const DomainSpec& spec, double h, int min_cells = 8) {
  if (!(std::isfinite(h) && h > 0.0)) throw std::invalid_argument("grid spacing h must be positive");
  spec.validate();
  GridGeometry g;
  g.spec_ = spec;
  g.h_ = h;
  const int n = spec.dim();
  const auto half = spec.bounding_half_extents();
  g.extents_.resize(n);
  g.strides_.resize(n);
  g.centre_.resize(n);
  double total = 1.0;
  for (int a = 0; a < n; ++a) {
    const double ratio = 2.0 * half[a] / h;
    long cells = long(std::ceil(ratio - 1e-9));
    if (!spec.as_rectangle() && cells % 2 == 0) ++cells;
    cells = std::max(cells, 1L);
    const long ext = cells + 2 * GridGeometry::kPadding;
    g.extents_[a] = int(ext);
    g.centre_[a] = 0.5 * double(ext - 1);
    total *= double(ext);
  }
  if (total > 4e8) throw std::invalid_argument("grid too large for the requested spacing");
  // Last axis is contiguous.
  std::size_t s = 1;
  for (int a = n - 1; a >= 0; --a) {
    g.strides_[a] = s;
    s *= std::size_t(g.extents_[a]);
  }
  g.kind_.assign(s, std::uint8_t(CellKind::outside));

  std::vector<double> x(n);
  std::vector<int> lo(n, std::numeric_limits<int>::max()), hi(n, -1);
  for (std::size_t idx = 0; idx < s; ++idx) {
    g.center(idx, x);
    if (spec.contains(x)) {
      g.kind_[idx] = std::uint8_t(CellKind::inside);
      g.inside_cells_.push_back(idx);
      for (int a = 0; a < n; ++a) {
        const int i = g.axis_index(idx, a);
        lo[a] = std::min(lo[a], i);
        hi[a] = std::max(hi[a], i);
      }
    }
  }
  for (int a = 0; a < n; ++a) {
    const int count = hi[a] >= lo[a] ? hi[a] - lo[a] + 1 : 0;
    if (count < min_cells)
      throw GridTooCoarse("grid has " + std::to_string(count) + " interior cells along axis " + std::to_string(a) +
                          ", need at least " + std::to_string(min_cells));
  }

  // Neighbour offsets over {-1,0,1}^n.
  const std::size_t combos = std::size_t(std::pow(3, n));
  std::vector<bool> face;
  for (std::size_t c = 0; c < combos; ++c) {
    std::size_t rem = c;
    std::ptrdiff_t off = 0;
    int nonzero = 0;
    for (int a = 0; a < n; ++a) {
      const int d = int(rem % 3) - 1;
      rem /= 3;
      off += d * std::ptrdiff_t(g.strides_[a]);
      nonzero += d != 0;
    }
    if (nonzero == 0) continue;
    g.neighbour_offsets_.push_back(off);
    face.push_back(nonzero == 1);
  }

  std::vector<std::uint8_t> face_flag(s, 0);
  for (std::size_t idx : g.inside_cells_) {
    for (std::size_t j = 0; j < g.neighbour_offsets_.size(); ++j) {
      const std::size_t nb = std::size_t(std::ptrdiff_t(idx) + g.neighbour_offsets_[j]);
      if (g.kind_[nb] == std::uint8_t(CellKind::inside)) continue;
      g.kind_[nb] = std::uint8_t(CellKind::ghost);
      if (face[j]) face_flag[nb] = 1;
    }
  }
  for (std::size_t idx = 0; idx < s; ++idx) {
    if (!g.ghost(idx)) continue;
    g.center(idx, x);
    BoundaryFoot foot = spec.closest_boundary(x);
    GhostCell gc;
    gc.index = idx;
    gc.normal = foot.normal;
    gc.face_adjacent = face_flag[idx] != 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a) {
      for (int sign : {-1, 1}) {
        const std::size_t nb = std::size_t(std::ptrdiff_t(idx) + sign * std::ptrdiff_t(g.strides_[a]));
        if (nb >= s || !g.inside(nb)) continue;
        const double align = -sign * foot.normal[a];
        if (align > best) {
          best = align;
          gc.nearest_interior = nb;
        }
      }
    }
    g.build_ghost_stencil(g.ghosts_.size(), foot, x);
    // Corner ghosts have no inside face neighbour; use the first mirror source.
    if (!std::isfinite(best)) gc.nearest_interior = g.stencil_src_[g.stencil_offset_[g.ghosts_.size()]];
    g.ghosts_.push_back(std::move(gc));
  }
  return g;
}

inline std::shared_ptr<const GridGeometry> make_grid(const DomainSpec& spec, double h, int min_cells = 8) {
  return std::make_shared<const GridGeometry>(build_grid(spec, h, min_cells));
}

struct BoundaryMetrics {
  double C0 = 0.0;
  double K0 = 0.0;
};

inline double principal_curvature_extreme(const DomainSpec& spec) {
  if (auto* d = spec.as_disk()) return -1.0 / d->radius;
  if (spec.as_rectangle()) return 0.0;
  return spec.as_channel()->m;
}

// Distance from (x, y) to the untruncated channel boundary |x2| = f(x1).
inline double channel_wall_distance(const Channel& c, double x, double y) {
  const double up = parabola_closest(c.m, c.k, x, y).distance;
  const double down = parabola_closest(c.m, c.k, x, -y).distance;
  return std::min(up, down);
}

// Largest diameter 2r with B(x - r n, r) inside the channel, for the
// boundary point x = (s, f(s)).
inline double channel_touching_diameter(const Channel& c, double s) {
  const double slope = c.m * s;
  const double nrm = std::hypot(slope, 1.0);
  const double nx = -slope / nrm, ny = 1.0 / nrm;
  const double bx = s, by = c.profile(s);
  auto fits = [&](double r) {
    const double cx = bx - r * nx, cy = by - r * ny;
    if (!(std::abs(cy) < c.profile(cx))) return false;
    return channel_wall_distance(c, cx, cy) >= r * (1.0 - 1e-12);
  };
  double hi = 2.0 * c.profile(c.x_max) + 2.0 * c.x_max;
  while (fits(hi)) hi *= 2.0;
  const double r = bisect_predicate([&](double r) { return !fits(r); }, 0.0, hi);
  return 2.0 * r;
}

inline double inscribed_ball_min(const DomainSpec& spec, std::size_t samples = 2001) {
  if (auto* d = spec.as_disk()) return 2.0 * d->radius;
  if (auto* r = spec.as_rectangle()) return 2.0 * *std::min_element(r->half_extents.begin(), r->half_extents.end());
  const Channel& c = *spec.as_channel();
  samples = std::max<std::size_t>(samples | 1u, 3);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    const double s = -c.x_max + 2.0 * c.x_max * double(i) / double(samples - 1);
    best = std::min(best, channel_touching_diameter(c, s));
  }
  return best;
}

inline BoundaryMetrics boundary_metrics(const DomainSpec& spec) {
  return {principal_curvature_extreme(spec), inscribed_ball_min(spec)};
}

struct ConditionReport {
  bool holds = false;
  double worst_margin = 0.0;
  std::vector<double> worst_point;
  BoundaryMetrics metrics;
};

// margin(x) = c^2/n - |Dc| - delta - max{0, C0|c| + 2 n C0/K0}
inline double forcing_margin(double c, double grad_norm, double delta, int n, const BoundaryMetrics& bm) {
  const double boundary = std::max(0.0, bm.C0 * std::abs(c) + 2.0 * n * bm.C0 / bm.K0);
  return c * c / n - grad_norm - delta - boundary;
}

inline ConditionReport check_forcing_condition(const DomainSpec& spec, const ForcingSpec& c, double delta,
                                               int sample_density = 64) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (sample_density < 2) throw std::invalid_argument("sample density must be >= 2");
  const int n = spec.dim();
  ConditionReport rep;
  rep.metrics = boundary_metrics(spec);
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const auto half = spec.bounding_half_extents();
  std::vector<int> idx(n, 0);
  std::vector<double> x(n);
  bool any = false;
  for (;;) {
    for (int a = 0; a < n; ++a) x[a] = -half[a] + (idx[a] + 0.5) * 2.0 * half[a] / sample_density;
    if (spec.contains(x)) {
      any = true;
      const double m = forcing_margin(c(x), c.gradient_norm(x), delta, n, rep.metrics);
      if (m < rep.worst_margin) {
        rep.worst_margin = m;
        rep.worst_point = x;
      }
    }
    int a = n - 1;
    while (a >= 0 && ++idx[a] == sample_density) idx[a--] = 0;
    if (a < 0) break;
  }
  if (!any) throw std::invalid_argument("no sample point inside the domain");
  rep.holds = rep.worst_margin > 0.0;
  return rep;
}

}  // namespace fmcf
