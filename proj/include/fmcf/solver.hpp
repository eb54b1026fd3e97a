#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fmcf/error.hpp"
#include "fmcf/fields.hpp"
#include "fmcf/forcing.hpp"
#include "fmcf/geometry.hpp"
#include "fmcf/numerics.hpp"
#include "fmcf/parallel.hpp"

namespace fmcf {

struct SolverConfig {
  std::optional<double> epsilon;  // defaults to h
  double cfl_safety = 0.25;
  double t_final = 1.0;
  double snapshot_every = 0.0;  // <= 0: only the initial and final states
  std::vector<std::uint8_t> pin_mask;  // nonzero = held fixed; empty = none
  unsigned threads = 1;
  bool keep_snapshots = false;

  double epsilon_for(const GridGeometry& g) const { return epsilon.value_or(g.h()); }

  void validate(const GridGeometry& g) const {
    const double eps = epsilon_for(g);
    if (!(std::isfinite(eps) && eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw std::invalid_argument("cfl_safety must lie in (0, 1]");
    if (!(std::isfinite(t_final) && t_final > 0.0)) throw std::invalid_argument("t_final must be positive");
    if (!std::isfinite(snapshot_every)) throw std::invalid_argument("snapshot_every must be finite");
    if (!pin_mask.empty() && pin_mask.size() != g.size())
      throw std::invalid_argument("pin mask size does not match the grid");
  }
};

struct DiagnosticsRow {
  double t = 0.0;
  double max_w = 0.0;
  double lip_x = 0.0;
  double sup_ut = 0.0;
  double lyapunov_E = 0.0;
  double sup_u = 0.0;
};

struct RunDiagnostics {
  std::vector<DiagnosticsRow> rows;
};

struct Snapshot {
  double t;
  ScalarField u;
};

// Forcing sampled at the inside cells.
inline std::vector<double> sample_forcing(const GridGeometry& g, const ForcingSpec& c) {
  std::vector<double> out(g.size(), 0.0);
  std::vector<double> x(g.dim());
  for (std::size_t i : g.inside_cells()) {
    g.center(i, x);
    out[i] = c(x);
  }
  return out;
}

inline double max_abs_inside(const GridGeometry& g, std::span<const double> v) {
  double m = 0.0;
  for (std::size_t i : g.inside_cells()) m = std::max(m, std::abs(v[i]));
  return m;
}

inline double cfl_dt(double safety, double h, int n, double c_max) {
  if (!std::isfinite(c_max) || !std::isfinite(h) || !(h > 0.0))
    throw std::invalid_argument("cfl_dt needs finite h > 0 and finite max|c|");
  const double parabolic = h * h / (2.0 * n * 2.0);
  const double advective = c_max > 0.0 ? h / (c_max * std::sqrt(double(n))) : std::numeric_limits<double>::infinity();
  return safety * std::min(parabolic, advective);
}

inline double cfl_dt(const SolverConfig& config, const GridGeometry& g, const ForcingSpec& c) {
  const auto cs = sample_forcing(g, c);
  return cfl_dt(config.cfl_safety, g.h(), g.dim(), max_abs_inside(g, cs));
}

// Explicit Euler update of the regularized equation over the active cells
// (inside and not pinned). Work is split into fixed chunks of rows so the
// result is independent of the worker count.
class Stepper {
 public:
  Stepper(std::shared_ptr<const GridGeometry> geometry, const ForcingSpec& c, double eps,
          std::span<const std::uint8_t> pin = {}, unsigned threads = 1)
      : geometry_(std::move(geometry)), eps_(eps), pool_(threads) {
    const auto& g = *geometry_;
    if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (g.dim() > 6) throw std::invalid_argument("stepper supports dimensions 2 to 6");
    if (!pin.empty() && pin.size() != g.size()) throw std::invalid_argument("pin mask size does not match the grid");
    c_ = sample_forcing(g, c);
    c_max_ = max_abs_inside(g, c_);
    // Contiguous runs of active cells along the last axis.
    std::size_t run_start = 0;
    bool open = false;
    std::size_t prev = 0;
    for (std::size_t i : g.inside_cells()) {
      const bool active = pin.empty() || pin[i] == 0;
      if (!active) continue;
      if (open && i == prev + 1) {
        prev = i;
        continue;
      }
      if (open) runs_.push_back({run_start, prev + 1});
      run_start = prev = i;
      open = true;
    }
    if (open) runs_.push_back({run_start, prev + 1});
    std::size_t acc = 0;
    chunk_begin_.push_back(0);
    for (std::size_t r = 0; r < runs_.size(); ++r) {
      acc += runs_[r].end - runs_[r].begin;
      active_cells_ += runs_[r].end - runs_[r].begin;
      if (acc >= kChunkCells) {
        chunk_begin_.push_back(r + 1);
        acc = 0;
      }
    }
    if (chunk_begin_.back() != runs_.size()) chunk_begin_.push_back(runs_.size());
    chunk_rate_.assign(chunk_begin_.size() - 1, 0.0);
    chunk_bad_.assign(chunk_begin_.size() - 1, 0.0);
  }

  double c_max() const { return c_max_; }
  double epsilon() const { return eps_; }
  std::span<const double> forcing_cells() const { return c_; }
  std::size_t active_cells() const { return active_cells_; }

  // next = cur + dt * rate(cur) on active cells; cur gets its ghosts filled.
  // Other cells of next are left untouched. Returns max |rate|.
  double advance(ScalarField& cur, std::vector<double>& next, double dt) {
    fill_ghosts_in_place(cur);
    return sweep(cur.values(), next.data(), dt);
  }

  // max |rate| without updating anything; ghosts must be filled.
  double rate_sup(const ScalarField& cur) { return sweep(cur.values(), nullptr, 0.0); }

 private:
  struct Run {
    std::size_t begin, end;
  };
  static constexpr std::size_t kChunkCells = 4096;

  double sweep(std::span<const double> u, double* out, double dt) {
    const int n = geometry_->dim();
    const std::size_t chunks = chunk_rate_.size();
    auto task = [&](std::size_t k) {
      switch (n) {
        case 2: kernel<2>(u, out, dt, k); break;
        case 3: kernel<3>(u, out, dt, k); break;
        case 4: kernel<4>(u, out, dt, k); break;
        case 5: kernel<5>(u, out, dt, k); break;
        default: kernel<6>(u, out, dt, k); break;
      }
    };
    pool_.run(chunks, task);
    double m = 0.0;
    for (std::size_t k = 0; k < chunks; ++k) {
      if (!std::isfinite(chunk_bad_[k]))
        throw NumericalBlowup("non-finite value in explicit step (CFL violation or bad input)");
      m = std::max(m, chunk_rate_[k]);
    }
    return m;
  }

  template <int Dim>
  void kernel(std::span<const double> u, double* out, double dt, std::size_t chunk) {
    const auto& g = *geometry_;
    const double h = g.h();
    const double inv2h = 0.5 / h, inv_h = 1.0 / h, inv_h2 = 1.0 / (h * h), inv_4h2 = 0.25 / (h * h);
    const double eps2 = eps_ * eps_;
    std::array<std::size_t, Dim> s;
    for (int a = 0; a < Dim; ++a) s[a] = g.stride(a);
    const double* v = u.data();
    const double* cc = c_.data();
    double max_rate = 0.0, bad = 0.0;
    for (std::size_t r = chunk_begin_[chunk]; r < chunk_begin_[chunk + 1]; ++r) {
      for (std::size_t i = runs_[r].begin; i < runs_[r].end; ++i) {
        double p[Dim];
        double q = eps2;
        for (int a = 0; a < Dim; ++a) {
          p[a] = (v[i + s[a]] - v[i - s[a]]) * inv2h;
          q += p[a] * p[a];
        }
        const double inv_q = 1.0 / q;
        double curv = 0.0, up = 0.0;
        for (int a = 0; a < Dim; ++a) {
          const double vm = v[i - s[a]], vp = v[i + s[a]], vc = v[i];
          curv += (1.0 - p[a] * p[a] * inv_q) * ((vp - 2.0 * vc + vm) * inv_h2);
          for (int b = a + 1; b < Dim; ++b) {
            const double uab =
                (v[i + s[a] + s[b]] - v[i + s[a] - s[b]] - v[i - s[a] + s[b]] + v[i - s[a] - s[b]]) * inv_4h2;
            curv -= 2.0 * p[a] * p[b] * inv_q * uab;
          }
          const double m = std::max(std::max((vm - vc) * inv_h, (vp - vc) * inv_h), 0.0);
          up += m * m;
        }
        const double rate = curv + cc[i] * std::sqrt(eps2 + up);
        bad += rate - rate;
        max_rate = std::max(max_rate, std::abs(rate));
        if (out) out[i] = v[i] + dt * rate;
      }
    }
    chunk_rate_[chunk] = max_rate;
    chunk_bad_[chunk] = bad;
  }

  std::shared_ptr<const GridGeometry> geometry_;
  double eps_;
  std::vector<double> c_;
  double c_max_ = 0.0;
  std::vector<Run> runs_;
  std::vector<std::size_t> chunk_begin_;
  std::vector<double> chunk_rate_, chunk_bad_;
  std::size_t active_cells_ = 0;
  WorkerPool pool_;
};

// One step from u (ghosts are filled on a copy).
inline ScalarField step(const ScalarField& u, double dt, const ForcingSpec& c, double eps,
                        std::span<const std::uint8_t> pin = {}) {
  Stepper st(u.geometry_ptr(), c, eps, pin);
  ScalarField cur = u;
  ScalarField next = u;
  st.advance(cur, next.storage(), dt);
  return next;
}

// E = h^n sum_inside [ sqrt(eps^2 + |Du|^2) - c u ], ghosts must be filled.
inline double lyapunov(const ScalarField& u, std::span<const double> c_cells, double eps) {
  const auto& g = u.geometry();
  const auto v = u.values();
  const double inv2h = 0.5 / g.h();
  std::vector<double> terms;
  terms.reserve(g.inside_cells().size());
  for (std::size_t i : g.inside_cells()) {
    double q = eps * eps;
    for (int a = 0; a < g.dim(); ++a) {
      const std::size_t s = g.stride(a);
      const double p = (v[i + s] - v[i - s]) * inv2h;
      q += p * p;
    }
    terms.push_back(std::sqrt(q) - c_cells[i] * v[i]);
  }
  return g.cell_volume() * deterministic_sum(terms);
}

inline double lyapunov(const ScalarField& u, const ForcingSpec& c, double eps) {
  return lyapunov(u, sample_forcing(u.geometry(), c), eps);
}

inline DiagnosticsRow diagnose(const ScalarField& u, std::span<const double> c_cells, double eps, double t,
                               double sup_ut) {
  DiagnosticsRow row;
  row.t = t;
  const auto w = w_field(u, eps);
  row.max_w = w.max_inside();
  row.lip_x = lipschitz_x(u);
  row.sup_ut = sup_ut;
  row.lyapunov_E = lyapunov(u, c_cells, eps);
  row.sup_u = max_abs_inside(u.geometry(), u.values());
  return row;
}

struct RunResult {
  ScalarField final;
  RunDiagnostics diagnostics;
  std::vector<Snapshot> snapshots;
  std::size_t steps = 0;
  double dt = 0.0;
};

using SnapshotObserver = std::function<void(double t, const ScalarField& u)>;

inline std::vector<double> snapshot_times(double t_final, double every) {
  std::vector<double> ts;
  if (every > 0.0) {
    for (std::size_t k = 1;; ++k) {
      const double t = double(k) * every;
      if (t >= t_final * (1.0 - 1e-12)) break;
      ts.push_back(t);
    }
  }
  ts.push_back(t_final);
  return ts;
}

inline constexpr double kMaxSteps = 1e9;

inline RunResult run(const ScalarField& u0, const SolverConfig& config, const ForcingSpec& c,
                     const SnapshotObserver& observer = {}) {
  const auto& g = u0.geometry();
  config.validate(g);
  if (!u0.finite()) throw std::invalid_argument("initial field has non-finite values");
  const double eps = config.epsilon_for(g);
  Stepper stepper(u0.geometry_ptr(), c, eps, config.pin_mask, config.threads);
  const double dt = cfl_dt(config.cfl_safety, g.h(), g.dim(), stepper.c_max());
  if (config.t_final / dt > kMaxSteps) throw std::invalid_argument("run would exceed 1e9 steps");

  RunResult res{u0, {}, {}, 0, dt};
  ScalarField& u = res.final;
  fill_ghosts_in_place(u);
  std::vector<double> next = u.storage();
  const auto cells = stepper.forcing_cells();
  auto record = [&](double t, double sup_ut) {
    fill_ghosts_in_place(u);
    res.diagnostics.rows.push_back(diagnose(u, cells, eps, t, sup_ut));
    if (config.keep_snapshots) res.snapshots.push_back({t, u});
    if (observer) observer(t, u);
  };
  record(0.0, stepper.rate_sup(u));

  double t0 = 0.0;
  for (double target : snapshot_times(config.t_final, config.snapshot_every)) {
    const double span = target - t0;
    const auto full = std::size_t(std::floor(span / dt * (1.0 + 1e-12)));
    const double rest = span - double(full) * dt;
    const std::size_t count = full + (rest > 1e-9 * dt ? 1 : 0);
    double sup_ut = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      const double step_dt = j < full ? dt : rest;
      sup_ut = std::max(sup_ut, stepper.advance(u, next, step_dt));
      u.storage().swap(next);
      ++res.steps;
    }
    t0 = target;
    record(target, sup_ut);
  }
  return res;
}

struct ComparisonReport {
  bool ordered = true;
  double worst_violation = 0.0;
  double t_worst = 0.0;
};

inline constexpr double kOrderTolerance = 1e-12;

// Runs both data in lockstep and checks low <= high + 1e-12 on inside cells
// after every step.
inline ComparisonReport comparison_report(const ScalarField& low0, const ScalarField& high0,
                                          const SolverConfig& config, const ForcingSpec& c) {
  const auto& g = low0.geometry();
  if (&g != &high0.geometry()) throw std::invalid_argument("comparison fields must share a grid");
  for (std::size_t i : g.inside_cells())
    if (low0[i] > high0[i]) throw std::invalid_argument("comparison requires low <= high initially");
  config.validate(g);
  const double eps = config.epsilon_for(g);
  Stepper sl(low0.geometry_ptr(), c, eps, config.pin_mask, config.threads);
  Stepper sh(low0.geometry_ptr(), c, eps, config.pin_mask, config.threads);
  const double dt = cfl_dt(config.cfl_safety, g.h(), g.dim(), sl.c_max());
  if (config.t_final / dt > kMaxSteps) throw std::invalid_argument("run would exceed 1e9 steps");
  ScalarField lo = low0, hi = high0;
  std::vector<double> nlo = lo.storage(), nhi = hi.storage();
  ComparisonReport rep;
  const auto full = std::size_t(std::floor(config.t_final / dt * (1.0 + 1e-12)));
  const double rest = config.t_final - double(full) * dt;
  const std::size_t count = full + (rest > 1e-9 * dt ? 1 : 0);
  double t = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const double step_dt = j < full ? dt : rest;
    sl.advance(lo, nlo, step_dt);
    sh.advance(hi, nhi, step_dt);
    lo.storage().swap(nlo);
    hi.storage().swap(nhi);
    t += step_dt;
    for (std::size_t i : g.inside_cells()) {
      const double gap = lo[i] - hi[i];
      if (gap > rep.worst_violation) {
        rep.worst_violation = gap;
        rep.t_worst = t;
      }
    }
  }
  rep.ordered = rep.worst_violation <= kOrderTolerance;
  return rep;
}

inline bool comparison_check(const ScalarField& low0, const ScalarField& high0, const SolverConfig& config,
                             const ForcingSpec& c) {
  return comparison_report(low0, high0, config, c).ordered;
}

// Sup norms of the initial data and forcing.
struct InitialStats {
  double sup_u = 0.0;
  double sup_grad = 0.0;
  double sup_hess = 0.0;    // largest absolute Hessian entry
  double sup_c_w = -1.0;    // sup c sqrt(1 + |Du0|^2); negative when unknown
};

struct ForcingStats {
  double sup_c = 0.0;
  double sup_grad_c = 0.0;
};

// Discrete sup norms over inside cells; u0 must have ghosts filled.
inline InitialStats initial_stats(const ScalarField& u0, const ForcingSpec& c) {
  const auto& g = u0.geometry();
  const auto v = u0.values();
  const int n = g.dim();
  const double h = g.h();
  InitialStats st;
  st.sup_c_w = 0.0;
  std::vector<double> x(n);
  for (std::size_t i : g.inside_cells()) {
    st.sup_u = std::max(st.sup_u, std::abs(v[i]));
    double q = 0.0;
    for (int a = 0; a < n; ++a) {
      const std::size_t sa = g.stride(a);
      const double p = (v[i + sa] - v[i - sa]) / (2.0 * h);
      q += p * p;
      st.sup_hess = std::max(st.sup_hess, std::abs(detail::second_diff(v, i, sa, 1.0 / (h * h))));
      for (int b = a + 1; b < n; ++b)
        st.sup_hess = std::max(st.sup_hess, std::abs(detail::cross_diff(v, i, sa, g.stride(b), 0.25 / (h * h))));
    }
    st.sup_grad = std::max(st.sup_grad, std::sqrt(q));
    g.center(i, x);
    st.sup_c_w = std::max(st.sup_c_w, std::abs(c(x)) * std::sqrt(1.0 + q));
  }
  return st;
}

inline ForcingStats forcing_stats(const GridGeometry& g, const ForcingSpec& c) {
  ForcingStats st;
  std::vector<double> x(g.dim());
  for (std::size_t i : g.inside_cells()) {
    g.center(i, x);
    st.sup_c = std::max(st.sup_c, std::abs(c(x)));
    st.sup_grad_c = std::max(st.sup_grad_c, c.gradient_norm(x));
  }
  return st;
}

struct PredictedBounds {
  double M = 0.0;
  double global_L = 0.0;
  double local_CT = 0.0;
  double M_prime = 0.0;
  std::string global_branch;
  InitialStats u0;
  ForcingStats c;
  BoundaryMetrics metrics;
  double delta = 0.0;
  int n = 2;
  double T = 0.0;
};

inline PredictedBounds predicted_bounds(const InitialStats& u0, const ForcingStats& c, const BoundaryMetrics& bm,
                                        double delta, int n, double T) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive for the global bound");
  if (!(bm.K0 > 0.0)) throw std::invalid_argument("K0 must be positive");
  PredictedBounds pb{};
  pb.u0 = u0;
  pb.c = c;
  pb.metrics = bm;
  pb.delta = delta;
  pb.n = n;
  pb.T = T;
  const double c_w = u0.sup_c_w >= 0.0 ? u0.sup_c_w : c.sup_c * std::sqrt(1.0 + u0.sup_grad * u0.sup_grad);
  pb.M = double(n) * n * u0.sup_hess + c_w;
  const double floor_L = u0.sup_grad + 1.0;
  const double C0 = bm.C0, K0 = bm.K0;
  if (C0 > 0.0) {
    pb.global_L = std::max(floor_L, (C0 * K0 / 4.0 + 1.0) * 2.0 * pb.M * c.sup_c / (n * delta));
    pb.global_branch = "convex-defect";
  } else if (C0 == 0.0) {
    // C0 replaced by delta1 > 0, the condition then holding with delta/2.
    const double delta1 = delta / (2.0 * (c.sup_c + 2.0 * n / K0));
    pb.global_L = std::max(floor_L, (delta1 * K0 / 4.0 + 1.0) * 2.0 * pb.M * c.sup_c / (n * 0.5 * delta));
    pb.global_branch = "flat";
  } else {
    pb.global_L = std::max(floor_L, 2.0 * pb.M * c.sup_c / (n * delta));
    pb.global_branch = "interior";
  }
  const double aC0 = std::abs(C0);
  pb.M_prime = 2.0 * n * (aC0 + 1.0) / K0 + c.sup_grad_c + (aC0 + 1.0) * c.sup_c + 1.0;
  pb.local_CT = std::exp(pb.M_prime * T) * ((std::max(C0, 0.0) + 1.0) * K0 / 4.0 + 1.0) * (u0.sup_grad + 1.0);
  return pb;
}

}  // namespace fmcf
