#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fmcf/channel.hpp"
#include "fmcf/config.hpp"
#include "fmcf/error.hpp"
#include "fmcf/fields.hpp"
#include "fmcf/forcing.hpp"
#include "fmcf/geometry.hpp"
#include "fmcf/io.hpp"
#include "fmcf/numerics.hpp"
#include "fmcf/radial.hpp"
#include "fmcf/solver.hpp"

namespace fmcf {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct CaseReport {
  std::string name;
  std::string mode;
  std::vector<CheckResult> checks;
  std::vector<std::pair<std::string, double>> summary;
  std::vector<std::string> files;
  double seconds = 0.0;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
  }
  const CheckResult* check(const std::string& n) const {
    for (const auto& c : checks)
      if (c.name == n) return &c;
    return nullptr;
  }
  double value(const std::string& key) const {
    for (const auto& [k, v] : summary)
      if (k == key) return v;
    return NAN;
  }
  // measured <= threshold
  void add_upper(std::string n, double measured, double threshold, std::string detail = {}) {
    checks.push_back({std::move(n), measured <= threshold, measured, threshold, std::move(detail)});
  }
  void add_lower(std::string n, double measured, double threshold, std::string detail = {}) {
    checks.push_back({std::move(n), measured >= threshold, measured, threshold, std::move(detail)});
  }
  void add_flag(std::string n, bool ok, std::string detail = {}) {
    checks.push_back({std::move(n), ok, ok ? 1.0 : 0.0, 1.0, std::move(detail)});
  }
  void note(std::string key, double v) { summary.emplace_back(std::move(key), v); }
};

struct RunOptions {
  std::optional<unsigned> threads;
  std::optional<std::string> out_dir;
  bool write_files = true;
};

namespace cases {

inline bool has_check(const RunConfig& cfg, const std::string& name) {
  return std::find(cfg.checks.begin(), cfg.checks.end(), name) != cfg.checks.end();
}

inline ChannelParams channel_params(const RunConfig& cfg) { return {cfg.domain.m, cfg.domain.k}; }

inline ForcingSpec build_forcing(const RunConfig& cfg) {
  const auto& f = cfg.forcing;
  const int n = cfg.domain.dim;
  if (f.type == "constant") return ForcingSpec::constant(f.value);
  if (f.type == "toy_model") return toy_model_c(f.a, f.b, n);
  if (f.type == "notched_toy_model") return notched_toy_model_c(f.a, f.b, n, f.depth);
  if (f.type == "radial_table") return ForcingSpec::radial_samples(f.r, f.c);
  if (f.type == "channel_fraction") return ForcingSpec::constant(f.fraction / channel_r_min(channel_params(cfg)));
  throw std::invalid_argument("unknown forcing type " + f.type);
}

inline DomainSpec build_domain(const RunConfig& cfg, std::optional<double> x_max = std::nullopt) {
  const auto& d = cfg.domain;
  if (d.type == "disk") return DomainSpec::disk(d.radius, d.dim);
  if (d.type == "rectangle") return DomainSpec::rectangle(d.half_extents);
  const auto xm = d.x_max ? d.x_max : x_max;
  if (!xm) throw std::invalid_argument("channel domain needs x_max");
  return DomainSpec::channel(d.m, d.k, *xm);
}

inline double grid_spacing(const RunConfig& cfg, const DomainSpec& spec) {
  if (cfg.grid.h) return *cfg.grid.h;
  if (!cfg.grid.cells) throw std::invalid_argument("grid needs h or cells");
  return 2.0 * spec.bounding_half_extents()[0] / double(*cfg.grid.cells);
}

inline std::function<double(double)> radial_initial(const InitialConfig& u) {
  if (u.generator == "plateau") return plateau_profile(u.inner, u.outer, u.high, u.low);
  if (u.generator == "constant") {
    const double v = u.value;
    return [v](double) { return v; };
  }
  throw std::invalid_argument("generator " + u.generator + " is not radial");
}

inline double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline ScalarField build_initial(const RunConfig& cfg, std::shared_ptr<const GridGeometry> grid) {
  const auto& u = cfg.initial;
  ScalarField out(grid);
  if (u.generator == "constant" || u.generator == "plateau") {
    auto prof = radial_initial(u);
    out = ScalarField::sample(grid, [&](std::span<const double> x) { return prof(norm(x)); });
  } else if (u.generator == "neumann_polynomial") {
    const auto* d = grid->spec().as_disk();
    if (!d) throw std::invalid_argument("neumann_polynomial needs a disk domain");
    const double R = d->radius, amp = u.amplitude;
    out = ScalarField::sample(grid, [&](std::span<const double> x) {
      const double q = norm(x) * norm(x) / (R * R);
      return 0.5 * (3.0 * q * q - 2.0 * q * q * q) + amp * x[0] * x[1] / (R * R) * (1.0 - q) * (1.0 - q);
    });
  } else if (u.generator == "channel_arcs") {
    const auto p = channel_params(cfg);
    const double c = build_forcing(cfg).constant_value();
    const auto roots = solve_radii(p, c);
    const double l = u.l_fraction * (roots.a2 - roots.a1);
    return make_initial_data(p, roots.a1, l, l, u.alpha, u.beta, grid);
  } else {
    throw std::invalid_argument("generator " + u.generator + " needs a dedicated case");
  }
  fill_ghosts_in_place(out);
  return out;
}

inline std::string out_dir(const RunConfig& cfg, const RunOptions& opt) { return opt.out_dir.value_or(cfg.output); }

inline unsigned threads(const RunConfig& cfg, const RunOptions& opt) { return opt.threads.value_or(cfg.threads); }

inline void emit_csv(CaseReport& rep, const RunOptions& opt, const std::string& dir, const std::string& file,
                     const Table& t) {
  if (!opt.write_files) return;
  const auto path = std::filesystem::path(dir) / file;
  write_csv(t, path);
  rep.files.push_back(path.string());
}

inline void emit_pgm(CaseReport& rep, const RunOptions& opt, const std::string& dir, const std::string& file,
                     const ScalarField& u) {
  if (!opt.write_files || u.geometry().dim() != 2) return;
  const auto path = std::filesystem::path(dir) / file;
  write_pgm(u, path);
  rep.files.push_back(path.string());
}

inline Table diagnostics_table(const RunDiagnostics& d) {
  Table t{{"t", "max_w", "lipschitz_x", "sup_ut", "lyapunov_E", "sup_u"}, {}};
  for (const auto& r : d.rows) t.add({r.t, r.max_w, r.lip_x, r.sup_ut, r.lyapunov_E, r.sup_u});
  return t;
}

inline Table summary_table(const CaseReport& rep) {
  Table t;
  std::vector<double> row;
  for (const auto& [k, v] : rep.summary) {
    t.header.push_back(k);
    row.push_back(v);
  }
  t.add(std::move(row));
  return t;
}

// Worst relative rise of E between consecutive snapshots, against the
// allowance 1e-8 |E_k| + 1e-12.
inline void lyapunov_check(CaseReport& rep, const RunDiagnostics& d) {
  double worst = -INFINITY;
  bool ok = true;
  for (std::size_t k = 1; k < d.rows.size(); ++k) {
    const double prev = d.rows[k - 1].lyapunov_E, cur = d.rows[k].lyapunov_E;
    const double allowance = 1e-8 * std::abs(prev) + 1e-12;
    worst = std::max(worst, cur - prev - allowance);
    if (cur > prev + allowance) ok = false;
  }
  rep.checks.push_back({"lyapunov", ok, worst, 0.0, "max of E(t_k+1) - E(t_k) - allowance"});
}

// Upper endpoints of A pieces followed by A-: the radii where the limit
// profile can jump.
inline std::vector<double> jump_radii(const RegionClassification& rc) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < rc.pieces.size(); ++i)
    if (rc.pieces[i].label == Region::A && rc.pieces[i + 1].label == Region::A_minus) out.push_back(rc.pieces[i].hi);
  return out;
}

inline bool near_any(double r, const std::vector<double>& centres, double band) {
  for (double c : centres)
    if (std::abs(r - c) <= band) return true;
  return false;
}

inline RadialProblem radial_problem(const RunConfig& cfg) {
  if (cfg.domain.type != "disk") throw std::invalid_argument("radial problems need a disk domain");
  const ForcingSpec c = build_forcing(cfg);
  if (!c.profile()) throw std::invalid_argument("radial problems need a radial forcing");
  RadialProblem pb;
  pb.n = cfg.domain.dim;
  pb.R = cfg.domain.radius;
  pb.c = *c.profile();
  pb.u0 = radial_initial(cfg.initial);
  return pb;
}

inline double interpolate_nodes(const RadialSolution& s, double r) {
  const double h = s.r.size() > 1 ? s.r[1] - s.r[0] : 1.0;
  const double x = (r - s.r.front()) / h;
  if (x <= 0.0) return s.phi.front();
  const auto i = std::size_t(x);
  if (i + 1 >= s.r.size()) return s.phi.back();
  const double f = x - double(i);
  return (1.0 - f) * s.phi[i] + f * s.phi[i + 1];
}

// ---------------------------------------------------------------- radial-limit

inline CaseReport radial_limit(const RunConfig& cfg, const RunOptions& opt) {
  CaseReport rep{cfg.name, cfg.mode, {}, {}, {}, 0.0};
  const auto pb = radial_problem(cfg);
  const double h = cfg.radial.h;
  const auto rc = classify(pb, std::min(1e-4, h / 8.0));
  const auto sol = solve_radial(pb, h, cfg.radial.t_final, cfg.radial.cfl_safety);
  const double hs = sol.r[1] - sol.r[0];
  const double band = cfg.radial.band_cells * hs;
  const auto jumps = jump_radii(rc);

  Table prof{{"r", "d", "phi_infinity", "phi_T", "u0"}, {}};
  double worst = 0.0, worst_r = 0.0;
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    const double r = sol.r[i];
    const double lim = phi_infinity(r, pb, rc);
    prof.add({r, d_of(r, rc, pb.R), lim, sol.phi[i], pb.u0(r)});
    if (near_any(r, jumps, band)) continue;
    const double e = std::abs(sol.phi[i] - lim);
    if (e > worst) {
      worst = e;
      worst_r = r;
    }
  }
  rep.add_upper("radial_oracle", worst, cfg.radial.tolerance, "sup |phi(T) - phi_inf| off the jump bands");
  rep.note("sup_error", worst);
  rep.note("sup_error_r", worst_r);
  rep.note("steps", double(sol.steps));
  rep.note("dt", sol.dt);

  Table regions{{"lo", "hi", "label"}, {}};
  for (const auto& p : rc.pieces)
    regions.add({p.lo, p.hi, p.label == Region::A ? 0.0 : (p.label == Region::A_plus ? 1.0 : -1.0)});

  // Steepening across each jump band.
  if (!jumps.empty()) {
    const double lo_u = cfg.initial.low, hi_u = cfg.initial.high;
    auto band_lip = [&](const std::vector<double>& phi, double centre) {
      double m = 0.0;
      for (std::size_t i = 0; i + 1 < sol.r.size(); ++i)
        if (sol.r[i] >= centre - band && sol.r[i + 1] <= centre + band)
          m = std::max(m, std::abs(phi[i + 1] - phi[i]) / hs);
      return m;
    };
    std::vector<double> phi0(sol.r.size());
    for (std::size_t i = 0; i < sol.r.size(); ++i) phi0[i] = pb.u0(sol.r[i]);
    const double centre = jumps.front();
    const double lip0 = band_lip(phi0, centre), lipT = band_lip(sol.phi, centre);
    rep.add_lower("lipschitz_growth", lipT, 5.0 * lip0, "band Lipschitz at T vs 5x initial");
    const double jump = interpolate_nodes(sol, centre - band) - interpolate_nodes(sol, centre + band);
    rep.add_lower("jump", jump, 0.8 * (hi_u - lo_u), "u(a - band) - u(a + band)");
    rep.note("jump_radius", centre);
    rep.note("band_lipschitz_initial", lip0);
    rep.note("band_lipschitz_final", lipT);
    rep.note("band_jump", jump);
  }
  const std::string dir = out_dir(cfg, opt);
  emit_csv(rep, opt, dir, "radial_profile.csv", prof);
  emit_csv(rep, opt, dir, "regions.csv", regions);
  emit_csv(rep, opt, dir, "summary.csv", summary_table(rep));
  return rep;
}

// ------------------------------------------------------------ check-condition

inline CaseReport check_condition(const RunConfig& cfg, const RunOptions& opt) {
  CaseReport rep{cfg.name, cfg.mode, {}, {}, {}, 0.0};
  const auto spec = build_domain(cfg);
  const auto c = build_forcing(cfg);
  const auto res = check_forcing_condition(spec, c, *cfg.condition.delta, cfg.condition.sample_density);
  rep.add_flag("condition", res.holds == cfg.condition.expect_holds,
               res.holds ? "condition holds" : "condition fails");
  rep.note("holds", res.holds ? 1.0 : 0.0);
  rep.note("margin", res.worst_margin);
  rep.note("C0", res.metrics.C0);
  rep.note("K0", res.metrics.K0);
  for (std::size_t a = 0; a < res.worst_point.size(); ++a) rep.note("x" + std::to_string(a + 1), res.worst_point[a]);
  emit_csv(rep, opt, out_dir(cfg, opt), "condition.csv", summary_table(rep));
  return rep;
}

// --------------------------------------------------------------------- bounds

inline PredictedBounds bounds_for(const RunConfig& cfg, const GridGeometry& g, const ScalarField& u0,
                                  const ForcingSpec& c, double T) {
  return predicted_bounds(initial_stats(u0, c), forcing_stats(g, c), boundary_metrics(g.spec()), *cfg.condition.delta,
                          g.dim(), T);
}

inline CaseReport bounds(const RunConfig& cfg, const RunOptions& opt) {
  CaseReport rep{cfg.name, cfg.mode, {}, {}, {}, 0.0};
  const auto spec = build_domain(cfg);
  const auto grid = make_grid(spec, grid_spacing(cfg, spec), cfg.grid.min_cells);
  const auto c = build_forcing(cfg);
  const auto u0 = build_initial(cfg, grid);
  const double T = cfg.solver.t_final.value_or(1.0);
  const auto b = bounds_for(cfg, *grid, u0, c, T);
  rep.add_flag("finite", std::isfinite(b.M) && std::isfinite(b.global_L) && b.M >= 0.0);
  rep.note("M", b.M);
  rep.note("global_L", b.global_L);
  rep.note("local_CT", b.local_CT);
  rep.note("M_prime", b.M_prime);
  rep.note("sup_u0", b.u0.sup_u);
  rep.note("sup_grad_u0", b.u0.sup_grad);
  rep.note("sup_hess_u0", b.u0.sup_hess);
  rep.note("sup_c", b.c.sup_c);
  rep.note("sup_grad_c", b.c.sup_grad_c);
  rep.note("C0", b.metrics.C0);
  rep.note("K0", b.metrics.K0);
  rep.note("delta", b.delta);
  rep.note("T", T);
  emit_csv(rep, opt, out_dir(cfg, opt), "bounds.csv", summary_table(rep));
  return rep;
}

// ------------------------------------------------------------ channel-analyze

inline CaseReport channel_analyze(const RunConfig& cfg, const RunOptions& opt) {
  CaseReport rep{cfg.name, cfg.mode, {}, {}, {}, 0.0};
  if (cfg.domain.type != "channel") throw std::invalid_argument("channel-analyze needs a channel domain");
  if (cfg.forcing.type != "channel_fraction") throw std::invalid_argument("channel-analyze needs channel_fraction forcing");
  const auto p = channel_params(cfg);
  const double as = a_star(p);
  const double rmin = channel_r_min(p);
  const auto golden = golden_section_min_in<long double>([&](long double a) { return arc_radius(p, a); }, 1e-6L, 1e6L,
                                                        1e-16L);
  rep.add_upper("a_star_vs_golden", double(std::abs(golden.first - (long double)as)), 1e-9);
  rep.add_upper("r_slope_at_a_star", std::abs(arc_radius_slope(p, as)), 1e-10);

  const double c = cfg.forcing.fraction / rmin;
  const auto roots = solve_radii(p, c);
  const double target = 1.0 / c;
  rep.add_upper("root_residual", std::max(std::abs(arc_radius(p, roots.a1) - target),
                                          std::abs(arc_radius(p, roots.a2) - target)),
                1e-10 * target);
  rep.add_flag("root_order", roots.a1 < as && as < roots.a2);

  // Right-angle residual on 100 indices spanning both roots.
  double worst_angle = 0.0;
  const double s_lo = 0.5 * roots.a1, s_hi = 2.0 * roots.a2;
  Table family{{"a", "r", "r_slope", "centre", "right_angle_residual"}, {}};
  for (int i = 0; i < 100; ++i) {
    const double a = s_lo + (s_hi - s_lo) * double(i) / 99.0;
    const double res = right_angle_residual(p, a);
    worst_angle = std::max(worst_angle, res);
    family.add({a, arc_radius(p, a), arc_radius_slope(p, a), arc_centre(p, a), res});
  }
  rep.add_upper("right_angle", worst_angle, 1e-12);

  const double l = cfg.initial.l_fraction * (roots.a2 - roots.a1);
  const auto d0 = delta0(p, roots.a1, l, l);
  rep.add_lower("delta0_positive", d0.delta0, std::numeric_limits<double>::min());
  // Brute-force scan of sup h.
  double brute = -INFINITY;
  const std::size_t N = 1000000;
  for (std::size_t i = 0; i <= N; ++i) {
    const double a = (roots.a1 - l) + 2.0 * l * double(i) / double(N);
    brute = std::max(brute, barrier_ratio(p, roots.a1, a));
  }
  rep.add_upper("sup_h_vs_scan", std::abs(d0.sup_h - brute) / brute, 1e-6);

  rep.note("a_star", as);
  rep.note("r_min", rmin);
  rep.note("c", c);
  rep.note("a1", roots.a1);
  rep.note("a2", roots.a2);
  rep.note("l", l);
  rep.note("C", d0.C);
  rep.note("sup_h", d0.sup_h);
  rep.note("sup_h_scan", brute);
  rep.note("delta0", d0.delta0);

  // Masks of the barrier extremes and nesting across the barrier interval.
  const double h = cfg.grid.h.value_or(2.0 * l / 20.0);
  const double xmax = cfg.domain.x_max.value_or(channel_window(p, roots.a1 + l, h));
  const auto grid = make_grid(DomainSpec::channel(p.m, p.k, xmax), h, cfg.grid.min_cells);
  std::size_t nest_violations = 0;
  std::optional<ScalarField> prev;
  for (int i = 0; i <= 20; ++i) {
    const double a = roots.a1 - l + 2.0 * l * double(i) / 20.0;
    auto m = build_U_mask(p, a, grid);
    if (prev)
      for (std::size_t idx : grid->inside_cells())
        if ((*prev)[idx] > m.indicator[idx]) ++nest_violations;
    if (i == 0) emit_pgm(rep, opt, out_dir(cfg, opt), "mask_lower.pgm", m.indicator);
    if (i == 20) emit_pgm(rep, opt, out_dir(cfg, opt), "mask_upper.pgm", m.indicator);
    prev = std::move(m.indicator);
  }
  rep.add_upper("nesting", double(nest_violations), 0.0);
  emit_csv(rep, opt, out_dir(cfg, opt), "arc_family.csv", family);
  emit_csv(rep, opt, out_dir(cfg, opt), "summary.csv", summary_table(rep));
  return rep;
}

// ------------------------------------------------------------------ simulate

inline SolverConfig solver_config(const RunConfig& cfg, const GridGeometry& g, const ForcingSpec& c,
                                  const RunOptions& opt) {
  SolverConfig sc;
  sc.epsilon = cfg.solver.epsilon;
  sc.cfl_safety = cfg.solver.cfl_safety;
  sc.snapshot_every = cfg.solver.snapshot_every;
  sc.threads = threads(cfg, opt);
  if (cfg.solver.steps) {
    sc.t_final = double(*cfg.solver.steps) * cfl_dt(sc, g, c);
  } else if (cfg.solver.t_final) {
    sc.t_final = *cfg.solver.t_final;
  } else {
    throw std::invalid_argument("solver needs t_final or steps");
  }
  return sc;
}

// Random smooth field: sum of a few cosine modes.
struct CosineField {
  std::vector<std::array<double, 4>> modes;  // amplitude, k1, k2, phase

  static CosineField draw(std::mt19937_64& rng, int count, double amplitude, double max_k) {
    std::uniform_real_distribution<double> amp(-amplitude, amplitude), k(-max_k, max_k), ph(0.0, 2.0 * M_PI);
    CosineField f;
    for (int i = 0; i < count; ++i) f.modes.push_back({amp(rng), k(rng), k(rng), ph(rng)});
    return f;
  }
  double operator()(std::span<const double> x) const {
    double s = 0.0;
    for (const auto& m : modes) s += m[0] * std::cos(m[1] * x[0] + m[2] * x[1] + m[3]);
    return s;
  }
};

inline void comparison_case(const RunConfig& cfg, const RunOptions& opt, CaseReport& rep,
                            std::shared_ptr<const GridGeometry> grid, const ForcingSpec& c) {
  const auto sc = solver_config(cfg, *grid, c, opt);
  std::mt19937_64 rng(cfg.comparison.seed);
  std::uniform_real_distribution<double> offset(0.0, cfg.comparison.max_offset), bump(0.0, 0.2);
  Table t{{"pair", "offset", "worst_violation", "t_worst"}, {}};
  double worst = -INFINITY;
  int failures = 0;
  for (int k = 0; k < cfg.comparison.pairs; ++k) {
    const auto base = CosineField::draw(rng, cfg.comparison.modes, 0.5, 3.0);
    const auto extra = CosineField::draw(rng, 1, 1.0, 3.0);
    const double off = offset(rng), height = bump(rng);
    auto low = ScalarField::sample(grid, base);
    auto high = ScalarField::sample(grid, [&](std::span<const double> x) {
      const double e = extra(x) / std::max(std::abs(extra.modes[0][0]), 1e-300);
      return base(x) + off + height * 0.5 * (1.0 + e);
    });
    fill_ghosts_in_place(low);
    fill_ghosts_in_place(high);
    const auto r = comparison_report(low, high, sc, c);
    worst = std::max(worst, r.worst_violation);
    if (!r.ordered) ++failures;
    t.add({double(k), off, r.worst_violation, r.t_worst});
  }
  rep.add_upper("comparison", worst, kOrderTolerance, "largest low - high over all pairs and steps");
  rep.note("pairs", double(cfg.comparison.pairs));
  rep.note("failures", double(failures));
  rep.note("worst_violation", worst);
  emit_csv(rep, opt, out_dir(cfg, opt), "comparison.csv", t);
}

inline void channel_convergence_case(const RunConfig& cfg, const RunOptions& opt, CaseReport& rep) {
  if (cfg.initial.generator != "channel_arcs") throw std::invalid_argument("channel convergence needs channel_arcs data");
  if (!cfg.grid.h) throw std::invalid_argument("channel convergence needs grid.h");
  const auto p = channel_params(cfg);
  const auto c = build_forcing(cfg);
  const auto roots = solve_radii(p, c.constant_value());
  const double a1 = roots.a1;
  const double l = cfg.initial.l_fraction * (roots.a2 - roots.a1);
  const double h = *cfg.grid.h;
  const auto& cc = cfg.channel;
  if (2.0 * l / h < cc.min_barrier_cells)
    throw GridTooCoarse("grid resolves l1 + l2 with fewer than " + std::to_string(cc.min_barrier_cells) + " cells");
  const auto d0 = delta0(p, a1, l, l);
  const double delta = cc.delta_fraction * d0.delta0;
  const double xmax = cfg.domain.x_max.value_or(channel_window(p, a1 + l, h));
  const auto grid = make_grid(DomainSpec::channel(p.m, p.k, xmax), h, cfg.grid.min_cells);
  const auto u0 = make_initial_data(p, a1, l, l, cfg.initial.alpha, cfg.initial.beta, grid);

  SolverConfig sc;
  sc.epsilon = cfg.solver.epsilon;
  sc.cfl_safety = cfg.solver.cfl_safety;
  sc.threads = threads(cfg, opt);
  sc.t_final = cfg.solver.t_final.value_or(cc.decay / delta);
  if (delta * sc.t_final < cc.decay * (1.0 - 1e-12))
    throw std::invalid_argument("t_final too short for the requested barrier decay");
  sc.snapshot_every = cfg.solver.snapshot_every > 0.0 ? cfg.solver.snapshot_every : sc.t_final / 100.0;
  sc.pin_mask = channel_pin_mask(*grid, p, a1 + l, cc.pin_margin_cells * h);
  std::vector<std::uint8_t> support(sc.pin_mask.size());
  for (std::size_t i = 0; i < support.size(); ++i) support[i] = sc.pin_mask[i] ? 0 : 1;

  const BarrierSchedule sub{a1, l, l, delta, BarrierSide::sub};
  const BarrierSchedule sup{a1, l, l, delta, BarrierSide::super};
  const double alpha = cfg.initial.alpha, beta = cfg.initial.beta;
  const double band = cc.band_cells * h;
  Table t{{"t", "metric", "a_lower", "a_upper", "missing_inner", "excess_outer"}, {}};
  bool sandwich = true;
  auto observer = [&](double time, const ScalarField& u) {
    const double m = convergence_metric(u, p, a1, alpha, beta, band, support);
    const double lo = barrier_a(sub, time), hi = barrier_a(sup, time);
    const auto s = sandwich_check(u, p, lo, hi, alpha, beta, cc.sandwich_margin_cells * h);
    sandwich = sandwich && s.holds;
    t.add({time, m, lo, hi, double(s.missing_inner), double(s.excess_outer)});
  };
  const auto res = run(u0, sc, c, observer);

  const double final_metric = t.rows.back()[1];
  rep.add_upper("convergence_metric", final_metric, cc.metric_threshold * (beta - alpha));
  double worst_rise = -INFINITY;
  for (std::size_t k = 1; k < t.rows.size(); ++k)
    if (t.rows[k - 1][0] >= cc.transient_fraction * sc.t_final * (1.0 - 1e-12))
      worst_rise = std::max(worst_rise, t.rows[k][1] - t.rows[k - 1][1]);
  rep.add_upper("metric_nonincreasing", worst_rise, 1e-12, "largest rise after the transient");
  rep.add_flag("sandwich", sandwich);
  lyapunov_check(rep, res.diagnostics);

  rep.note("a1", a1);
  rep.note("a2", roots.a2);
  rep.note("l", l);
  rep.note("delta0", d0.delta0);
  rep.note("delta", delta);
  rep.note("T", sc.t_final);
  rep.note("h", h);
  rep.note("x_max", xmax);
  rep.note("epsilon", sc.epsilon_for(*grid));
  rep.note("initial_metric", t.rows.front()[1]);
  rep.note("final_metric", final_metric);
  rep.note("steps", double(res.steps));
  const std::string dir = out_dir(cfg, opt);
  emit_csv(rep, opt, dir, "channel_convergence.csv", t);
  emit_csv(rep, opt, dir, "diagnostics.csv", diagnostics_table(res.diagnostics));
  emit_pgm(rep, opt, dir, "initial.pgm", u0);
  emit_pgm(rep, opt, dir, "final.pgm", res.final);
  emit_pgm(rep, opt, dir, "limit.pgm", build_U_mask(p, a1, grid).indicator);
  emit_csv(rep, opt, dir, "summary.csv", summary_table(rep));
}

inline CaseReport simulate(const RunConfig& cfg, const RunOptions& opt) {
  CaseReport rep{cfg.name, cfg.mode, {}, {}, {}, 0.0};
  if (has_check(cfg, "channel_convergence")) {
    channel_convergence_case(cfg, opt, rep);
    return rep;
  }
  const auto spec = build_domain(cfg);
  const auto grid = make_grid(spec, grid_spacing(cfg, spec), cfg.grid.min_cells);
  const auto c = build_forcing(cfg);
  if (has_check(cfg, "comparison")) {
    comparison_case(cfg, opt, rep, grid, c);
    return rep;
  }
  const auto u0 = build_initial(cfg, grid);
  const auto sc = solver_config(cfg, *grid, c, opt);
  const double eps = sc.epsilon_for(*grid);
  const bool exact = has_check(cfg, "constant_exact");
  const double c0 = c.is_constant() ? c.constant_value() : NAN;
  const double u00 = cfg.initial.value;
  double worst_exact = 0.0;
  auto observer = [&](double t, const ScalarField& u) {
    if (!exact) return;
    const double want = u00 + c0 * eps * t;
    for (std::size_t i : grid->inside_cells())
      worst_exact = std::max(worst_exact, std::abs(u[i] - want) / std::max(std::abs(want), 1e-300));
  };
  if (exact && !(c.is_constant() && cfg.initial.generator == "constant"))
    throw std::invalid_argument("constant_exact needs constant data and forcing");
  const auto res = run(u0, sc, c, observer);
  const auto& rows = res.diagnostics.rows;

  rep.note("h", grid->h());
  rep.note("epsilon", eps);
  rep.note("dt", res.dt);
  rep.note("steps", double(res.steps));
  rep.note("T", sc.t_final);
  rep.note("inside_cells", double(grid->inside_cells().size()));

  if (has_check(cfg, "lyapunov")) lyapunov_check(rep, res.diagnostics);
  if (exact) {
    rep.add_upper("constant_exact", worst_exact, 1e-12, "relative deviation from u0 + c eps t");
    rep.note("constant_exact_error", worst_exact);
  }
  if (has_check(cfg, "global_lipschitz") || has_check(cfg, "time_lipschitz")) {
    const auto b = bounds_for(cfg, *grid, u0, c, sc.t_final);
    rep.note("M", b.M);
    rep.note("global_L", b.global_L);
    double lip_max = 0.0, lip_early = 0.0, sup_ut = 0.0;
    for (const auto& r : rows) {
      lip_max = std::max(lip_max, r.lip_x);
      if (r.t <= cfg.lipschitz.early_time * (1.0 + 1e-12)) lip_early = std::max(lip_early, r.lip_x);
      sup_ut = std::max(sup_ut, r.sup_ut);
    }
    rep.note("lipschitz_max", lip_max);
    rep.note("lipschitz_early", lip_early);
    rep.note("sup_ut", sup_ut);
    if (has_check(cfg, "global_lipschitz")) {
      rep.add_upper("global_lipschitz", lip_max, b.global_L, "max lipschitz_x vs predicted global L");
      rep.add_upper("no_growth", lip_max, cfg.lipschitz.growth_factor * lip_early, "max over run vs early window");
    }
    if (has_check(cfg, "time_lipschitz")) {
      const double cap = cfg.lipschitz.bound_factor * b.M + forcing_stats(*grid, c).sup_c * eps;
      rep.add_upper("time_lipschitz", sup_ut, cap, "sup |du|/dt vs 1.2 M + c_max eps");
    }
  }
  if (has_check(cfg, "max_w_nonincreasing")) {
    double worst = -INFINITY;
    for (std::size_t k = 1; k < rows.size(); ++k)
      worst = std::max(worst, rows[k].max_w - rows[k - 1].max_w - 1e-8 * std::max(1.0, rows[k - 1].max_w));
    rep.add_upper("max_w_nonincreasing", worst, 0.0, "largest rise of max_w beyond 1e-8");
  }
  if (has_check(cfg, "radial_crosscheck")) {
    const auto pb = radial_problem(cfg);
    const auto rc = classify(pb, std::min(1e-4, cfg.radial.h / 8.0));
    const auto sol = solve_radial(pb, cfg.radial.h, sc.t_final, cfg.radial.cfl_safety);
    const double band = cfg.radial.band_cells * (sol.r[1] - sol.r[0]);
    const auto jumps = jump_radii(rc);
    double worst = 0.0, worst_r = 0.0;
    Table t{{"r", "u_2d", "phi_radial"}, {}};
    for (std::size_t i : grid->inside_cells()) {
      const auto x = grid->center(i);
      const double r = norm(x);
      const double ref = interpolate_nodes(sol, r);
      if (std::abs(x[1]) < 0.5 * grid->h() && x[0] >= 0.0) t.add({r, res.final[i], ref});
      if (near_any(r, jumps, band)) continue;
      const double e = std::abs(res.final[i] - ref);
      if (e > worst) {
        worst = e;
        worst_r = r;
      }
    }
    rep.add_upper("radial_crosscheck", worst, cfg.radial.tolerance, "sup |u_2d - phi_radial| off the jump bands");
    rep.note("crosscheck_error", worst);
    rep.note("crosscheck_error_r", worst_r);
    emit_csv(rep, opt, out_dir(cfg, opt), "ray.csv", t);
  }
  const std::string dir = out_dir(cfg, opt);
  emit_csv(rep, opt, dir, "diagnostics.csv", diagnostics_table(res.diagnostics));
  emit_pgm(rep, opt, dir, "initial.pgm", u0);
  emit_pgm(rep, opt, dir, "final.pgm", res.final);
  emit_csv(rep, opt, dir, "summary.csv", summary_table(rep));
  return rep;
}

}  // namespace cases

inline CaseReport run_case(const RunConfig& cfg, const RunOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  CaseReport rep;
  if (cfg.mode == "radial-limit") rep = cases::radial_limit(cfg, opt);
  else if (cfg.mode == "check-condition") rep = cases::check_condition(cfg, opt);
  else if (cfg.mode == "bounds") rep = cases::bounds(cfg, opt);
  else if (cfg.mode == "channel-analyze") rep = cases::channel_analyze(cfg, opt);
  else if (cfg.mode == "simulate") rep = cases::simulate(cfg, opt);
  else throw std::invalid_argument("unknown mode " + cfg.mode);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

// One-line verdict: "PASS name [check ...]".
inline std::string summary_line(const CaseReport& rep) {
  std::string s = rep.passed() ? "PASS " : "FAIL ";
  s += rep.name.empty() ? rep.mode : rep.name;
  for (const auto& c : rep.checks) {
    char buf[160];
    std::snprintf(buf, sizeof buf, " %s=%s(%.6g/%.6g)", c.name.c_str(), c.pass ? "ok" : "FAIL", c.measured,
                  c.threshold);
    s += buf;
  }
  return s;
}

}  // namespace fmcf
