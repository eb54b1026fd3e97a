#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace fmcf {

using Json = nlohmann::ordered_json;

struct ConfigIssue {
  std::string path;  // JSON pointer, "" for the document
  int line = 0;      // 1-based, 0 when unknown
  std::string message;

  std::string str() const {
    std::string s;
    if (line > 0) s += "line " + std::to_string(line) + ": ";
    return s + (path.empty() ? "/" : path) + ": " + message;
  }
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<ConfigIssue>& v) {
    std::string s = "invalid config";
    for (const auto& i : v) s += "\n  " + i.str();
    return s;
  }
  std::vector<ConfigIssue> issues_;
};

struct DomainConfig {
  std::string type = "disk";
  int dim = 2;
  double radius = 1.0;
  std::vector<double> half_extents;
  double m = 1.0;
  double k = 1.0;
  std::optional<double> x_max;  // channel window; derived from the barriers when absent
  bool operator==(const DomainConfig&) const = default;
};

struct GridConfig {
  std::optional<double> h;
  std::optional<int> cells;  // across the first axis of the bounding box
  int min_cells = 8;
  bool operator==(const GridConfig&) const = default;
};

struct ForcingConfig {
  std::string type = "constant";
  double value = 0.0;
  double a = 0.0, b = 0.0, depth = 0.5;
  double fraction = 0.9;  // channel_fraction: c = fraction / r_min
  std::vector<double> r, c;
  bool operator==(const ForcingConfig&) const = default;
};

struct InitialConfig {
  std::string generator = "constant";
  double value = 0.0;
  double inner = 0.0, outer = 0.0, high = 1.0, low = 0.0;
  double amplitude = 0.2;
  double l_fraction = 0.3;
  double alpha = 0.0, beta = 1.0;
  bool operator==(const InitialConfig&) const = default;
};

struct SolverBlock {
  std::optional<double> epsilon;
  double cfl_safety = 0.25;
  std::optional<double> t_final;
  std::optional<long> steps;  // alternative to t_final: run this many full steps
  double snapshot_every = 0.0;
  bool operator==(const SolverBlock&) const = default;
};

struct ConditionConfig {
  std::optional<double> delta;
  bool expect_holds = true;
  int sample_density = 64;
  bool operator==(const ConditionConfig&) const = default;
};

struct RadialConfig {
  double h = 1.0 / 400.0;
  double t_final = 10.0;
  double band_cells = 6.0;
  double cfl_safety = 0.9;
  double tolerance = 0.05;
  bool operator==(const RadialConfig&) const = default;
};

struct ChannelConfig {
  double delta_fraction = 0.5;
  double decay = 5.0;  // delta * T
  double band_cells = 6.0;
  double pin_margin_cells = 4.0;
  double sandwich_margin_cells = 2.0;
  double metric_threshold = 0.02;
  double transient_fraction = 0.1;
  double min_barrier_cells = 10.0;
  bool operator==(const ChannelConfig&) const = default;
};

struct ComparisonConfig {
  int pairs = 50;
  std::uint64_t seed = 1;
  double max_offset = 0.2;
  int modes = 3;
  bool operator==(const ComparisonConfig&) const = default;
};

struct LipschitzConfig {
  double early_time = 1.0;
  double growth_factor = 1.2;
  double bound_factor = 1.2;
  bool operator==(const LipschitzConfig&) const = default;
};

struct RunConfig {
  std::string name;
  std::string mode;  // simulate, radial-limit, channel-analyze, check-condition, bounds
  DomainConfig domain;
  GridConfig grid;
  ForcingConfig forcing;
  InitialConfig initial;
  SolverBlock solver;
  ConditionConfig condition;
  RadialConfig radial;
  ChannelConfig channel;
  ComparisonConfig comparison;
  LipschitzConfig lipschitz;
  std::vector<std::string> checks;
  std::string output = "out";
  unsigned threads = 1;
  bool operator==(const RunConfig&) const = default;
};

inline const std::vector<std::string>& known_modes() {
  static const std::vector<std::string> v{"simulate", "radial-limit", "channel-analyze", "check-condition", "bounds"};
  return v;
}

inline const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> v{"lyapunov",       "global_lipschitz",  "time_lipschitz",
                                          "max_w_nonincreasing", "constant_exact", "radial_crosscheck",
                                          "comparison",     "channel_convergence"};
  return v;
}

namespace detail {

// Line of every key and array element, addressed by JSON pointer.
inline std::map<std::string, int> json_line_map(const std::string& text) {
  std::map<std::string, int> lines;
  struct Frame {
    bool object;
    std::string path;
    long index = -1;
    std::string key;
  };
  std::vector<Frame> stack;
  int line = 1;
  bool expect_key = false;
  auto escape = [](const std::string& k) {
    std::string out;
    for (char ch : k) {
      if (ch == '~') out += "~0";
      else if (ch == '/') out += "~1";
      else out += ch;
    }
    return out;
  };
  auto element_path = [&]() -> std::string {
    if (stack.empty()) return "";
    const auto& f = stack.back();
    return f.object ? f.path + "/" + escape(f.key) : f.path + "/" + std::to_string(f.index);
  };
  auto begin_value = [&]() {
    if (!stack.empty() && !stack.back().object) {
      ++stack.back().index;
      lines.emplace(element_path(), line);
    }
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch == '\n') {
      ++line;
    } else if (ch == '"') {
      std::string s;
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\' && i + 1 < text.size()) s += text[++i];
        else s += text[i];
      }
      if (expect_key) {
        stack.back().key = s;
        lines.emplace(element_path(), line);
        expect_key = false;
      } else {
        begin_value();
      }
    } else if (ch == '{' || ch == '[') {
      begin_value();
      const std::string p = element_path();
      stack.push_back(Frame{ch == '{', stack.empty() ? "" : p, -1, {}});
      expect_key = ch == '{';
    } else if (ch == '}' || ch == ']') {
      if (!stack.empty()) stack.pop_back();
      expect_key = false;
    } else if (ch == ',') {
      expect_key = !stack.empty() && stack.back().object;
    } else if (!std::isspace(static_cast<unsigned char>(ch)) && ch != ':') {
      // Bare scalar: consume it.
      begin_value();
      while (i + 1 < text.size() && !std::strchr(",]}\n \t\r", text[i + 1])) ++i;
    }
  }
  return lines;
}

class Reader {
 public:
  Reader(const Json& j, std::string path, std::vector<ConfigIssue>& issues, const std::map<std::string, int>& lines)
      : j_(j), path_(std::move(path)), issues_(issues), lines_(lines) {}

  bool is_object() const { return j_.is_object(); }

  void error(const std::string& key, const std::string& msg) const {
    const std::string p = key.empty() ? path_ : path_ + "/" + key;
    issues_.push_back({p, line_of(p), msg});
  }

  template <class T>
  void get(const std::string& key, T& out) {
    used_.insert(key);
    if (!j_.contains(key)) return;
    read_value(key, j_.at(key), out);
  }

  template <class T>
  void get(const std::string& key, std::optional<T>& out) {
    used_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    T v{};
    if (read_value(key, j_.at(key), v)) out = v;
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  std::optional<Reader> child(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) return std::nullopt;
    if (!j_.at(key).is_object()) {
      error(key, "expected an object");
      return std::nullopt;
    }
    return Reader(j_.at(key), path_ + "/" + key, issues_, lines_);
  }

  // Reports every key not read so far.
  void finish(const std::set<std::string>& also_allowed = {}) {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key()) && !also_allowed.count(it.key())) error(it.key(), "unknown key");
  }

  void require_positive(const std::string& key, double v) const {
    if (!(std::isfinite(v) && v > 0.0)) error(key, "must be positive and finite");
  }

 private:
  int line_of(const std::string& p) const {
    auto it = lines_.find(p);
    return it == lines_.end() ? 0 : it->second;
  }

  bool read_value(const std::string& key, const Json& v, double& out) {
    if (!v.is_number()) return type_error(key, "a number");
    out = v.get<double>();
    if (!std::isfinite(out)) return type_error(key, "a finite number");
    return true;
  }
  bool read_value(const std::string& key, const Json& v, int& out) {
    if (!v.is_number_integer()) return type_error(key, "an integer");
    out = v.get<int>();
    return true;
  }
  bool read_value(const std::string& key, const Json& v, long& out) {
    if (!v.is_number_integer()) return type_error(key, "an integer");
    out = v.get<long>();
    return true;
  }
  bool read_value(const std::string& key, const Json& v, unsigned& out) {
    if (!v.is_number_unsigned()) return type_error(key, "a non-negative integer");
    out = v.get<unsigned>();
    return true;
  }
  bool read_value(const std::string& key, const Json& v, std::uint64_t& out) {
    if (!v.is_number_unsigned()) return type_error(key, "a non-negative integer");
    out = v.get<std::uint64_t>();
    return true;
  }
  bool read_value(const std::string& key, const Json& v, bool& out) {
    if (!v.is_boolean()) return type_error(key, "a boolean");
    out = v.get<bool>();
    return true;
  }
  bool read_value(const std::string& key, const Json& v, std::string& out) {
    if (!v.is_string()) return type_error(key, "a string");
    out = v.get<std::string>();
    return true;
  }
  template <class T>
  bool read_value(const std::string& key, const Json& v, std::vector<T>& out) {
    if (!v.is_array()) return type_error(key, "an array");
    std::vector<T> tmp;
    bool ok = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
      T e{};
      ok = read_value(key + "/" + std::to_string(i), v[i], e) && ok;
      tmp.push_back(e);
    }
    if (ok) out = std::move(tmp);
    return ok;
  }
  bool type_error(const std::string& key, const std::string& what) {
    error(key, "expected " + what);
    return false;
  }

  const Json& j_;
  std::string path_;
  std::vector<ConfigIssue>& issues_;
  const std::map<std::string, int>& lines_;
  std::set<std::string> used_;
};

inline bool one_of(const std::string& v, std::initializer_list<const char*> options) {
  for (const char* o : options)
    if (v == o) return true;
  return false;
}

}  // namespace detail

struct ParseResult {
  std::optional<RunConfig> config;
  std::vector<ConfigIssue> errors;
};

inline ParseResult try_parse_config(const std::string& text) {
  ParseResult res;
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    int line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    res.errors.push_back({"", line, std::string("syntax error: ") + e.what()});
    return res;
  }
  const auto lines = detail::json_line_map(text);
  auto& issues = res.errors;
  if (!doc.is_object()) {
    issues.push_back({"", 1, "top level must be an object"});
    return res;
  }
  RunConfig cfg;
  detail::Reader top(doc, "", issues, lines);
  top.get("name", cfg.name);
  top.get("mode", cfg.mode);
  top.get("output", cfg.output);
  top.get("threads", cfg.threads);
  top.get("checks", cfg.checks);
  if (!top.has("mode")) top.error("mode", "missing required key");
  else if (!cfg.mode.empty() && std::find(known_modes().begin(), known_modes().end(), cfg.mode) == known_modes().end())
    top.error("mode", "unknown mode '" + cfg.mode + "'");
  if (cfg.threads == 0) top.error("threads", "must be at least 1");
  for (std::size_t i = 0; i < cfg.checks.size(); ++i)
    if (std::find(known_checks().begin(), known_checks().end(), cfg.checks[i]) == known_checks().end())
      top.error("checks/" + std::to_string(i), "unknown check '" + cfg.checks[i] + "'");

  const bool needs_domain = cfg.mode != "radial-limit";
  if (auto r = top.child("domain")) {
    auto& d = cfg.domain;
    r->get("type", d.type);
    if (d.type == "disk") {
      r->get("radius", d.radius);
      r->get("dim", d.dim);
      r->require_positive("radius", d.radius);
      if (d.dim < 2 || d.dim > 6) r->error("dim", "must lie in [2, 6]");
    } else if (d.type == "rectangle") {
      r->get("half_extents", d.half_extents);
      if (d.half_extents.size() < 2 || d.half_extents.size() > 6) r->error("half_extents", "needs 2 to 6 entries");
      for (std::size_t i = 0; i < d.half_extents.size(); ++i)
        r->require_positive("half_extents/" + std::to_string(i), d.half_extents[i]);
      d.dim = int(d.half_extents.size());
    } else if (d.type == "channel") {
      r->get("m", d.m);
      r->get("k", d.k);
      r->get("x_max", d.x_max);
      r->require_positive("m", d.m);
      r->require_positive("k", d.k);
      if (d.x_max) r->require_positive("x_max", *d.x_max);
      d.dim = 2;
    } else {
      r->error("type", "unknown domain type '" + d.type + "'");
    }
    r->finish();
  } else if (needs_domain) {
    top.error("domain", "missing required block");
  }

  if (auto r = top.child("grid")) {
    auto& g = cfg.grid;
    r->get("h", g.h);
    r->get("cells", g.cells);
    r->get("min_cells", g.min_cells);
    if (g.h.has_value() == g.cells.has_value()) r->error("", "exactly one of h and cells is required");
    if (g.h) r->require_positive("h", *g.h);
    if (g.cells && *g.cells < 1) r->error("cells", "must be at least 1");
    if (g.min_cells < 1) r->error("min_cells", "must be at least 1");
    r->finish();
  } else if (needs_domain && cfg.mode != "check-condition" && cfg.mode != "channel-analyze") {
    top.error("grid", "missing required block");
  }

  if (auto r = top.child("forcing")) {
    auto& f = cfg.forcing;
    r->get("type", f.type);
    if (f.type == "constant") {
      r->get("value", f.value);
    } else if (f.type == "toy_model" || f.type == "notched_toy_model") {
      r->get("a", f.a);
      r->get("b", f.b);
      if (f.type == "notched_toy_model") r->get("depth", f.depth);
      if (!(f.a > 0.0 && f.b > f.a)) r->error("", "needs 0 < a < b");
      if (f.type == "notched_toy_model" && !(f.depth > 0.0 && f.depth < 1.0)) r->error("depth", "must lie in (0, 1)");
    } else if (f.type == "radial_table") {
      r->get("r", f.r);
      r->get("c", f.c);
      if (f.r.size() < 2 || f.r.size() != f.c.size()) r->error("", "r and c need equal length >= 2");
    } else if (f.type == "channel_fraction") {
      r->get("fraction", f.fraction);
      if (!(f.fraction > 0.0 && f.fraction < 1.0)) r->error("fraction", "must lie in (0, 1)");
    } else {
      r->error("type", "unknown forcing type '" + f.type + "'");
    }
    r->finish();
  } else {
    top.error("forcing", "missing required block");
  }

  if (auto r = top.child("initial")) {
    auto& u = cfg.initial;
    r->get("generator", u.generator);
    if (u.generator == "constant") {
      r->get("value", u.value);
    } else if (u.generator == "plateau") {
      r->get("inner", u.inner);
      r->get("outer", u.outer);
      r->get("high", u.high);
      r->get("low", u.low);
      if (!(u.inner >= 0.0 && u.outer > u.inner)) r->error("", "needs 0 <= inner < outer");
    } else if (u.generator == "neumann_polynomial") {
      r->get("amplitude", u.amplitude);
    } else if (u.generator == "channel_arcs") {
      r->get("l_fraction", u.l_fraction);
      r->get("alpha", u.alpha);
      r->get("beta", u.beta);
      if (!(u.l_fraction > 0.0 && u.l_fraction < 1.0)) r->error("l_fraction", "must lie in (0, 1)");
      if (!(u.alpha < u.beta)) r->error("", "needs alpha < beta");
    } else if (u.generator == "random_pairs") {
      // pair parameters live in the comparison block
    } else {
      r->error("generator", "unknown generator '" + u.generator + "'");
    }
    r->finish();
  } else if (cfg.mode == "simulate" || cfg.mode == "radial-limit" || cfg.mode == "bounds") {
    top.error("initial", "missing required block");
  }

  if (auto r = top.child("solver")) {
    auto& s = cfg.solver;
    r->get("epsilon", s.epsilon);
    r->get("cfl_safety", s.cfl_safety);
    r->get("t_final", s.t_final);
    r->get("steps", s.steps);
    r->get("snapshot_every", s.snapshot_every);
    if (s.epsilon) r->require_positive("epsilon", *s.epsilon);
    if (!(s.cfl_safety > 0.0 && s.cfl_safety <= 1.0)) r->error("cfl_safety", "must lie in (0, 1]");
    if (s.t_final) r->require_positive("t_final", *s.t_final);
    if (s.steps && *s.steps < 1) r->error("steps", "must be at least 1");
    if (s.t_final && s.steps) r->error("", "t_final and steps are exclusive");
    if (s.snapshot_every < 0.0) r->error("snapshot_every", "must be non-negative");
    r->finish();
  }

  if (auto r = top.child("condition")) {
    auto& c = cfg.condition;
    r->get("delta", c.delta);
    r->get("expect_holds", c.expect_holds);
    r->get("sample_density", c.sample_density);
    if (c.delta && !(*c.delta > 0.0)) r->error("delta", "must be positive");
    if (c.sample_density < 2) r->error("sample_density", "must be at least 2");
    r->finish();
  }
  const bool needs_delta = cfg.mode == "check-condition" || cfg.mode == "bounds" ||
                           std::find(cfg.checks.begin(), cfg.checks.end(), "global_lipschitz") != cfg.checks.end();
  if (needs_delta && !cfg.condition.delta) {
    const bool present = doc.contains("condition") && doc["condition"].is_object() && doc["condition"].contains("delta");
    if (!present) issues.push_back({"/condition/delta", 0, "missing required key"});
  }

  if (auto r = top.child("radial")) {
    auto& q = cfg.radial;
    r->get("h", q.h);
    r->get("t_final", q.t_final);
    r->get("band_cells", q.band_cells);
    r->get("cfl_safety", q.cfl_safety);
    r->get("tolerance", q.tolerance);
    r->require_positive("h", q.h);
    r->require_positive("t_final", q.t_final);
    r->require_positive("tolerance", q.tolerance);
    if (q.band_cells < 0.0) r->error("band_cells", "must be non-negative");
    if (!(q.cfl_safety > 0.0 && q.cfl_safety <= 1.0)) r->error("cfl_safety", "must lie in (0, 1]");
    r->finish();
  }

  if (auto r = top.child("channel")) {
    auto& c = cfg.channel;
    r->get("delta_fraction", c.delta_fraction);
    r->get("decay", c.decay);
    r->get("band_cells", c.band_cells);
    r->get("pin_margin_cells", c.pin_margin_cells);
    r->get("sandwich_margin_cells", c.sandwich_margin_cells);
    r->get("metric_threshold", c.metric_threshold);
    r->get("transient_fraction", c.transient_fraction);
    r->get("min_barrier_cells", c.min_barrier_cells);
    if (!(c.delta_fraction > 0.0 && c.delta_fraction < 1.0)) r->error("delta_fraction", "must lie in (0, 1)");
    r->require_positive("decay", c.decay);
    if (!(c.transient_fraction >= 0.0 && c.transient_fraction < 1.0))
      r->error("transient_fraction", "must lie in [0, 1)");
    r->finish();
  }

  if (auto r = top.child("comparison")) {
    auto& c = cfg.comparison;
    r->get("pairs", c.pairs);
    r->get("seed", c.seed);
    r->get("max_offset", c.max_offset);
    r->get("modes", c.modes);
    if (c.pairs < 1) r->error("pairs", "must be at least 1");
    if (!(c.max_offset >= 0.0)) r->error("max_offset", "must be non-negative");
    if (c.modes < 1) r->error("modes", "must be at least 1");
    r->finish();
  }

  if (auto r = top.child("lipschitz")) {
    auto& l = cfg.lipschitz;
    r->get("early_time", l.early_time);
    r->get("growth_factor", l.growth_factor);
    r->get("bound_factor", l.bound_factor);
    r->require_positive("early_time", l.early_time);
    r->require_positive("growth_factor", l.growth_factor);
    r->require_positive("bound_factor", l.bound_factor);
    r->finish();
  }

  top.finish();
  if (issues.empty()) res.config = std::move(cfg);
  return res;
}

inline RunConfig parse_config(const std::string& text) {
  auto res = try_parse_config(text);
  if (!res.config) throw ConfigError(std::move(res.errors));
  return std::move(*res.config);
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline RunConfig load_config(const std::string& path) {
  auto res = try_parse_config(read_file(path));
  if (!res.config) {
    for (auto& e : res.errors) e.message = e.message + " (" + path + ")";
    throw ConfigError(std::move(res.errors));
  }
  return std::move(*res.config);
}

// Canonical form with defaults applied; parse_config(to_json(c)) == c.
inline Json to_json(const RunConfig& c) {
  Json j;
  j["name"] = c.name;
  j["mode"] = c.mode;
  j["output"] = c.output;
  j["threads"] = c.threads;
  j["checks"] = c.checks;

  Json d;
  d["type"] = c.domain.type;
  if (c.domain.type == "disk") {
    d["radius"] = c.domain.radius;
    d["dim"] = c.domain.dim;
  } else if (c.domain.type == "rectangle") {
    d["half_extents"] = c.domain.half_extents;
  } else {
    d["m"] = c.domain.m;
    d["k"] = c.domain.k;
    if (c.domain.x_max) d["x_max"] = *c.domain.x_max;
  }
  j["domain"] = d;

  if (c.grid.h || c.grid.cells) {
    Json g;
    if (c.grid.h) g["h"] = *c.grid.h;
    if (c.grid.cells) g["cells"] = *c.grid.cells;
    g["min_cells"] = c.grid.min_cells;
    j["grid"] = g;
  }

  Json f;
  f["type"] = c.forcing.type;
  if (c.forcing.type == "constant") {
    f["value"] = c.forcing.value;
  } else if (c.forcing.type == "toy_model" || c.forcing.type == "notched_toy_model") {
    f["a"] = c.forcing.a;
    f["b"] = c.forcing.b;
    if (c.forcing.type == "notched_toy_model") f["depth"] = c.forcing.depth;
  } else if (c.forcing.type == "radial_table") {
    f["r"] = c.forcing.r;
    f["c"] = c.forcing.c;
  } else {
    f["fraction"] = c.forcing.fraction;
  }
  j["forcing"] = f;

  Json u;
  u["generator"] = c.initial.generator;
  if (c.initial.generator == "constant") {
    u["value"] = c.initial.value;
  } else if (c.initial.generator == "plateau") {
    u["inner"] = c.initial.inner;
    u["outer"] = c.initial.outer;
    u["high"] = c.initial.high;
    u["low"] = c.initial.low;
  } else if (c.initial.generator == "neumann_polynomial") {
    u["amplitude"] = c.initial.amplitude;
  } else if (c.initial.generator == "channel_arcs") {
    u["l_fraction"] = c.initial.l_fraction;
    u["alpha"] = c.initial.alpha;
    u["beta"] = c.initial.beta;
  }
  j["initial"] = u;

  Json s;
  if (c.solver.epsilon) s["epsilon"] = *c.solver.epsilon;
  s["cfl_safety"] = c.solver.cfl_safety;
  if (c.solver.t_final) s["t_final"] = *c.solver.t_final;
  if (c.solver.steps) s["steps"] = *c.solver.steps;
  s["snapshot_every"] = c.solver.snapshot_every;
  j["solver"] = s;

  Json cond;
  if (c.condition.delta) cond["delta"] = *c.condition.delta;
  cond["expect_holds"] = c.condition.expect_holds;
  cond["sample_density"] = c.condition.sample_density;
  j["condition"] = cond;

  j["radial"] = {{"h", c.radial.h},
                 {"t_final", c.radial.t_final},
                 {"band_cells", c.radial.band_cells},
                 {"cfl_safety", c.radial.cfl_safety},
                 {"tolerance", c.radial.tolerance}};
  j["channel"] = {{"delta_fraction", c.channel.delta_fraction},
                  {"decay", c.channel.decay},
                  {"band_cells", c.channel.band_cells},
                  {"pin_margin_cells", c.channel.pin_margin_cells},
                  {"sandwich_margin_cells", c.channel.sandwich_margin_cells},
                  {"metric_threshold", c.channel.metric_threshold},
                  {"transient_fraction", c.channel.transient_fraction},
                  {"min_barrier_cells", c.channel.min_barrier_cells}};
  j["comparison"] = {{"pairs", c.comparison.pairs},
                     {"seed", c.comparison.seed},
                     {"max_offset", c.comparison.max_offset},
                     {"modes", c.comparison.modes}};
  j["lipschitz"] = {{"early_time", c.lipschitz.early_time},
                    {"growth_factor", c.lipschitz.growth_factor},
                    {"bound_factor", c.lipschitz.bound_factor}};
  return j;
}

}  // namespace fmcf
