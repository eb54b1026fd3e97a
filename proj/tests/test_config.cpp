#include <gtest/gtest.h>

#include <filesystem>

#include "fmcf/config.hpp"
#include "fmcf/solver.hpp"

using namespace fmcf;

namespace {

const char* kMinimal = R"({
  "mode": "simulate",
  "domain": {"type": "disk", "radius": 1.0},
  "grid": {"h": 0.05},
  "forcing": {"type": "constant", "value": 1.0},
  "initial": {"generator": "constant", "value": 0.0},
  "solver": {"t_final": 0.1}
})";

const ConfigIssue* find_issue(const std::vector<ConfigIssue>& v, const std::string& path) {
  for (const auto& i : v)
    if (i.path == path) return &i;
  return nullptr;
}

}  // namespace

TEST(Config, MinimalDefaults) {
  const auto c = parse_config(kMinimal);
  EXPECT_EQ(c.solver.cfl_safety, 0.25);
  EXPECT_FALSE(c.solver.epsilon.has_value());
  EXPECT_EQ(c.threads, 1u);
  SolverConfig sc;
  sc.epsilon = c.solver.epsilon;
  auto g = make_grid(DomainSpec::disk(c.domain.radius), *c.grid.h);
  EXPECT_EQ(sc.epsilon_for(*g), 0.05);
}

TEST(Config, NonPositiveDeltaRejectedWithPath) {
  for (const char* d : {"0", "-0.5"}) {
    const std::string text = std::string(R"({"mode": "check-condition", "domain": {"type": "disk"},
      "forcing": {"type": "constant", "value": 2.0}, "condition": {"delta": )") + d + "}}";
    const auto res = try_parse_config(text);
    EXPECT_FALSE(res.config);
    EXPECT_NE(find_issue(res.errors, "/condition/delta"), nullptr);
  }
}

TEST(Config, MissingDeltaReportedForConditionMode) {
  const auto res = try_parse_config(R"({"mode": "check-condition", "domain": {"type": "disk"},
      "forcing": {"type": "constant", "value": 2.0}})");
  EXPECT_FALSE(res.config);
  EXPECT_NE(find_issue(res.errors, "/condition/delta"), nullptr);
}

TEST(Config, UnknownKeyReportsLine) {
  const auto res = try_parse_config("{\n  \"mode\": \"simulate\",\n  \"domain\": {\"type\": \"disk\"},\n  \"bogus\": 3\n}");
  ASSERT_FALSE(res.config);
  const auto* i = find_issue(res.errors, "/bogus");
  ASSERT_NE(i, nullptr);
  EXPECT_EQ(i->line, 4);
  EXPECT_NE(i->str().find("line 4"), std::string::npos);
}

TEST(Config, TypeMismatchReportsPath) {
  const auto res = try_parse_config(R"({"mode": "simulate", "domain": {"type": "disk", "radius": "big"}})");
  ASSERT_FALSE(res.config);
  EXPECT_NE(find_issue(res.errors, "/domain/radius"), nullptr);
}

TEST(Config, SyntaxErrorHasLine) {
  const auto res = try_parse_config("{\n\"mode\": \"simulate\",\n,\n}");
  ASSERT_FALSE(res.config);
  EXPECT_EQ(res.errors.front().line, 3);
}

TEST(Config, UnknownModeAndCheckRejected) {
  EXPECT_THROW(parse_config(R"({"mode": "fly", "domain": {"type": "disk"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"mode": "simulate", "domain": {"type": "disk"}, "checks": ["nope"]})"), ConfigError);
}

TEST(Config, RoundTripThroughCanonicalJson) {
  const auto c = parse_config(kMinimal);
  EXPECT_EQ(parse_config(to_json(c).dump(2)), c);
}

TEST(Config, ShippedConfigsParseAndRoundTrip) {
  std::size_t n = 0;
  for (const auto& e : std::filesystem::directory_iterator(FMCF_CONFIG_DIR)) {
    if (e.path().extension() != ".json") continue;
    SCOPED_TRACE(e.path().string());
    RunConfig c;
    ASSERT_NO_THROW(c = load_config(e.path().string()));
    EXPECT_EQ(parse_config(to_json(c).dump()), c);
    ++n;
  }
  EXPECT_GE(n, 11u);
}
