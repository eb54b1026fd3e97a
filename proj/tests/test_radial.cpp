#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fmcf/radial.hpp"

using namespace fmcf;

namespace {

RadialProblem problem(RadialProfile c, std::function<double(double)> u0 = plateau_profile(0.3, 0.6)) {
  RadialProblem pb;
  pb.n = 2;
  pb.R = 1.0;
  pb.c = std::move(c);
  pb.u0 = std::move(u0);
  return pb;
}

RadialProfile zero_c() {
  return {[](double) { return 0.0; }, [](double) { return 0.0; }};
}

RadialProfile neutral_c() {
  return {[](double r) { return 1.0 / r; }, [](double r) { return -1.0 / (r * r); }};
}

double total_length(const std::vector<RadialInterval>& v) {
  double s = 0.0;
  for (const auto& p : v) s += p.hi - p.lo;
  return s;
}

}  // namespace

TEST(Classify, ZeroForcingIsAllAminus) {
  const auto rc = classify(problem(zero_c()), 1e-4);
  EXPECT_TRUE(rc.of(Region::A).empty());
  const auto minus = rc.of(Region::A_minus);
  ASSERT_EQ(minus.size(), 1u);
  EXPECT_EQ(minus[0].lo, 0.0);
  EXPECT_EQ(minus[0].hi, 1.0);
  EXPECT_TRUE(minus[0].hi_closed);
}

TEST(Classify, ToyModel) {
  const auto rc = classify(problem(toy_model_profile(0.3, 0.6, 2)), 1e-4);
  const auto A = rc.of(Region::A);
  ASSERT_EQ(A.size(), 1u);
  EXPECT_NEAR(A[0].lo, 0.3, 1e-6);
  EXPECT_NEAR(A[0].hi, 0.6, 1e-6);
  EXPECT_EQ(rc.label_at(0.1), Region::A_minus);
  EXPECT_EQ(rc.label_at(0.45), Region::A);
  EXPECT_EQ(rc.label_at(0.8), Region::A_plus);
  EXPECT_NEAR(total_length(rc.of(Region::A_minus)), 0.3, 1e-6);
  EXPECT_NEAR(total_length(rc.of(Region::A_plus)), 0.4, 1e-6);
}

TEST(Classify, NeutralForcingIsAllA) {
  const auto rc = classify(problem(neutral_c()), 1e-4);
  const auto A = rc.of(Region::A);
  ASSERT_EQ(A.size(), 1u);
  EXPECT_EQ(A[0].lo, 0.0);
  EXPECT_EQ(A[0].hi, 1.0);
  EXPECT_TRUE(rc.of(Region::A_plus).empty());
  EXPECT_TRUE(rc.of(Region::A_minus).empty());
}

TEST(Classify, NotchedModelKeepsEndpointsInA) {
  const auto rc = classify(problem(notched_toy_profile(0.3, 0.6, 2, 0.5)), 1e-4);
  EXPECT_EQ(rc.label_at(0.3), Region::A);
  EXPECT_EQ(rc.label_at(0.6), Region::A);
  EXPECT_EQ(rc.label_at(0.45), Region::A_minus);
  EXPECT_EQ(rc.label_at(0.2), Region::A_minus);
  EXPECT_EQ(rc.label_at(0.8), Region::A_plus);
}

TEST(Classify, RejectsBadInput) {
  auto pb = problem(zero_c());
  EXPECT_THROW(classify(pb, 0.0), std::invalid_argument);
  pb.n = 1;
  EXPECT_THROW(classify(pb, 1e-3), std::invalid_argument);
  pb.n = 2;
  pb.R = -1.0;
  EXPECT_THROW(classify(pb, 1e-3), std::invalid_argument);
}

TEST(DMap, ToyModelCases) {
  const auto pb = problem(toy_model_profile(0.3, 0.6, 2));
  const auto rc = classify(pb, 1e-4);
  EXPECT_EQ(d_of(0.45, rc, 1.0), 0.45);
  EXPECT_NEAR(d_of(0.1, rc, 1.0), 0.3, 1e-6);
  EXPECT_NEAR(d_of(0.8, rc, 1.0), 0.6, 1e-6);
  for (double r = 0.31; r < 0.6; r += 0.01) EXPECT_EQ(d_of(r, rc, 1.0), r);
}

TEST(DMap, ZeroForcingSendsEverythingToR) {
  const auto rc = classify(problem(zero_c()), 1e-4);
  for (double r : {0.01, 0.5, 1.0}) EXPECT_EQ(d_of(r, rc, 1.0), 1.0);
  EXPECT_THROW(d_of(0.0, rc, 1.0), std::out_of_range);
}

TEST(PhiInfinity, NotchedPlateauData) {
  const auto pb = problem(notched_toy_profile(0.3, 0.6, 2, 0.5));
  const auto rc = classify(pb, 1e-4);
  for (double r : {0.05, 0.2, 0.29}) EXPECT_EQ(phi_infinity(r, pb, rc), 1.0);
  // d(r) lands within the classification tolerance of 0.6, where u0 has a
  // cubic tail: u0(0.6 - 1e-4) ~ 10 (1e-4 / 0.3)^3.
  for (double r : {0.35, 0.5}) EXPECT_NEAR(phi_infinity(r, pb, rc), 0.0, 1e-8);
  for (double r : {0.7, 1.0}) EXPECT_EQ(phi_infinity(r, pb, rc), 0.0);
}

TEST(PhiInfinity, NondecreasingDataGivesEndpointValue) {
  const auto pb = problem(toy_model_profile(0.3, 0.6, 2), [](double r) { return r * r * (3 - 2 * r); });
  const auto rc = classify(pb, 1e-4);
  for (double r = 0.05; r <= 1.0; r += 0.05) EXPECT_DOUBLE_EQ(phi_infinity(r, pb, rc), 1.0);
}

TEST(PhiInfinity, ZeroForcingIsEndpointValue) {
  const auto pb = problem(zero_c(), [](double r) { return std::cos(M_PI * r); });
  const auto rc = classify(pb, 1e-4);
  for (double r : {0.1, 0.6}) EXPECT_EQ(phi_infinity(r, pb, rc), pb.u0(1.0));
}

TEST(PhiInfinity, NonincreasingForNonincreasingData) {
  const auto pb = problem(toy_model_profile(0.3, 0.6, 2));
  const auto rc = classify(pb, 1e-4);
  double prev = INFINITY;
  for (double r = 0.02; r <= 1.0; r += 0.02) {
    const double v = phi_infinity(r, pb, rc);
    EXPECT_LE(v, prev + 1e-15);
    prev = v;
  }
}

TEST(SolveRadial, ConstantPreservedExactly) {
  const auto pb = problem(toy_model_profile(0.3, 0.6, 2), [](double) { return 0.42; });
  const auto sol = solve_radial(pb, 0.01, 1.0);
  for (double v : sol.phi) EXPECT_EQ(v, 0.42);
}

TEST(SolveRadial, ZeroForcingMatchesCharacteristics) {
  auto u0 = [](double r) { return 0.5 * (1.0 + std::cos(M_PI * r)); };
  const auto pb = problem(zero_c(), u0);
  const double T = 0.1;
  auto err = [&](double h) {
    const auto sol = solve_radial(pb, h, T);
    double e = 0.0;
    for (std::size_t i = 0; i < sol.r.size(); ++i) {
      if (sol.r[i] > 0.8) continue;
      e = std::max(e, std::abs(sol.phi[i] - u0(std::min(std::sqrt(sol.r[i] * sol.r[i] + 2 * T), 1.0))));
    }
    return e;
  };
  const double e1 = err(0.01), e2 = err(0.005);
  EXPECT_LT(e1, 0.05);
  EXPECT_LT(e2, 0.6 * e1);
}

TEST(SolveRadial, PreservesOrderAndSupNorm) {
  const auto c = notched_toy_profile(0.3, 0.6, 2, 0.5);
  const auto lo = problem(c, [](double r) { return 0.5 * std::cos(M_PI * r); });
  const auto hi = problem(c, [](double r) { return 0.5 * std::cos(M_PI * r) + 0.1 * (1 + std::cos(M_PI * r)); });
  const auto a = solve_radial(lo, 0.01, 0.5), b = solve_radial(hi, 0.01, 0.5);
  for (std::size_t i = 0; i < a.phi.size(); ++i) {
    EXPECT_LE(a.phi[i], b.phi[i]);
    EXPECT_LE(std::abs(a.phi[i]), 0.5 + 1e-15);
  }
}

TEST(SolveRadial, NotchedLimitApproachesPhiInfinity) {
  const auto pb = problem(notched_toy_profile(0.3, 0.6, 2, 0.5));
  const auto rc = classify(pb, 1e-4);
  const double h = 0.005;
  auto dist = [&](double T) {
    const auto sol = solve_radial(pb, h, T);
    double e = 0.0;
    for (std::size_t i = 0; i < sol.r.size(); ++i) {
      if (std::abs(sol.r[i] - 0.3) <= 6 * h) continue;
      e = std::max(e, std::abs(sol.phi[i] - phi_infinity(sol.r[i], pb, rc)));
    }
    return e;
  };
  const double early = dist(0.5), late = dist(10.0);
  EXPECT_LT(late, early);
  EXPECT_LE(late, 0.05);
}

TEST(SolveRadial, RejectsBadInput) {
  const auto pb = problem(zero_c());
  EXPECT_THROW(solve_radial(pb, 0.1, 1.0), std::invalid_argument);
  EXPECT_THROW(solve_radial(pb, 0.01, -1.0), std::invalid_argument);
  EXPECT_THROW(solve_radial(pb, 0.01, 1.0, 0.9, 0.0), std::invalid_argument);
}

TEST(Eta, EquilibriumInA) {
  const auto pb = problem(toy_model_profile(0.3, 0.6, 2));
  const auto e = eta1_curve(0.45, pb, 5.0);
  for (double v : e.eta) EXPECT_NEAR(v, 0.45, 1e-12);
}

TEST(Eta, ZeroForcingClosedForm) {
  const auto pb = problem(zero_c());
  const double r0 = 0.2;
  const auto e = eta1_curve(r0, pb, 1.0);
  EXPECT_TRUE(e.absorbed);
  for (std::size_t i = 0; i < e.s.size(); ++i)
    EXPECT_NEAR(e.eta[i], std::min(std::sqrt(r0 * r0 + 2 * e.s[i]), 1.0), 1e-8);
}

TEST(Eta, LimitIsDMap) {
  const auto pb = problem(toy_model_profile(0.3, 0.6, 2));
  const auto rc = classify(pb, 1e-4);
  for (double r0 : {0.1, 0.2, 0.45, 0.7, 0.95}) {
    const auto e = eta1_curve(r0, pb, 50.0);
    EXPECT_NEAR(e.eta.back(), d_of(r0, rc, 1.0), 1e-4) << "r0 = " << r0;
  }
}

TEST(Eta, MonotoneInStartingRadius) {
  const auto pb = problem(notched_toy_profile(0.3, 0.6, 2, 0.5));
  const auto lo = eta1_curve(0.35, pb, 3.0), hi = eta1_curve(0.4, pb, 3.0);
  auto at = [](const EtaCurve& e, double s) {
    std::size_t k = 1;
    while (k + 1 < e.s.size() && e.s[k] < s) ++k;
    const double w = (s - e.s[k - 1]) / (e.s[k] - e.s[k - 1]);
    return e.eta[k - 1] + std::clamp(w, 0.0, 1.0) * (e.eta[k] - e.eta[k - 1]);
  };
  for (double s = 0.0; s <= 3.0; s += 0.1) EXPECT_LE(at(lo, s), at(hi, s) + 1e-12);
}

TEST(ComponentConstancy, ConstantAndStationaryFamily) {
  const auto pb = problem(toy_model_profile(0.3, 0.6, 2));
  const auto rc = classify(pb, 1e-4);
  std::vector<double> r, flat, family;
  for (int i = 0; i < 1000; ++i) {
    const double x = (i + 0.5) / 1000.0;
    r.push_back(x);
    flat.push_back(3.0);
    family.push_back(x <= 0.3 ? 1.0 : x >= 0.6 ? 0.0 : 1.0 - (x - 0.3) / 0.3);
  }
  for (const auto& c : component_constancy(r, flat, rc)) EXPECT_EQ(c.oscillation, 0.0);
  const auto comps = component_constancy(r, family, rc);
  ASSERT_EQ(comps.size(), 2u);
  for (const auto& c : comps) {
    EXPECT_GT(c.nodes, 0u);
    EXPECT_EQ(c.oscillation, 0.0);
  }
}

TEST(ComponentConstancy, LargeTimeRadialSolution) {
  const auto pb = problem(notched_toy_profile(0.3, 0.6, 2, 0.5));
  const auto rc = classify(pb, 1e-4);
  const double h = 0.005;
  const auto sol = solve_radial(pb, h, 10.0);
  for (const auto& c : component_constancy(sol.r, sol.phi, rc, 6 * h)) EXPECT_LE(c.oscillation, 0.05);
}

TEST(ToyModel, Branches) {
  const auto c = toy_model_profile(0.3, 0.6, 2);
  EXPECT_DOUBLE_EQ(c.value(0.3), 1.0 / 0.3);
  EXPECT_DOUBLE_EQ(c.value(std::nextafter(0.3, 0.0)), 1.0 / 0.3);
  EXPECT_DOUBLE_EQ(c.value(0.45), 1.0 / 0.45);
  EXPECT_DOUBLE_EQ(c.value(1e-12), 1.0 / 0.3);
  EXPECT_DOUBLE_EQ(c.value(0.9), 1.0 / 0.6);
  EXPECT_THROW(toy_model_profile(0.6, 0.3, 2), std::invalid_argument);
}
