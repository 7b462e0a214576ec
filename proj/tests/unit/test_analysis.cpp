#include <gtest/gtest.h>

#include "rdo/analysis.hpp"
#include "rdo/error.hpp"
#include "rdo/motor_bench.hpp"

using namespace rdo;

namespace {

ParetoFront make_front(const std::vector<std::pair<double, double>>& pts, double offset = 0.0) {
  ParetoFront f;
  for (auto [a, b] : pts) f.individuals.push_back({{a}, {a + offset, b}, 0, 0.0});
  return f;
}

// f1 in [-1, 0], f2 = f1^2 decreasing along the front.
ParetoFront curve(std::size_t n, double shift = 0.0) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double f1 = -1.0 + static_cast<double>(i) / (n - 1);
    pts.push_back({f1, f1 * f1});
  }
  return make_front(pts, shift);
}

DesignSpace line_space() { return DesignSpace({{"x", -2.0, 2.0, 0.1, ParameterKind::geometric}}); }

ResponsePair line_responses() {
  ResponsePair r;
  r.torque = [](std::span<const double> g, const MaterialState& m) { return -g[0] + 5.0 * (m.alpha - 1.0); };
  r.ripple = [](std::span<const double> g, const MaterialState&) { return g[0] * g[0]; };
  return r;
}

}  // namespace

TEST(Reevaluate, ZeroToleranceLeavesFrontUnchanged) {
  // x doubles as -f1 through the torque response.
  ParetoFront f;
  for (double x : {-1.0, -0.5, 0.0}) f.individuals.push_back({{x}, {x, x * x}, 0, 0.0});
  const UncertaintySpec none = UncertaintySpec::none(line_space());
  const ParetoFront r = reevaluate_front(f, line_responses(), none, RobustMetric::expectation, {}, 1);
  ASSERT_EQ(r.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r.individuals[i].objectives, f.individuals[i].objectives);
}

TEST(Reevaluate, FailingDesignsAreDropped) {
  ResponsePair resp = line_responses();
  resp.ripple = [](std::span<const double> g, const MaterialState&) -> double {
    if (g[0] > 0.9) throw std::runtime_error("no convergence");
    return g[0] * g[0];
  };
  ParetoFront f;
  for (double x : {-1.0, 1.0}) f.individuals.push_back({{x}, {x, x * x}, 0, 0.0});
  std::vector<std::string> warnings;
  const ParetoFront r = reevaluate_front(f, resp, UncertaintySpec::none(line_space()), RobustMetric::expectation,
                                         {}, 1, &warnings);
  EXPECT_EQ(r.size(), 1u);
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(Zones, IdenticalFrontsMatchThemselves) {
  const ParetoFront f = curve(21);
  const auto zones = match_zones(f, f, 5);
  ASSERT_EQ(zones.size(), 5u);
  for (const auto& z : zones) {
    EXPECT_EQ(z.index_a, z.index_b);
    EXPECT_TRUE(z.a_in_band);
  }
  EXPECT_NEAR(zones.front().lower, -1.0, 1e-12);
  EXPECT_NEAR(zones.back().upper, 0.0, 1e-12);
  const ZoneOrdering o = zone_ordering(f, f, zones, 0.0);
  EXPECT_EQ(o.count, 5u);
}

TEST(Zones, SinglePointFront) {
  const ParetoFront one = make_front({{-0.5, 0.25}});
  const auto zones = match_zones(one, curve(11), 3);
  ASSERT_FALSE(zones.empty());
  for (const auto& z : zones) EXPECT_EQ(z.index_a, 0u);
}

TEST(Zones, DisjointFrontsThrow) {
  try {
    match_zones(curve(5), curve(5, 10.0), 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_overlap);
  }
}

TEST(Zones, OrderingDetectsWorseFront) {
  const ParetoFront ref = curve(21);
  ParetoFront worse = ref;
  for (auto& ind : worse.individuals) ind.objectives[1] += 0.5;
  const auto zones = match_zones(worse, ref, 4);
  EXPECT_EQ(zone_ordering(worse, ref, zones, 0.1).count, 0u);
  EXPECT_EQ(zone_ordering(ref, worse, match_zones(ref, worse, 4), 0.0).count, 4u);
}

TEST(FrontValueAt, Interpolates) {
  const ParetoFront f = make_front({{0.0, 2.0}, {1.0, 0.0}});
  EXPECT_NEAR(*front_value_at(f, 0.25), 1.5, 1e-12);
  EXPECT_FALSE(front_value_at(f, 1.5).has_value());
}

TEST(FrontShift, RecoversConstantOffset) {
  const ParetoFront base = curve(41);
  const FrontShift same = front_shift_check(base, base, RobustMetric::expectation);
  EXPECT_NEAR(same.offset, 0.0, 1e-12);
  EXPECT_NEAR(same.residual, 0.0, 1e-12);

  // Torque -10 is f1 +10 in objective space.
  const FrontShift s = front_shift_check(base, curve(41, 10.0), RobustMetric::expectation);
  EXPECT_NEAR(s.offset, -10.0, 1e-9);
  EXPECT_LT(s.residual, 1e-9);
  EXPECT_GE(s.pairs, 3u);
  EXPECT_THROW(front_shift_check(base, make_front({{-0.5, 0.25}}), RobustMetric::expectation), Error);
}

TEST(Derivatives, BenchmarkIsAffineInMaterial) {
  const DesignPoint g = bench::reference_design().geometry;
  const ResponsePair r = bench::responses();
  const auto first = material_derivatives(r.torque, g, {0.5, 0.03}, DerivativeOrder::first);
  ASSERT_EQ(first.size(), 2u);
  EXPECT_NEAR(first[0], 12.0, 1e-6);
  EXPECT_NEAR(first[1], -8.0, 1e-6);
  std::vector<bool> one_sided;
  const auto second = material_derivatives(r.torque, g, {1.0, 0.0}, DerivativeOrder::second, 1e-3, &one_sided);
  ASSERT_EQ(second.size(), 3u);
  for (double v : second) EXPECT_NEAR(v, 0.0, 1e-5);
  EXPECT_TRUE(one_sided[0]);
  EXPECT_TRUE(one_sided[1]);
}

TEST(Derivatives, StudyIsDeterministicAcrossWorkers) {
  const DesignSpace space = DesignSpace::table_one();
  const Response f = [](std::span<const double> g, const MaterialState& m) {
    return g[0] * m.alpha * m.alpha + g[7] * m.beta;
  };
  const std::vector<MaterialState> grid{{0.5, 0.03}, {0.0, 0.065}};
  DerivativeStudyOptions one;
  one.maximin_iterations = 200;
  DerivativeStudyOptions four = one;
  four.workers = 4;
  const auto a = derivative_study(f, space, 40, grid, DerivativeOrder::second, 3, one);
  const auto b = derivative_study(f, space, 40, grid, DerivativeOrder::second, 3, four);
  ASSERT_EQ(a.size(), 6u);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].component, b[i].component);
    EXPECT_EQ(a[i].values, b[i].values);
    EXPECT_EQ(a[i].values.size(), 40u);
  }
  EXPECT_FALSE(a[0].one_sided);
  EXPECT_TRUE(a[3].one_sided);
}

TEST(ZoneBoxplots, OnePerZone) {
  const DesignSpace s = line_space();
  ParetoFront f;
  for (double x : {-1.0, -0.5, 0.0, 0.5, 1.0}) f.individuals.push_back({{x}, {x, x * x}, 0, 0.0});
  const auto zones = match_zones(f, f, 2);
  const auto boxes = zone_boxplots(f, f, zones, line_responses(), UncertaintySpec::geometric(s, s.names()), 32, 1);
  ASSERT_EQ(boxes.size(), 2u);
  EXPECT_DOUBLE_EQ(boxes[0].ripple_a.q2, boxes[0].ripple_b.q2);
  EXPECT_GE(boxes[0].worst_ripple_a, boxes[0].ripple_a.q3);
}
