#include <gtest/gtest.h>

#include "rdo/design_space.hpp"
#include "rdo/error.hpp"
#include "rdo/random.hpp"

using namespace rdo;

namespace {

const std::vector<std::string> kUncertain = {"Slot_angle", "Beta_L1_P1", "Beta_L1_P2", "Beta_L2_P1", "Beta_L2_P2"};

const ParameterSpec& param(const DesignSpace& s, const std::string& name) { return s[*s.index_of(name)]; }

}  // namespace

TEST(DesignSpace, TableOneMatchesBounds) {
  const DesignSpace s = DesignSpace::table_one();
  ASSERT_EQ(s.size(), 12u);
  const auto& airgap = param(s, "Airgap");
  EXPECT_DOUBLE_EQ(airgap.lower, 0.55);
  EXPECT_DOUBLE_EQ(airgap.upper, 0.65);
  EXPECT_DOUBLE_EQ(airgap.tolerance, 0.03);
  EXPECT_DOUBLE_EQ(param(s, "Slot_angle").tolerance, 0.1);
  EXPECT_DOUBLE_EQ(param(s, "Beta_L3_P2").upper, 63.0);
}

TEST(DesignSpace, RejectsInvalidParameters) {
  EXPECT_THROW(DesignSpace({{"a", 1.0, 1.0, 0.0, ParameterKind::geometric}}), Error);
  EXPECT_THROW(DesignSpace({{"a", 0.0, 1.0, -0.1, ParameterKind::geometric}}), Error);
  EXPECT_THROW(DesignSpace({{"a", 0.0, 1.0, 0.5, ParameterKind::geometric}}), Error);
  EXPECT_THROW(DesignSpace({{"a", 0.0, 1.0, 0.0, ParameterKind::geometric},
                            {"a", 0.0, 2.0, 0.0, ParameterKind::geometric}}),
               Error);
}

TEST(DesignSpace, BundledFileEqualsBuiltIn) {
  const DesignSpace file = load_design_space(RDO_SOURCE_DIR "/config/table1.space");
  const DesignSpace builtin = DesignSpace::table_one();
  ASSERT_EQ(file.size(), builtin.size());
  for (std::size_t i = 0; i < file.size(); ++i) {
    EXPECT_EQ(file[i].name, builtin[i].name);
    EXPECT_DOUBLE_EQ(file[i].lower, builtin[i].lower);
    EXPECT_DOUBLE_EQ(file[i].upper, builtin[i].upper);
    EXPECT_DOUBLE_EQ(file[i].tolerance, builtin[i].tolerance);
  }
}

TEST(DesignSpace, FormatParseRoundTrip) {
  const DesignSpace s = with_material(DesignSpace::table_one());
  const DesignSpace back = parse_design_space(format_design_space(s));
  ASSERT_EQ(back.size(), 14u);
  EXPECT_EQ(back[13].kind, ParameterKind::material);
  EXPECT_DOUBLE_EQ(back[13].upper, 0.065);
}

TEST(DesignSpace, ParseErrors) {
  EXPECT_THROW(parse_design_space("a 0 1 0.1"), Error);
  EXPECT_THROW(parse_design_space("a 0 x 0.1 geometric"), Error);
  EXPECT_THROW(parse_design_space("a 0 1 0.1 thermal"), Error);
}

TEST(RobustSearchSpace, ShrinksByTolerance) {
  const DesignSpace s = DesignSpace::table_one();
  const DesignSpace r = robust_search_space(s, UncertaintySpec::geometric(s, std::vector<std::string>{"Airgap", "Slot_angle"}));
  EXPECT_NEAR(param(r, "Airgap").lower, 0.58, 1e-12);
  EXPECT_NEAR(param(r, "Airgap").upper, 0.62, 1e-12);
  EXPECT_NEAR(param(r, "Slot_angle").lower, 2.57, 1e-12);
  EXPECT_NEAR(param(r, "Slot_angle").upper, 3.17, 1e-12);
  // Certain parameters keep their interval.
  EXPECT_DOUBLE_EQ(param(r, "Bridge_L1").lower, 2.6);
  EXPECT_DOUBLE_EQ(param(r, "Bridge_L1").upper, 2.98);
}

TEST(RobustSearchSpace, CollapseIsAnError) {
  const DesignSpace s({{"a", 0.0, 1.0, 0.5 - 1e-9, ParameterKind::geometric}});
  UncertaintySpec u = UncertaintySpec::geometric(s, std::vector<std::string>{"a"});
  u.half_widths[0] = 0.5;
  try {
    robust_search_space(s, u);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_space);
  }
}

TEST(PerturbationBox, GeometricAndMaterial) {
  const DesignSpace s = DesignSpace::table_one();
  const Box g = perturbation_box(UncertaintySpec::geometric(s, kUncertain));
  ASSERT_EQ(g.size(), 12u);
  EXPECT_EQ(g.active_dimensions().size(), 5u);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_DOUBLE_EQ(g.lower[i], -g.upper[i]);
  EXPECT_DOUBLE_EQ(g.upper[0], 0.1);
  EXPECT_DOUBLE_EQ(g.upper[1], 0.33);

  const Box none = perturbation_box(UncertaintySpec::none(s));
  EXPECT_TRUE(none.active_dimensions().empty());

  const Box m = perturbation_box(UncertaintySpec::geometric(s, std::vector<std::string>{}, true));
  ASSERT_EQ(m.size(), 14u);
  EXPECT_EQ(m.active_dimensions(), (std::vector<std::size_t>{12, 13}));
  EXPECT_DOUBLE_EQ(m.lower[12], 0.0);
  EXPECT_DOUBLE_EQ(m.upper[12], 1.0);
  EXPECT_DOUBLE_EQ(m.upper[13], 0.065);
}

TEST(ApplyPerturbation, AddsGeometryReplacesMaterial) {
  const DesignSpace s = DesignSpace::table_one();
  const UncertaintySpec u = UncertaintySpec::geometric(s, std::vector<std::string>{"Airgap"}, true);
  DesignPoint x = s.midpoint();
  std::vector<double> du(14, 0.0);
  du[7] = 0.03;
  du[12] = 0.4;
  du[13] = 0.02;
  const PerturbedPoint p = apply_perturbation(x, du, u);
  EXPECT_NEAR(p.geometry[7], 0.63, 1e-12);
  EXPECT_EQ(p.material, (MaterialState{0.4, 0.02}));

  const PerturbedPoint id = apply_perturbation(x, std::vector<double>(12, 0.0), UncertaintySpec::geometric(s, kUncertain));
  EXPECT_EQ(id.geometry, x);
  EXPECT_THROW(apply_perturbation(x, std::vector<double>(3, 0.0), u), Error);
}

TEST(ApplyPerturbation, RobustSpaceKeepsPerturbedPointsInside) {
  const DesignSpace s = DesignSpace::table_one();
  std::vector<std::string> all = s.names();
  const UncertaintySpec u = UncertaintySpec::geometric(s, all);
  const DesignSpace r = robust_search_space(s, u);
  const Box box = perturbation_box(u);
  Rng rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    DesignPoint x(12), du(12);
    for (std::size_t j = 0; j < 12; ++j) {
      x[j] = rng.uniform(r[j].lower, r[j].upper);
      du[j] = rng.uniform(box.lower[j], box.upper[j]);
    }
    ASSERT_TRUE(s.contains(apply_perturbation(x, du, u).geometry, 1e-12));
  }
}

TEST(UncertaintySpec, UnknownNameThrows) {
  const DesignSpace s = DesignSpace::table_one();
  EXPECT_THROW(UncertaintySpec::geometric(s, std::vector<std::string>{"Magnet_width"}), Error);
}
