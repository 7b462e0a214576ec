#include <gtest/gtest.h>

#include "rdo/error.hpp"
#include "rdo/sensitivity.hpp"

using namespace rdo;

namespace {

DesignSpace unit_space(std::size_t d) {
  std::vector<ParameterSpec> p;
  for (std::size_t j = 0; j < d; ++j) p.push_back({"x" + std::to_string(j + 1), 0.0, 1.0, 0.0, ParameterKind::geometric});
  return DesignSpace(p);
}

}  // namespace

TEST(Sobol, AdditiveFunction) {
  // Var(x1) : Var(2 x2) = 1 : 4, nothing in x3.
  const PointFunction f = [](std::span<const double> x) { return x[0] + 2.0 * x[1]; };
  const SobolResult r = sobol_indices(f, unit_space(3), 4096, 1);
  EXPECT_NEAR(r.first_order[0], 0.2, 0.02);
  EXPECT_NEAR(r.first_order[1], 0.8, 0.02);
  EXPECT_NEAR(r.first_order[2], 0.0, 0.02);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(r.total[j], r.first_order[j], 0.02);
  EXPECT_EQ(r.n_base, 4096u);
  EXPECT_GT(r.first_order_se[1], 0.0);
}

TEST(Sobol, PureInteraction) {
  // f = x1 x2 on [-1,1]^2: no first-order effect, all variance in the pair.
  std::vector<ParameterSpec> p = {{"a", -1, 1, 0, ParameterKind::geometric},
                                  {"b", -1, 1, 0, ParameterKind::geometric}};
  const PointFunction f = [](std::span<const double> x) { return x[0] * x[1]; };
  const SobolResult r = sobol_indices(f, DesignSpace(p), 4096, 2);
  for (int j = 0; j < 2; ++j) {
    EXPECT_NEAR(r.first_order[j], 0.0, 0.03);
    EXPECT_NEAR(r.total[j], 1.0, 0.03);
  }
}

TEST(Sobol, Deterministic) {
  const PointFunction f = [](std::span<const double> x) { return x[0] * x[0] + x[1]; };
  const SobolResult a = sobol_indices(f, unit_space(2), 128, 5);
  const SobolResult b = sobol_indices(f, unit_space(2), 128, 5, {100, 3});
  EXPECT_EQ(a.first_order, b.first_order);
  EXPECT_EQ(a.total, b.total);
}

TEST(Sobol, Errors) {
  const PointFunction c = [](std::span<const double>) { return 3.0; };
  try {
    sobol_indices(c, unit_space(2), 128, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::zero_variance);
  }
  const PointFunction f = [](std::span<const double> x) { return x[0]; };
  EXPECT_THROW(sobol_indices(f, unit_space(2), 63, 1), Error);
}

TEST(Ranking, TotalThenFirstOrderThenOrder) {
  SobolResult r;
  r.first_order = {0.1, 0.3, 0.2, 0.0};
  r.total = {0.5, 0.5, 0.5, 0.6};
  EXPECT_EQ(rank_uncertain_parameters(r, unit_space(4), 3), (std::vector<std::string>{"x4", "x2", "x3"}));
  r.first_order = {0.2, 0.2, 0.2, 0.0};
  EXPECT_EQ(rank_uncertain_parameters(r, unit_space(4), 3), (std::vector<std::string>{"x4", "x1", "x2"}));
  EXPECT_THROW(rank_uncertain_parameters(r, unit_space(4), 5), Error);
}

TEST(SobolTable, ClampsNegativeEstimates) {
  SobolResult r;
  r.first_order = {-0.01, 0.4};
  r.total = {0.02, 0.5};
  r.first_order_se = {0.01, 0.01};
  r.total_se = {0.01, 0.01};
  const CsvTable t = sobol_table(r, unit_space(2));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.header[0], "parameter");
  EXPECT_DOUBLE_EQ(t.number(0, t.column("first_order")), 0.0);
  EXPECT_DOUBLE_EQ(t.number(1, t.column("total")), 0.5);
}
