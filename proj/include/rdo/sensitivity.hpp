#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rdo/csv.hpp"
#include "rdo/design_space.hpp"
#include "rdo/evaluator.hpp"

namespace rdo {

/// Sobol first-order and total indices with bootstrap standard errors.
struct SobolResult {
  std::vector<double> first_order;
  std::vector<double> total;
  std::vector<double> first_order_se;
  std::vector<double> total_se;
  std::size_t n_base = 0;
  double output_variance = 0.0;
  double output_mean = 0.0;
};

struct SobolOptions {
  std::size_t bootstrap = 100;
  std::size_t workers = 1;
};

/// Pick-freeze estimates from two independent LHS base designs A and B and
/// the d cross designs AB_i (column i from B). First-order indices use the
/// Janon estimator on (f(B), f(AB_i)); total indices use the Jansen
/// estimator on (f(A), f(AB_i)). Costs n_base * (d + 2) evaluations.
/// Throws Error(invalid_argument) for n_base < 64 and Error(zero_variance)
/// for a (numerically) constant output.
SobolResult sobol_indices(const PointFunction& f, const DesignSpace& space,
                          std::size_t n_base, std::uint64_t seed,
                          const SobolOptions& options = {});

/// Names of the k parameters with the largest total index; ties fall back to
/// the first-order index and then to declaration order.
std::vector<std::string> rank_uncertain_parameters(const SobolResult& result,
                                                   const DesignSpace& space, std::size_t k);

/// parameter, first_order, total, first_order_se, total_se; negative
/// estimates are reported as 0.
CsvTable sobol_table(const SobolResult& result, const DesignSpace& space);

}  // namespace rdo
