#pragma once

#include <functional>
#include <vector>

namespace rdo::detail {

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
};

/// Nelder-Mead minimization with iterates clamped to [lower, upper].
/// Stops after `max_evaluations` or when the simplex value spread falls
/// below `tolerance`.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> start, const std::vector<double>& lower,
                          const std::vector<double>& upper, double initial_step,
                          std::size_t max_evaluations, double tolerance = 1e-8);

}  // namespace rdo::detail
