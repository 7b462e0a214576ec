#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "rdo/design_space.hpp"
#include "rdo/evaluator.hpp"
#include "rdo/optimizers.hpp"

namespace rdo {

/// n perturbation vectors (rows) drawn from the perturbation box.
///
/// Geometric half-widths are covered by a maximin LHS over the
/// non-degenerate dimensions only; alpha and beta come from a separate LHS
/// stream, so the geometric rows do not depend on whether the material is
/// uncertain. Degenerate dimensions are exactly 0.
std::vector<std::vector<double>> perturbation_sample(const UncertaintySpec& u, std::size_t n,
                                                     std::uint64_t seed);

/// f(x + u_i) for every row of perturbation_sample(u, n, seed).
std::vector<double> sample_outputs(const Response& f, std::span<const double> x,
                                   const UncertaintySpec& u, std::size_t n, std::uint64_t seed);

/// Quasi-Monte Carlo mean of f(x + U); exactly f(x) for a zero-measure box.
/// Requires n >= 16.
double expectation(const Response& f, std::span<const double> x, const UncertaintySpec& u,
                   std::size_t n, std::uint64_t seed);

/// Linear-interpolation sample quantile at order-statistic position
/// 1 + alpha (n - 1).
double quantile(std::span<const double> samples, double alpha);

struct BoxplotStats {
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;   // most extreme sample >= q1 - 1.5 IQR
  double whisker_high = 0.0;  // most extreme sample <= q3 + 1.5 IQR
  double std = 0.0;
  double mean = 0.0;
};

/// Requires at least 4 samples.
BoxplotStats boxplot_stats(std::span<const double> samples);

struct RobustnessStats {
  double expectation = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
  std::map<double, double> quantiles;  // alpha in {0.10, 0.25, 0.50, 0.75, 0.90}
  std::optional<double> worst_case;
  std::size_t sample_count = 0;
  double min = 0.0;
  double max = 0.0;
};

RobustnessStats robustness_stats(std::span<const double> samples);

enum class Sense { max, min };

struct WorstCase {
  double value = 0.0;
  std::vector<double> perturbation;  // argument u*, in perturbation-box coordinates
  std::size_t evaluations = 0;
  bool budget_exhausted = false;
};

/// Extreme of f(x + u) over the perturbation box by PSO (seeded with `seed`).
/// Returns f(x) directly when the box has zero measure.
WorstCase worst_case(const Response& f, std::span<const double> x, const UncertaintySpec& u,
                     Sense sense, const PsoConfig& pso, std::uint64_t seed);

/// Inner-loop settings of the robust formulations.
struct RobustSettings {
  std::size_t expectation_samples = 128;
  PsoConfig worst_case_pso{};
};

/// Objective vector (f1 = -mean torque, f2 = torque ripple) under a
/// formulation. Expectation objectives share one perturbation sample and
/// worst-case objectives one PSO seed per output across all designs, so the
/// returned function is deterministic in x (common random numbers).
MultiObjective make_objectives(const ResponsePair& responses, const UncertaintySpec& u,
                               Formulation formulation, const RobustSettings& settings,
                               std::uint64_t seed);

}  // namespace rdo
