#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rdo/design_space.hpp"
#include "rdo/evaluator.hpp"
#include "rdo/optimizers.hpp"
#include "rdo/robustness.hpp"

namespace rdo {

enum class RobustMetric { expectation, worst_case };

const char* to_string(RobustMetric metric);

/// Replaces every design's objectives by the chosen robustness metric (with
/// the same common random numbers as make_objectives for `seed`), drops
/// designs whose evaluation fails (a message is appended to `warnings`) and
/// keeps the non-dominated remainder.
ParetoFront reevaluate_front(const ParetoFront& front, const ResponsePair& responses,
                             const UncertaintySpec& u, RobustMetric metric,
                             const RobustSettings& settings, std::uint64_t seed,
                             std::vector<std::string>* warnings = nullptr);

/// One band of the common first-objective range and the member of each
/// front closest to the band centre (preferring members inside the band).
struct ZonePair {
  std::size_t zone = 0;
  double lower = 0.0;
  double upper = 0.0;
  double center = 0.0;
  std::size_t index_a = 0;
  std::size_t index_b = 0;
  bool a_in_band = false;
  bool b_in_band = false;
};

/// Splits the overlap of both fronts' f1 ranges into n_zones equal bands.
/// Throws Error(empty_overlap) when the ranges do not intersect.
std::vector<ZonePair> match_zones(const ParetoFront& a, const ParetoFront& b, std::size_t n_zones);

/// Piecewise-linear f2 of a front at a given f1; nullopt outside its range.
std::optional<double> front_value_at(const ParetoFront& front, double f1);

/// Ripple and torque distributions of a matched pair under perturbation.
struct ZoneBoxplot {
  std::size_t zone = 0;
  BoxplotStats ripple_a, ripple_b;
  BoxplotStats torque_a, torque_b;
  double worst_ripple_a = 0.0, worst_ripple_b = 0.0;  // sample maxima
};

std::vector<ZoneBoxplot> zone_boxplots(const ParetoFront& a, const ParetoFront& b,
                                       const std::vector<ZonePair>& zones,
                                       const ResponsePair& responses, const UncertaintySpec& u,
                                       std::size_t samples, std::uint64_t seed);

enum class DerivativeOrder { first, second };

/// Finite-difference derivatives of f with respect to the normalized
/// material coordinates a = alpha and b = beta / 0.065 (per unit of each
/// range), at one material grid point, over all geometry samples.
struct DerivativeSeries {
  MaterialState at;
  std::string component;  // "alpha", "beta" or "alpha_beta"
  std::vector<double> values;
  BoxplotStats stats;
  bool one_sided = false;
};

/// Derivatives of f at one geometry and material state, in the component
/// order of DerivativeSeries ("alpha", "beta" and, for second order,
/// "alpha_beta"). `one_sided` receives the boundary flag per component.
std::vector<double> material_derivatives(const Response& f, std::span<const double> geometry,
                                         const MaterialState& at, DerivativeOrder order,
                                         double step = 1e-3,
                                         std::vector<bool>* one_sided = nullptr);

struct DerivativeStudyOptions {
  double step = 1e-3;  // fraction of each material range
  std::size_t maximin_iterations = 2000;
  std::size_t workers = 1;
};

/// Central differences, switching to one-sided formulas (flagged) when a
/// grid point lies within one step of the material bounds. First order
/// yields alpha and beta series per grid point; second order adds the mixed
/// alpha_beta series.
std::vector<DerivativeSeries> derivative_study(const Response& f, const DesignSpace& geometry,
                                               std::size_t n_points,
                                               const std::vector<MaterialState>& grid,
                                               DerivativeOrder order, std::uint64_t seed,
                                               const DerivativeStudyOptions& options = {});

/// Per-zone check that the robust front is no worse than a reference front:
/// the robust front's f2, interpolated at the reference member's f1, must
/// not exceed the reference member's f2 by more than `tolerance`. Zone pairs
/// come from match_zones(robust, reference, n).
struct ZoneOrdering {
  std::vector<bool> holds;
  std::vector<double> robust_f2;
  std::vector<double> reference_f2;
  std::size_t count = 0;
};

ZoneOrdering zone_ordering(const ParetoFront& robust, const ParetoFront& reference,
                           const std::vector<ZonePair>& zones, double tolerance);

struct FrontShift {
  double offset = 0.0;    // mean torque difference (shifted minus base), N.m
  double residual = 0.0;  // max |difference - offset| over matched pairs
  std::size_t pairs = 0;
  RobustMetric metric = RobustMetric::expectation;
};

/// Matches each member of `shifted` to the base front at equal ripple (f2)
/// by linear interpolation along the base front, skipping gaps wider than
/// three median segment widths, and fits a constant torque offset. Throws
/// Error(invalid_argument) with fewer than 3 matched pairs.
FrontShift front_shift_check(const ParetoFront& base, const ParetoFront& shifted, RobustMetric metric);

}  // namespace rdo
