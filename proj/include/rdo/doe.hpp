#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rdo/csv.hpp"
#include "rdo/design_space.hpp"

namespace rdo {

enum class SampleKind { lhs, maximin_lhs, grid };

/// n x d design matrix, either in the unit hypercube or scaled to a
/// DesignSpace (then `lower`/`upper` record the bounds used).
struct SampleSet {
  Eigen::MatrixXd points;
  std::uint64_t seed = 0;
  SampleKind kind = SampleKind::lhs;
  std::vector<std::string> names;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  std::size_t dimension() const { return static_cast<std::size_t>(points.cols()); }
  bool scaled() const { return !lower.empty(); }
  DesignPoint row(std::size_t i) const;
};

/// Plain Latin hypercube in [0,1)^d: one point per stratum [k/n, (k+1)/n)
/// in every column, uniformly placed within its stratum.
SampleSet lhs(std::size_t n, std::size_t d, std::uint64_t seed);

/// LHS improved by random within-column row swaps. A swap is kept when the
/// minimum pairwise distance does not drop and the summed nearest-neighbour
/// distance grows (or the minimum strictly grows). `iterations == 0` selects
/// the default budget of 10 * n * d.
SampleSet maximin_lhs(std::size_t n, std::size_t d, std::uint64_t seed,
                      std::size_t iterations = 0);

double min_pairwise_distance(const Eigen::MatrixXd& points);

/// True when every column of a unit-cube matrix has exactly one value per
/// stratum.
bool is_latin_hypercube(const Eigen::MatrixXd& unit_points);

/// Affine map of each column from [0,1] to the space's bounds.
SampleSet scale(const SampleSet& unit, const DesignSpace& space);
/// Inverse of scale.
SampleSet unscale(const SampleSet& scaled, const DesignSpace& space);

/// Header of parameter names followed by one row per point.
CsvTable to_csv(const SampleSet& samples);

}  // namespace rdo
