#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rdo/csv.hpp"
#include "rdo/design_space.hpp"
#include "rdo/evaluator.hpp"

namespace rdo {

// ---------------------------------------------------------------------------
// Particle swarm (global best, inertia weight)

struct PsoConfig {
  std::size_t particles = 40;
  std::size_t iterations = 200;
  double inertia = 0.729;
  double cognitive = 1.494;
  double social = 1.494;
  double velocity_clamp = 0.5;  // fraction of the box width per dimension
  /// Stop after this many iterations without improvement (0 = never).
  std::size_t patience = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PsoResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  /// The best value was still improving when the iteration budget ran out.
  bool budget_exhausted = false;
};

/// Minimizes `objective` over `box`. Particles leaving the box are put back
/// on the violated face with their velocity component reversed. Degenerate
/// dimensions stay fixed. Ties keep the lowest particle index.
PsoResult pso(const PointFunction& objective, const Box& box, const PsoConfig& config);

// ---------------------------------------------------------------------------
// NSGA-II

using MultiObjective = std::function<std::vector<double>(std::span<const double>)>;

struct Individual {
  DesignPoint x;
  std::vector<double> objectives;
  std::size_t rank = 0;
  double crowding = 0.0;
};

enum class Formulation { deterministic, expectation, worst_case };
enum class UncertaintyTag { none, ug, ug_um };

const char* to_string(Formulation f);
const char* to_string(UncertaintyTag u);
Formulation parse_formulation(const std::string& s);
UncertaintyTag parse_uncertainty_tag(const std::string& s);

struct ParetoFront {
  std::vector<Individual> individuals;
  Formulation formulation = Formulation::deterministic;
  UncertaintyTag uncertainty = UncertaintyTag::none;
  std::uint64_t seed = 0;
  std::size_t evaluations = 0;

  std::size_t size() const { return individuals.size(); }
  bool empty() const { return individuals.empty(); }
};

struct Nsga2Config {
  std::size_t population = 150;
  std::size_t generations = 300;
  double crossover_probability = 0.9;
  double crossover_eta = 15.0;
  /// Per-variable mutation probability; negative selects 1/d.
  double mutation_probability = -1.0;
  double mutation_eta = 20.0;
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  void validate() const;
};

/// Called after survival selection of every generation (0 = initial).
using GenerationObserver =
    std::function<void(std::size_t generation, const std::vector<Individual>& population)>;

/// Elitist NSGA-II over a box: fast non-dominated sorting, crowding distance,
/// binary tournaments, SBX crossover and polynomial mutation. Identical
/// designs within one generation are evaluated once. Returns the distinct
/// rank-0 members of the final population sorted by the first objective.
/// Evaluator exceptions are rethrown as Error(evaluator_failure) naming x.
ParetoFront nsga2(const MultiObjective& objectives, const Box& box, const Nsga2Config& config,
                  const GenerationObserver& observer = {});
ParetoFront nsga2(const MultiObjective& objectives, const DesignSpace& space,
                  const Nsga2Config& config, const GenerationObserver& observer = {});

/// Weak Pareto dominance for minimization.
bool dominates(std::span<const double> a, std::span<const double> b);

/// Partition into fronts of indices by domination rank (front 0 first).
std::vector<std::vector<std::size_t>> non_dominated_sort(const std::vector<Individual>& pop);

/// Crowding distance of the members of one front; boundary members get
/// infinity.
void assign_crowding(std::vector<Individual>& pop, const std::vector<std::size_t>& front);

/// Mutually non-dominated subset, preserving order.
std::vector<Individual> non_dominated(const std::vector<Individual>& pop);

/// Two-objective hypervolume against `reference`. Points that do not
/// strictly dominate the reference are excluded and counted in `excluded`.
double hypervolume(const std::vector<Individual>& points, std::array<double, 2> reference,
                   std::size_t* excluded = nullptr);

/// Mean Euclidean distance from each front member to its nearest reference
/// point in objective space.
double generational_distance(const std::vector<Individual>& front,
                             const std::vector<std::array<double, 2>>& reference);

/// x columns, f1, f2, formulation, uncertainty.
CsvTable front_table(const ParetoFront& front, const std::vector<std::string>& names);
ParetoFront front_from_table(const CsvTable& table, const std::vector<std::string>& names);

}  // namespace rdo
