#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rdo/design_space.hpp"
#include "rdo/evaluator.hpp"
#include "rdo/optimizers.hpp"
#include "rdo/robustness.hpp"
#include "rdo/surrogate.hpp"

namespace rdo {

/// Settings of one pipeline run. Read from a `key = value` file; see
/// config/default.cfg for the keys and their defaults.
struct RunConfig {
  std::string space_file;          // empty: built-in 12-parameter space
  std::string evaluator = "bench";  // bench | surrogate
  std::size_t doe_size = 234;
  bool doe_material = false;  // add alpha and beta as DOE inputs
  /// With a material DOE, also give alpha and beta to the ripple surrogate.
  /// Off by default: ripple does not depend on the material state, and a
  /// geometry-only ripple model is then used as material invariant.
  bool ripple_material = false;
  double train_fraction = 0.75;
  KernelFamily kernel_torque = KernelFamily::matern52;
  KernelFamily kernel_ripple = KernelFamily::abs_exp;
  std::size_t fit_starts = 16;
  std::size_t sobol_base = 4096;
  std::size_t sobol_bootstrap = 100;
  std::size_t top_k = 5;
  std::vector<std::string> uncertain = {"Slot_angle", "Beta_L1_P1", "Beta_L1_P2", "Beta_L2_P1",
                                        "Beta_L2_P2"};
  Formulation formulation = Formulation::deterministic;
  UncertaintyTag uncertainty = UncertaintyTag::none;
  std::size_t population = 150;
  std::size_t generations = 300;
  std::size_t expectation_samples = 128;
  std::size_t wc_particles = 30;
  std::size_t wc_iterations = 60;
  std::size_t wc_patience = 15;
  std::size_t zones = 5;
  std::size_t boxplot_samples = 256;
  std::size_t derivative_points = 5000;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string out = "rdo_out";
};

/// Unknown keys and malformed values throw Error(parse_error).
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::string& path);

/// Controllable geometric space of the run.
DesignSpace run_space(const RunConfig& config);
UncertaintySpec run_uncertainty(const RunConfig& config, const DesignSpace& space);
RobustSettings run_robust_settings(const RunConfig& config);

/// Response pair selected by `config.evaluator`. Surrogates are read from
/// model_torque.json / model_ripple.json in the output directory.
struct Evaluators {
  ResponsePair responses;
  bool material_inputs = false;  // accepts non-nominal material states
  std::string description;
};
Evaluators load_evaluators(const RunConfig& config);

/// Inner-loop seed of a formulation. Shared by the Ug and Ug_Um runs and by
/// the posterior re-evaluation, so all of them see the same perturbations.
std::uint64_t objective_seed(const RunConfig& config, Formulation formulation);

/// Row order of the DOE for the train/test split: a seeded permutation whose
/// first train_size(n, fraction) entries are the training rows.
std::vector<std::size_t> split_order(std::size_t n, std::uint64_t seed);
std::size_t train_size(std::size_t n, double train_fraction);

/// File name of a persisted front, e.g. front_exp_ug.csv.
std::string front_file_name(Formulation formulation, UncertaintyTag uncertainty);

/// Stages of the workflow. Each reads the artifacts of the previous stage
/// from `config.out`, writes its own and returns a one-line summary.
std::string cmd_doe(const RunConfig& config);
std::string cmd_fit(const RunConfig& config);
std::string cmd_sobol(const RunConfig& config);
std::string cmd_optimize(const RunConfig& config);
std::string cmd_analyze(const RunConfig& config);

/// doe, fit, sobol, the five optimizations (det/none, exp and wc with Ug
/// and Ug_Um) and analyze. Ug_Um runs are skipped when the evaluator has no
/// material inputs.
std::vector<std::string> cmd_all(const RunConfig& config);

}  // namespace rdo
