#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rdo/doe.hpp"
#include "rdo/evaluator.hpp"

namespace rdo {

enum class KernelFamily { matern52, abs_exp };

const char* to_string(KernelFamily family);
KernelFamily parse_kernel_family(const std::string& name);

/// Tensorized stationary kernel over normalized inputs.
struct KernelSpec {
  KernelFamily family = KernelFamily::matern52;
  std::vector<double> lengthscales;  // one per input dimension, > 0
  double variance = 1.0;             // process variance in output units

  /// Correlation (unit variance) between two normalized points.
  double correlation(std::span<const double> a, std::span<const double> b) const;
};

struct KrigingFitOptions {
  std::size_t starts = 16;
  double nugget_floor = 1e-8;  // relative to the output variance
  double nugget_max = 1e-4;
  double min_lengthscale = 1e-2;
  double max_lengthscale = 10.0;
  /// Local search budgets per start (screening) and for the final refinement
  /// of the best `refine_best` starts; 0 selects 10(d+1) and 60(d+1).
  std::size_t screen_evaluations = 0;
  std::size_t refine_evaluations = 0;
  std::size_t refine_best = 2;
  std::size_t workers = 1;
};

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Universal Kriging with a linear trend (1, x_1, ..., x_d).
///
/// Inputs are normalized to the unit cube with the bounds carried by the
/// training SampleSet; outputs are standardized by their training mean and
/// standard deviation. Immutable after construction, predict is reentrant.
class KrigingModel {
 public:
  /// Maximum-likelihood fit with the trend profiled out by generalized least
  /// squares and the process variance concentrated. Throws
  /// Error(invalid_argument) on bad shapes or non-finite outputs and
  /// Error(fit_error) on a rank-deficient trend or an unfactorizable
  /// covariance.
  static KrigingModel fit(const SampleSet& inputs, std::span<const double> outputs,
                          KernelFamily family, std::uint64_t seed,
                          const KrigingFitOptions& options = {});

  /// Rebuilds a model from stored hyperparameters (used when loading).
  static KrigingModel from_hyperparameters(const SampleSet& inputs,
                                           std::span<const double> outputs,
                                           KernelFamily family,
                                           std::vector<double> lengthscales,
                                           double nugget);

  Prediction predict(std::span<const double> x) const;
  double predict_mean(std::span<const double> x) const;

  std::size_t dimension() const { return static_cast<std::size_t>(z_.cols()); }
  std::size_t training_size() const { return static_cast<std::size_t>(z_.rows()); }
  /// Kernel with lengthscales in normalized units and variance in output units.
  KernelSpec kernel() const;
  double nugget() const { return nugget_; }
  /// Trend coefficients in standardized output units over normalized inputs.
  const Eigen::VectorXd& trend() const { return beta_; }
  double log_likelihood() const { return log_likelihood_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<double>& input_lower() const { return lower_; }
  const std::vector<double>& input_upper() const { return upper_; }

  /// Training data back in native units.
  SampleSet training_inputs() const;
  std::vector<double> training_outputs() const;

 private:
  KrigingModel() = default;
  void normalize(std::span<const double> x, double* z) const;

  KernelFamily family_ = KernelFamily::matern52;
  std::vector<std::string> names_;
  std::vector<double> lower_, upper_;
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  RowMatrix z_;  // n x d normalized inputs
  Eigen::VectorXd y_;  // standardized outputs
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  std::vector<double> inv_lengthscales_;
  double sigma2_ = 1.0;  // standardized units
  double nugget_ = 0.0;
  double log_likelihood_ = 0.0;
  Eigen::VectorXd beta_;
  Eigen::VectorXd weights_;  // R^-1 (y - F beta)
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::MatrixXd whitened_trend_;  // L^-1 F
  Eigen::LLT<Eigen::MatrixXd> trend_gram_;
};

/// ||y_real - y_pred|| / ||y_real|| * 100 with Euclidean norms.
/// Throws Error(undefined_metric) when ||y_real|| = 0 and
/// Error(dimension_mismatch) on unequal or empty inputs.
double nrmse(std::span<const double> y_real, std::span<const double> y_pred);

/// Self-describing JSON document: format tag, version, kernel family,
/// hyperparameters, bounds and training data.
std::string serialize_model(const KrigingModel& model);
KrigingModel deserialize_model(const std::string& text);
void save_model(const KrigingModel& model, const std::string& path);
KrigingModel load_model(const std::string& path);

/// Adapts a model to the Response contract. A model over `n_geometric`
/// inputs only accepts the nominal material state unless the output is
/// declared material invariant (then the material state is ignored); a model
/// over `n_geometric + 2` inputs takes (alpha, beta) as its last inputs.
Response as_response(std::shared_ptr<const KrigingModel> model, std::size_t n_geometric,
                     bool material_invariant = false);

}  // namespace rdo
