#include "rdo/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "nelder_mead.hpp"
#include "rdo/error.hpp"
#include "rdo/parallel.hpp"
#include "rdo/random.hpp"

namespace rdo {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

const char* to_string(KernelFamily family) {
  return family == KernelFamily::matern52 ? "matern52" : "abs_exp";
}

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "matern52") return KernelFamily::matern52;
  if (name == "abs_exp") return KernelFamily::abs_exp;
  throw Error(ErrorCode::invalid_argument, "unknown kernel family '" + name + "'");
}

namespace {

constexpr double kSqrt5 = 2.23606797749978969640917366873128;
constexpr double kMinSigma2 = 1e-14;

// Tensorized correlation over normalized coordinates.
inline double correlate(KernelFamily family, const double* a, const double* b,
                        const double* inv_theta, std::size_t d) {
  if (family == KernelFamily::abs_exp) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += std::abs(a[j] - b[j]) * inv_theta[j];
    return std::exp(-s);
  }
  double s = 0.0;
  double poly = 1.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double r = kSqrt5 * std::abs(a[j] - b[j]) * inv_theta[j];
    s += r;
    poly *= 1.0 + r + r * r / 3.0;
  }
  return s > 700.0 ? 0.0 : poly * std::exp(-s);
}

// The nugget belongs to the covariance of a training point with itself, so
// it also applies when a prediction lands exactly on a training input; this
// keeps the predictor an interpolator of the data.
inline bool coincident(const double* a, const double* b, std::size_t d) {
  for (std::size_t j = 0; j < d; ++j) {
    if (a[j] != b[j]) return false;
  }
  return true;
}

Eigen::MatrixXd trend_matrix(const RowMatrix& z) {
  Eigen::MatrixXd f(z.rows(), z.cols() + 1);
  f.col(0).setOnes();
  f.rightCols(z.cols()) = z;
  return f;
}

struct Factorization {
  bool ok = false;
  double nugget = 0.0;
  double nll = std::numeric_limits<double>::infinity();
  double sigma2 = 1.0;
  Eigen::LLT<Eigen::MatrixXd> chol;
  Eigen::MatrixXd whitened_trend;
  Eigen::LLT<Eigen::MatrixXd> trend_gram;
  Eigen::VectorXd beta;
  Eigen::VectorXd weights;
};

// Covariance factorization with profiled trend and concentrated variance.
// The nugget starts at `floor` and grows tenfold on failure up to `max`.
Factorization factorize(KernelFamily family, const RowMatrix& z, const Eigen::VectorXd& y,
                        const Eigen::MatrixXd& f, const std::vector<double>& inv_theta,
                        double floor, double max) {
  const auto n = z.rows();
  const auto d = static_cast<std::size_t>(z.cols());
  Eigen::MatrixXd r(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    r(i, i) = 1.0;
    for (Eigen::Index k = 0; k < i; ++k) {
      r(i, k) = correlate(family, z.row(i).data(), z.row(k).data(), inv_theta.data(), d);
    }
  }

  Factorization out;
  for (double nugget = floor; nugget <= max * (1.0 + 1e-9); nugget *= 10.0) {
    Eigen::MatrixXd rn = r;
    rn.diagonal().array() += nugget;
    out.chol.compute(rn.selfadjointView<Eigen::Lower>());
    if (out.chol.info() != Eigen::Success) continue;
    const auto& l = out.chol.matrixL();
    bool positive = true;
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double li = out.chol.matrixLLT()(i, i);
      if (!(li > 0.0) || !std::isfinite(li)) {
        positive = false;
        break;
      }
      log_det += 2.0 * std::log(li);
    }
    if (!positive) continue;

    out.whitened_trend = l.solve(f);
    const Eigen::VectorXd c = l.solve(y);
    out.trend_gram.compute(out.whitened_trend.transpose() * out.whitened_trend);
    if (out.trend_gram.info() != Eigen::Success) continue;
    out.beta = out.trend_gram.solve(out.whitened_trend.transpose() * c);
    const Eigen::VectorXd resid = c - out.whitened_trend * out.beta;
    out.sigma2 = std::max(resid.squaredNorm() / static_cast<double>(n), kMinSigma2);
    out.weights = l.transpose().solve(resid);
    out.nll = static_cast<double>(n) * std::log(out.sigma2) + log_det;
    out.nugget = nugget;
    out.ok = std::isfinite(out.nll);
    if (out.ok) return out;
  }
  out.ok = false;
  out.nll = std::numeric_limits<double>::infinity();
  return out;
}

void check_training(const SampleSet& inputs, std::span<const double> outputs) {
  if (inputs.size() != outputs.size()) {
    throw Error(ErrorCode::invalid_argument, "inputs and outputs differ in length");
  }
  if (inputs.dimension() == 0) throw Error(ErrorCode::invalid_argument, "no input dimensions");
  if (inputs.size() < inputs.dimension() + 2) {
    throw Error(ErrorCode::invalid_argument,
                "Kriging needs at least d + 2 = " + std::to_string(inputs.dimension() + 2) +
                    " training points, got " + std::to_string(inputs.size()));
  }
  for (double v : outputs) {
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "non-finite training output");
  }
}

}  // namespace

double KernelSpec::correlation(std::span<const double> a, std::span<const double> b) const {
  if (a.size() != lengthscales.size() || b.size() != lengthscales.size()) {
    throw Error(ErrorCode::dimension_mismatch, "kernel input dimension mismatch");
  }
  std::vector<double> inv(lengthscales.size());
  for (std::size_t j = 0; j < inv.size(); ++j) inv[j] = 1.0 / lengthscales[j];
  return correlate(family, a.data(), b.data(), inv.data(), inv.size());
}

KrigingModel KrigingModel::fit(const SampleSet& inputs, std::span<const double> outputs,
                               KernelFamily family, std::uint64_t seed,
                               const KrigingFitOptions& options) {
  check_training(inputs, outputs);
  const std::size_t d = inputs.dimension();
  std::vector<double> theta(d, 1.0);

  KrigingModel probe = from_hyperparameters(inputs, outputs, family, theta, options.nugget_floor);
  if (probe.y_scale_ == 1.0 && probe.y_.squaredNorm() == 0.0) return probe;  // constant output

  const Eigen::MatrixXd f = trend_matrix(probe.z_);
  const double log_lo = std::log(options.min_lengthscale);
  const double log_hi = std::log(options.max_lengthscale);
  const std::vector<double> lower(d, log_lo), upper(d, log_hi);

  auto objective = [&](const std::vector<double>& log_theta) {
    std::vector<double> inv(d);
    for (std::size_t j = 0; j < d; ++j) inv[j] = std::exp(-log_theta[j]);
    return factorize(family, probe.z_, probe.y_, f, inv, options.nugget_floor, options.nugget_max).nll;
  };

  const std::size_t screen = options.screen_evaluations ? options.screen_evaluations : 10 * (d + 1);
  const std::size_t refine = options.refine_evaluations ? options.refine_evaluations : 60 * (d + 1);
  const std::size_t starts = std::max<std::size_t>(options.starts, 1);
  const SampleSet design = lhs(starts, d, derive_seed(seed, "kriging-starts"));

  std::vector<detail::SimplexResult> screened(starts);
  parallel_for(starts, options.workers, [&](std::size_t s) {
    std::vector<double> x0(d);
    for (std::size_t j = 0; j < d; ++j) {
      x0[j] = log_lo + (log_hi - log_lo) * design.points(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j));
    }
    screened[s] = detail::nelder_mead(objective, x0, lower, upper, 0.5, screen);
  });

  std::vector<std::size_t> order(starts);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return screened[a].value < screened[b].value;
  });
  const std::size_t n_refine = std::min(std::max<std::size_t>(options.refine_best, 1), starts);
  std::vector<detail::SimplexResult> refined(n_refine);
  parallel_for(n_refine, options.workers, [&](std::size_t r) {
    refined[r] = detail::nelder_mead(objective, screened[order[r]].x, lower, upper, 0.25, refine);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < n_refine; ++r) {
    if (refined[r].value < refined[best].value) best = r;
  }
  if (!std::isfinite(refined[best].value)) {
    throw Error(ErrorCode::fit_error, "covariance matrix could not be factorized for any hyperparameters");
  }
  for (std::size_t j = 0; j < d; ++j) theta[j] = std::exp(refined[best].x[j]);
  return from_hyperparameters(inputs, outputs, family, theta, options.nugget_floor);
}

KrigingModel KrigingModel::from_hyperparameters(const SampleSet& inputs,
                                                std::span<const double> outputs,
                                                KernelFamily family,
                                                std::vector<double> lengthscales,
                                                double nugget) {
  check_training(inputs, outputs);
  const std::size_t n = inputs.size();
  const std::size_t d = inputs.dimension();
  if (lengthscales.size() != d) throw Error(ErrorCode::dimension_mismatch, "lengthscale count differs from input dimension");
  for (double t : lengthscales) {
    if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorCode::invalid_argument, "lengthscales must be positive");
  }

  KrigingModel m;
  m.family_ = family;
  m.names_ = inputs.names;
  if (inputs.scaled()) {
    m.lower_ = inputs.lower;
    m.upper_ = inputs.upper;
  } else {
    m.lower_.assign(d, 0.0);
    m.upper_.assign(d, 1.0);
  }
  m.z_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      m.z_(ii, jj) = (inputs.points(ii, jj) - m.lower_[j]) / (m.upper_[j] - m.lower_[j]);
    }
  }

  double mean = 0.0;
  for (double v : outputs) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : outputs) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  m.y_mean_ = mean;
  m.y_scale_ = var > 0.0 ? std::sqrt(var) : 1.0;
  m.y_.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) m.y_(static_cast<Eigen::Index>(i)) = (outputs[i] - mean) / m.y_scale_;

  const Eigen::MatrixXd f = trend_matrix(m.z_);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(f);
  if (qr.rank() < f.cols()) {
    throw Error(ErrorCode::fit_error, "trend matrix is rank deficient (" + std::to_string(qr.rank()) +
                                          " < " + std::to_string(f.cols()) + ")");
  }

  m.inv_lengthscales_.resize(d);
  for (std::size_t j = 0; j < d; ++j) m.inv_lengthscales_[j] = 1.0 / lengthscales[j];
  // A stored nugget may sit above the floor; the floor search restarts from it.
  Factorization fac = factorize(family, m.z_, m.y_, f, m.inv_lengthscales_, nugget,
                                std::max(nugget, 1e-4));
  if (!fac.ok) throw Error(ErrorCode::fit_error, "covariance matrix is not positive definite");
  m.nugget_ = fac.nugget;
  m.sigma2_ = fac.sigma2;
  m.beta_ = std::move(fac.beta);
  m.weights_ = std::move(fac.weights);
  m.chol_ = std::move(fac.chol);
  m.whitened_trend_ = std::move(fac.whitened_trend);
  m.trend_gram_ = std::move(fac.trend_gram);
  m.log_likelihood_ = -0.5 * (fac.nll + static_cast<double>(n) * (1.0 + std::log(2.0 * std::numbers::pi)));
  return m;
}

void KrigingModel::normalize(std::span<const double> x, double* z) const {
  if (x.size() != dimension()) {
    throw Error(ErrorCode::dimension_mismatch, "prediction input has " + std::to_string(x.size()) +
                                                   " values, model expects " + std::to_string(dimension()));
  }
  for (std::size_t j = 0; j < x.size(); ++j) z[j] = (x[j] - lower_[j]) / (upper_[j] - lower_[j]);
}

double KrigingModel::predict_mean(std::span<const double> x) const {
  const std::size_t d = dimension();
  double stack[64];
  std::vector<double> heap;
  double* z = stack;
  if (d > 64) {
    heap.resize(d);
    z = heap.data();
  }
  normalize(x, z);
  double mean = beta_(0);
  for (std::size_t j = 0; j < d; ++j) mean += beta_(static_cast<Eigen::Index>(j) + 1) * z[j];
  const auto n = z_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    double c = correlate(family_, z, z_.row(i).data(), inv_lengthscales_.data(), d);
    if (coincident(z, z_.row(i).data(), d)) c += nugget_;
    mean += weights_(i) * c;
  }
  return y_mean_ + y_scale_ * mean;
}

Prediction KrigingModel::predict(std::span<const double> x) const {
  const std::size_t d = dimension();
  std::vector<double> z(d);
  normalize(x, z.data());
  const auto n = z_.rows();
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i) = correlate(family_, z.data(), z_.row(i).data(), inv_lengthscales_.data(), d);
    if (coincident(z.data(), z_.row(i).data(), d)) k(i) += nugget_;
  }
  Eigen::VectorXd fx(static_cast<Eigen::Index>(d) + 1);
  fx(0) = 1.0;
  for (std::size_t j = 0; j < d; ++j) fx(static_cast<Eigen::Index>(j) + 1) = z[j];

  const double mean = fx.dot(beta_) + k.dot(weights_);
  const Eigen::VectorXd w = chol_.matrixL().solve(k);
  const Eigen::VectorXd u = whitened_trend_.transpose() * w - fx;
  double var = sigma2_ * (1.0 + nugget_ - w.squaredNorm() + u.dot(trend_gram_.solve(u)));
  var = std::max(var, 0.0);
  return {y_mean_ + y_scale_ * mean, var * y_scale_ * y_scale_};
}

KernelSpec KrigingModel::kernel() const {
  KernelSpec k;
  k.family = family_;
  for (double inv : inv_lengthscales_) k.lengthscales.push_back(1.0 / inv);
  k.variance = sigma2_ * y_scale_ * y_scale_;
  return k;
}

SampleSet KrigingModel::training_inputs() const {
  SampleSet s;
  s.kind = SampleKind::maximin_lhs;
  s.names = names_;
  s.lower = lower_;
  s.upper = upper_;
  s.points.resize(z_.rows(), z_.cols());
  for (Eigen::Index i = 0; i < z_.rows(); ++i) {
    for (Eigen::Index j = 0; j < z_.cols(); ++j) {
      const auto jj = static_cast<std::size_t>(j);
      s.points(i, j) = lower_[jj] + z_(i, j) * (upper_[jj] - lower_[jj]);
    }
  }
  return s;
}

std::vector<double> KrigingModel::training_outputs() const {
  std::vector<double> out(static_cast<std::size_t>(y_.size()));
  for (Eigen::Index i = 0; i < y_.size(); ++i) out[static_cast<std::size_t>(i)] = y_mean_ + y_scale_ * y_(i);
  return out;
}

double nrmse(std::span<const double> y_real, std::span<const double> y_pred) {
  if (y_real.empty() || y_real.size() != y_pred.size()) {
    throw Error(ErrorCode::dimension_mismatch, "NRMSE needs two non-empty vectors of equal length");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < y_real.size(); ++i) {
    num += (y_real[i] - y_pred[i]) * (y_real[i] - y_pred[i]);
    den += y_real[i] * y_real[i];
  }
  if (den == 0.0) throw Error(ErrorCode::undefined_metric, "NRMSE is undefined for a zero reference vector");
  return std::sqrt(num) / std::sqrt(den) * 100.0;
}

namespace {

constexpr const char* kModelFormat = "rdo-kriging";
constexpr int kModelVersion = 1;

}  // namespace

std::string serialize_model(const KrigingModel& model) {
  nlohmann::json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["family"] = to_string(model.kernel().family);
  j["names"] = model.names();
  j["input_lower"] = model.input_lower();
  j["input_upper"] = model.input_upper();
  j["lengthscales"] = model.kernel().lengthscales;
  j["process_variance"] = model.kernel().variance;
  j["nugget"] = model.nugget();
  j["log_likelihood"] = model.log_likelihood();
  std::vector<double> trend(model.trend().data(), model.trend().data() + model.trend().size());
  j["trend_standardized"] = trend;
  const SampleSet x = model.training_inputs();
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < x.size(); ++i) rows.push_back(x.row(i));
  j["training_inputs"] = std::move(rows);
  j["training_outputs"] = model.training_outputs();
  return j.dump(1) + "\n";
}

KrigingModel deserialize_model(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kModelFormat) {
      throw Error(ErrorCode::parse_error, "not a Kriging model file");
    }
    if (j.at("version").get<int>() != kModelVersion) {
      throw Error(ErrorCode::parse_error, "unsupported model version " + std::to_string(j.at("version").get<int>()));
    }
    SampleSet x;
    x.names = j.at("names").get<std::vector<std::string>>();
    x.lower = j.at("input_lower").get<std::vector<double>>();
    x.upper = j.at("input_upper").get<std::vector<double>>();
    const auto rows = j.at("training_inputs").get<std::vector<std::vector<double>>>();
    const std::size_t d = x.lower.size();
    x.points.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != d) throw Error(ErrorCode::parse_error, "ragged training input row");
      for (std::size_t k = 0; k < d; ++k) x.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
    const auto y = j.at("training_outputs").get<std::vector<double>>();
    return KrigingModel::from_hyperparameters(x, y, parse_kernel_family(j.at("family").get<std::string>()),
                                              j.at("lengthscales").get<std::vector<double>>(),
                                              j.at("nugget").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed model file: ") + e.what());
  }
}

void save_model(const KrigingModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write model '" + path + "'");
  out << serialize_model(model);
}

KrigingModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open model '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return deserialize_model(buffer.str());
}

Response as_response(std::shared_ptr<const KrigingModel> model, std::size_t n_geometric,
                     bool material_invariant) {
  const std::size_t d = model->dimension();
  if (d != n_geometric && d != n_geometric + 2) {
    throw Error(ErrorCode::dimension_mismatch, "surrogate over " + std::to_string(d) +
                                                   " inputs cannot serve a " + std::to_string(n_geometric) +
                                                   "-parameter geometry");
  }
  return [model = std::move(model), n_geometric, d, material_invariant](std::span<const double> geometry,
                                                                        const MaterialState& material) {
    if (geometry.size() != n_geometric) {
      throw Error(ErrorCode::dimension_mismatch, "geometry length differs from the surrogate's");
    }
    if (d == n_geometric) {
      if (!material_invariant && !material.nominal()) {
        throw Error(ErrorCode::invalid_argument, "surrogate was trained at nominal material only");
      }
      return model->predict_mean(geometry);
    }
    double buf[66];
    std::vector<double> heap;
    double* x = buf;
    if (d > 66) {
      heap.resize(d);
      x = heap.data();
    }
    std::copy(geometry.begin(), geometry.end(), x);
    x[n_geometric] = material.alpha;
    x[n_geometric + 1] = material.beta;
    return model->predict_mean(std::span<const double>(x, d));
  };
}

}  // namespace rdo
