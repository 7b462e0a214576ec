#include "rdo/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "rdo/doe.hpp"
#include "rdo/error.hpp"
#include "rdo/random.hpp"

namespace rdo {

namespace {

std::string describe(std::span<const double> v) {
  std::ostringstream out;
  out.precision(17);
  out << '[';
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
  out << ']';
  return out.str();
}

double evaluate_perturbed(const Response& f, std::span<const double> x, std::span<const double> du,
                          const UncertaintySpec& u) {
  const PerturbedPoint p = apply_perturbation(x, du, u);
  try {
    return f(p.geometry, p.material);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::evaluator_failure,
                "evaluation failed for perturbation " + describe(du) + ": " + e.what());
  }
}

SampleSet unit_design(std::size_t n, std::size_t d, std::uint64_t seed) {
  return n >= 2 ? maximin_lhs(n, d, seed) : lhs(n, d, seed);
}

}  // namespace

std::vector<std::vector<double>> perturbation_sample(const UncertaintySpec& u, std::size_t n,
                                                     std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "perturbation sample needs n >= 1");
  const Box box = perturbation_box(u);
  std::vector<std::vector<double>> rows(n, std::vector<double>(box.size(), 0.0));
  std::vector<std::size_t> geometric;
  for (std::size_t j = 0; j < u.geometric_size(); ++j) {
    if (!box.degenerate(j)) geometric.push_back(j);
  }
  if (!geometric.empty()) {
    const SampleSet s = unit_design(n, geometric.size(), derive_seed(seed, "perturbation-geometric"));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < geometric.size(); ++k) {
        const std::size_t j = geometric[k];
        rows[i][j] = box.lower[j] + box.width(j) * s.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      }
    }
  }
  if (u.include_material) {
    const std::size_t base = u.geometric_size();
    const SampleSet s = lhs(n, 2, derive_seed(seed, "perturbation-material"));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < 2; ++k) {
        rows[i][base + k] = box.lower[base + k] +
                            box.width(base + k) * s.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      }
    }
  }
  return rows;
}

std::vector<double> sample_outputs(const Response& f, std::span<const double> x, const UncertaintySpec& u,
                                   std::size_t n, std::uint64_t seed) {
  const auto rows = perturbation_sample(u, n, seed);
  std::vector<double> out;
  out.reserve(n);
  for (const auto& du : rows) out.push_back(evaluate_perturbed(f, x, du, u));
  return out;
}

double expectation(const Response& f, std::span<const double> x, const UncertaintySpec& u, std::size_t n,
                   std::uint64_t seed) {
  if (n < 16) throw Error(ErrorCode::invalid_argument, "expectation needs at least 16 samples");
  if (u.degenerate()) {
    if (x.size() != u.geometric_size()) throw Error(ErrorCode::dimension_mismatch, "design length differs from uncertainty");
    return f(x, MaterialState{});
  }
  const auto values = sample_outputs(f, x, u, n, seed);
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double quantile(std::span<const double> samples, double alpha) {
  if (samples.empty()) throw Error(ErrorCode::invalid_argument, "quantile of an empty sample");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::invalid_argument, "quantile level must lie in [0, 1]");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = alpha * static_cast<double>(sorted.size() - 1);  // zero-based
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

namespace {

std::pair<double, double> mean_std(std::span<const double> s) {
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(s.size());
  double ss = 0.0;
  for (double v : s) ss += (v - mean) * (v - mean);
  const double std = s.size() > 1 ? std::sqrt(ss / static_cast<double>(s.size() - 1)) : 0.0;
  return {mean, std};
}

}  // namespace

BoxplotStats boxplot_stats(std::span<const double> samples) {
  if (samples.size() < 4) throw Error(ErrorCode::invalid_argument, "boxplot needs at least 4 samples");
  BoxplotStats b;
  b.q1 = quantile(samples, 0.25);
  b.q2 = quantile(samples, 0.5);
  b.q3 = quantile(samples, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr, hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_low = b.q1;
  b.whisker_high = b.q3;
  for (double v : samples) {
    if (v >= lo_fence && v < b.whisker_low) b.whisker_low = v;
    if (v <= hi_fence && v > b.whisker_high) b.whisker_high = v;
  }
  std::tie(b.mean, b.std) = mean_std(samples);
  return b;
}

RobustnessStats robustness_stats(std::span<const double> samples) {
  if (samples.empty()) throw Error(ErrorCode::invalid_argument, "statistics of an empty sample");
  RobustnessStats s;
  std::tie(s.expectation, s.std) = mean_std(samples);
  for (double a : {0.10, 0.25, 0.50, 0.75, 0.90}) s.quantiles[a] = quantile(samples, a);
  s.sample_count = samples.size();
  s.min = *std::min_element(samples.begin(), samples.end());
  s.max = *std::max_element(samples.begin(), samples.end());
  // The mean of a sample can round just outside [min, max].
  s.expectation = std::clamp(s.expectation, s.min, s.max);
  return s;
}

WorstCase worst_case(const Response& f, std::span<const double> x, const UncertaintySpec& u, Sense sense,
                     const PsoConfig& pso_config, std::uint64_t seed) {
  const Box box = perturbation_box(u);
  WorstCase wc;
  if (box.active_dimensions().empty()) {
    wc.perturbation.assign(box.size(), 0.0);
    wc.value = evaluate_perturbed(f, x, wc.perturbation, u);
    wc.evaluations = 1;
    return wc;
  }
  const double sign = sense == Sense::max ? -1.0 : 1.0;
  PsoConfig cfg = pso_config;
  cfg.seed = seed;
  const PsoResult r = pso([&](std::span<const double> du) { return sign * evaluate_perturbed(f, x, du, u); }, box, cfg);
  wc.value = sign * r.value;
  wc.perturbation = r.x;
  wc.evaluations = r.evaluations;
  wc.budget_exhausted = r.budget_exhausted;
  return wc;
}

MultiObjective make_objectives(const ResponsePair& responses, const UncertaintySpec& u, Formulation formulation,
                               const RobustSettings& settings, std::uint64_t seed) {
  switch (formulation) {
    case Formulation::deterministic:
      return [responses](std::span<const double> x) {
        const MaterialState nominal{};
        return std::vector<double>{-responses.torque(x, nominal), responses.ripple(x, nominal)};
      };
    case Formulation::expectation: {
      if (settings.expectation_samples < 16) {
        throw Error(ErrorCode::invalid_argument, "expectation needs at least 16 samples");
      }
      if (u.degenerate()) return make_objectives(responses, u, Formulation::deterministic, settings, seed);
      auto rows = std::make_shared<const std::vector<std::vector<double>>>(
          perturbation_sample(u, settings.expectation_samples, derive_seed(seed, "expectation")));
      return [responses, u, rows](std::span<const double> x) {
        double torque = 0.0, ripple = 0.0;
        for (const auto& du : *rows) {
          const PerturbedPoint p = apply_perturbation(x, du, u);
          torque += responses.torque(p.geometry, p.material);
          ripple += responses.ripple(p.geometry, p.material);
        }
        const double n = static_cast<double>(rows->size());
        return std::vector<double>{-torque / n, ripple / n};
      };
    }
    case Formulation::worst_case: {
      const std::uint64_t torque_seed = derive_seed(seed, "worst-case-torque");
      const std::uint64_t ripple_seed = derive_seed(seed, "worst-case-ripple");
      const PsoConfig pso_config = settings.worst_case_pso;
      return [responses, u, pso_config, torque_seed, ripple_seed](std::span<const double> x) {
        const WorstCase t = worst_case(responses.torque, x, u, Sense::min, pso_config, torque_seed);
        const WorstCase r = worst_case(responses.ripple, x, u, Sense::max, pso_config, ripple_seed);
        return std::vector<double>{-t.value, r.value};
      };
    }
  }
  throw Error(ErrorCode::invalid_argument, "unknown formulation");
}

}  // namespace rdo
