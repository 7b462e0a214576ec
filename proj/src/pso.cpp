#include <algorithm>
#include <cmath>
#include <limits>

#include "rdo/error.hpp"
#include "rdo/optimizers.hpp"
#include "rdo/random.hpp"

namespace rdo {

void PsoConfig::validate() const {
  if (particles < 1 || iterations < 1) {
    throw Error(ErrorCode::invalid_argument, "PSO needs at least one particle and one iteration");
  }
  if (!(velocity_clamp > 0.0)) throw Error(ErrorCode::invalid_argument, "PSO velocity clamp must be positive");
}

PsoResult pso(const PointFunction& objective, const Box& box, const PsoConfig& config) {
  config.validate();
  const std::size_t d = box.size();
  for (std::size_t j = 0; j < d; ++j) {
    if (!std::isfinite(box.lower[j]) || !std::isfinite(box.upper[j]) || box.upper[j] < box.lower[j]) {
      throw Error(ErrorCode::invalid_argument, "PSO box must be bounded");
    }
  }
  Rng rng(config.seed);
  const std::size_t np = config.particles;

  std::vector<std::vector<double>> x(np, std::vector<double>(d)), v = x, pbest = x;
  std::vector<double> pbest_value(np);
  std::vector<double> vmax(d);
  for (std::size_t j = 0; j < d; ++j) vmax[j] = config.velocity_clamp * box.width(j);

  PsoResult result;
  result.value = std::numeric_limits<double>::infinity();
  auto evaluate = [&](const std::vector<double>& p) {
    ++result.evaluations;
    const double f = objective(p);
    return std::isnan(f) ? std::numeric_limits<double>::infinity() : f;
  };

  std::size_t gbest = 0;
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      x[i][j] = box.degenerate(j) ? box.lower[j] : rng.uniform(box.lower[j], box.upper[j]);
      const double target = box.degenerate(j) ? box.lower[j] : rng.uniform(box.lower[j], box.upper[j]);
      v[i][j] = 0.5 * (target - x[i][j]);
    }
    pbest[i] = x[i];
    pbest_value[i] = evaluate(x[i]);
    if (pbest_value[i] < pbest_value[gbest]) gbest = i;
  }

  double best = pbest_value[gbest];
  std::size_t since_improvement = 0;
  double late_start_value = best;
  const std::size_t late_start = config.iterations - std::max<std::size_t>(config.iterations / 10, 1);

  for (std::size_t it = 0; it < config.iterations; ++it) {
    if (it == late_start) late_start_value = best;
    for (std::size_t i = 0; i < np; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        if (box.degenerate(j)) continue;
        const double r1 = rng.uniform(), r2 = rng.uniform();
        double vel = config.inertia * v[i][j] + config.cognitive * r1 * (pbest[i][j] - x[i][j]) +
                     config.social * r2 * (pbest[gbest][j] - x[i][j]);
        vel = std::clamp(vel, -vmax[j], vmax[j]);
        double pos = x[i][j] + vel;
        if (pos < box.lower[j]) {
          pos = box.lower[j];
          vel = -vel;
        } else if (pos > box.upper[j]) {
          pos = box.upper[j];
          vel = -vel;
        }
        x[i][j] = pos;
        v[i][j] = vel;
      }
      const double f = evaluate(x[i]);
      if (f < pbest_value[i]) {
        pbest_value[i] = f;
        pbest[i] = x[i];
      }
    }
    std::size_t g = gbest;
    for (std::size_t i = 0; i < np; ++i) {
      if (pbest_value[i] < pbest_value[g] || (pbest_value[i] == pbest_value[g] && i < g)) g = i;
    }
    gbest = g;
    if (pbest_value[gbest] < best) {
      best = pbest_value[gbest];
      since_improvement = 0;
    } else if (config.patience > 0 && ++since_improvement >= config.patience) {
      result.x = pbest[gbest];
      result.value = best;
      return result;
    }
  }

  result.x = pbest[gbest];
  result.value = best;
  result.budget_exhausted = best < late_start_value - 1e-12 * (1.0 + std::abs(best));
  return result;
}

}  // namespace rdo
