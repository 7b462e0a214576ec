#include "nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rdo::detail {

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> start, const std::vector<double>& lower,
                          const std::vector<double>& upper, double initial_step,
                          std::size_t max_evaluations, double tolerance) {
  const std::size_t d = start.size();
  std::size_t evals = 0;
  auto clamp = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < d; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
  };
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  clamp(start);
  std::vector<std::vector<double>> simplex(d + 1, start);
  std::vector<double> values(d + 1);
  for (std::size_t i = 0; i < d; ++i) {
    auto& v = simplex[i + 1];
    // Step inward when the start sits on the upper bound.
    v[i] += (v[i] + initial_step <= upper[i]) ? initial_step : -initial_step;
    clamp(v);
  }
  for (std::size_t i = 0; i <= d; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(d + 1);
  std::vector<double> centroid(d), trial(d), trial2(d);
  while (evals < max_evaluations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[d - (d > 0 ? 1 : 0)];
    if (std::abs(values[worst] - values[best]) <= tolerance * (1.0 + std::abs(values[best]))) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k <= d; ++k) {
      if (k == worst) continue;
      for (std::size_t i = 0; i < d; ++i) centroid[i] += simplex[k][i] / static_cast<double>(d);
    }
    auto along = [&](double t, std::vector<double>& out) {
      for (std::size_t i = 0; i < d; ++i) out[i] = centroid[i] + t * (simplex[worst][i] - centroid[i]);
      clamp(out);
    };

    along(-1.0, trial);  // reflection
    const double fr = eval(trial);
    if (fr < values[best]) {
      along(-2.0, trial2);  // expansion
      const double fe = eval(trial2);
      if (fe < fr) {
        simplex[worst] = trial2;
        values[worst] = fe;
      } else {
        simplex[worst] = trial;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = trial;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    along(outside ? -0.5 : 0.5, trial2);  // contraction
    const double fc = eval(trial2);
    if (fc < std::min(fr, values[worst])) {
      simplex[worst] = trial2;
      values[worst] = fc;
      continue;
    }
    for (std::size_t k = 0; k <= d; ++k) {  // shrink toward the best vertex
      if (k == best) continue;
      for (std::size_t i = 0; i < d; ++i) {
        simplex[k][i] = simplex[best][i] + 0.5 * (simplex[k][i] - simplex[best][i]);
      }
      values[k] = eval(simplex[k]);
    }
  }

  const auto it = std::min_element(values.begin(), values.end());
  const auto idx = static_cast<std::size_t>(it - values.begin());
  return {simplex[idx], values[idx], evals};
}

}  // namespace rdo::detail
