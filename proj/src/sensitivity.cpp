#include "rdo/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rdo/doe.hpp"
#include "rdo/error.hpp"
#include "rdo/parallel.hpp"
#include "rdo/random.hpp"

namespace rdo {

namespace {

struct Estimate {
  double first = 0.0;
  double total = 0.0;
};

// Estimators over an index subset (the full range or a bootstrap resample).
Estimate estimate(const std::vector<double>& fa, const std::vector<double>& fb,
                  const std::vector<double>& fab, const std::vector<std::size_t>& idx) {
  const double m = static_cast<double>(idx.size());
  double mean_pair = 0.0, cross = 0.0, squares = 0.0;
  double mean_all = 0.0, sq_all = 0.0, jansen = 0.0;
  for (std::size_t k : idx) {
    mean_pair += 0.5 * (fb[k] + fab[k]);
    cross += fb[k] * fab[k];
    squares += 0.5 * (fb[k] * fb[k] + fab[k] * fab[k]);
    mean_all += fa[k] + fb[k];
    sq_all += fa[k] * fa[k] + fb[k] * fb[k];
    jansen += (fa[k] - fab[k]) * (fa[k] - fab[k]);
  }
  mean_pair /= m;
  const double janon_den = squares / m - mean_pair * mean_pair;
  mean_all /= 2.0 * m;
  const double var = sq_all / (2.0 * m) - mean_all * mean_all;
  Estimate e;
  e.first = janon_den > 0.0 ? (cross / m - mean_pair * mean_pair) / janon_den : 0.0;
  e.total = var > 0.0 ? jansen / (2.0 * m) / var : 0.0;
  return e;
}

}  // namespace

SobolResult sobol_indices(const PointFunction& f, const DesignSpace& space, std::size_t n_base,
                          std::uint64_t seed, const SobolOptions& options) {
  if (n_base < 64) throw Error(ErrorCode::invalid_argument, "Sobol estimation needs n_base >= 64");
  const std::size_t d = space.size();
  const SampleSet a = scale(lhs(n_base, d, derive_seed(seed, "sobol-A")), space);
  const SampleSet b = scale(lhs(n_base, d, derive_seed(seed, "sobol-B")), space);

  // Row r of the evaluation plan: block 0 = A, block 1 = B, block 2 + i = AB_i.
  std::vector<double> values(n_base * (d + 2));
  parallel_for(values.size(), options.workers, [&](std::size_t r) {
    const std::size_t block = r / n_base;
    const auto row = static_cast<Eigen::Index>(r % n_base);
    DesignPoint x(d);
    for (std::size_t j = 0; j < d; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      if (block == 0) {
        x[j] = a.points(row, jj);
      } else if (block == 1) {
        x[j] = b.points(row, jj);
      } else {
        x[j] = (j == block - 2) ? b.points(row, jj) : a.points(row, jj);
      }
    }
    values[r] = f(x);
  });

  auto slice = [&](std::size_t block) {
    return std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(block * n_base),
                               values.begin() + static_cast<std::ptrdiff_t>((block + 1) * n_base));
  };
  const std::vector<double> fa = slice(0), fb = slice(1);

  SobolResult result;
  result.n_base = n_base;
  double mean = 0.0, sq = 0.0;
  for (std::size_t k = 0; k < n_base; ++k) {
    mean += fa[k] + fb[k];
    sq += fa[k] * fa[k] + fb[k] * fb[k];
  }
  mean /= 2.0 * static_cast<double>(n_base);
  const double var = sq / (2.0 * static_cast<double>(n_base)) - mean * mean;
  if (!(var > 1e-12 * mean * mean) || var <= 0.0) {
    throw Error(ErrorCode::zero_variance, "output variance is zero; Sobol indices are undefined");
  }
  result.output_mean = mean;
  result.output_variance = var;

  std::vector<std::size_t> all(n_base);
  std::iota(all.begin(), all.end(), std::size_t{0});
  Rng rng(derive_seed(seed, "sobol-bootstrap"));
  std::vector<std::vector<std::size_t>> resamples(options.bootstrap, std::vector<std::size_t>(n_base));
  for (auto& rs : resamples) {
    for (auto& k : rs) k = rng.below(n_base);
  }

  for (std::size_t i = 0; i < d; ++i) {
    const std::vector<double> fab = slice(2 + i);
    const Estimate e = estimate(fa, fb, fab, all);
    result.first_order.push_back(e.first);
    result.total.push_back(e.total);
    double s1 = 0.0, s1q = 0.0, st = 0.0, stq = 0.0;
    for (const auto& rs : resamples) {
      const Estimate bs = estimate(fa, fb, fab, rs);
      s1 += bs.first;
      s1q += bs.first * bs.first;
      st += bs.total;
      stq += bs.total * bs.total;
    }
    const double nb = static_cast<double>(std::max<std::size_t>(resamples.size(), 1));
    auto sd = [nb](double s, double q) { return std::sqrt(std::max(q / nb - (s / nb) * (s / nb), 0.0)); };
    result.first_order_se.push_back(resamples.empty() ? 0.0 : sd(s1, s1q));
    result.total_se.push_back(resamples.empty() ? 0.0 : sd(st, stq));
  }
  return result;
}

std::vector<std::string> rank_uncertain_parameters(const SobolResult& result, const DesignSpace& space,
                                                   std::size_t k) {
  if (result.total.size() != space.size()) {
    throw Error(ErrorCode::dimension_mismatch, "Sobol result does not match the design space");
  }
  if (k > space.size()) throw Error(ErrorCode::invalid_argument, "k exceeds the number of parameters");
  std::vector<std::size_t> order(space.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (result.total[a] != result.total[b]) return result.total[a] > result.total[b];
    return result.first_order[a] > result.first_order[b];
  });
  std::vector<std::string> names;
  for (std::size_t i = 0; i < k; ++i) names.push_back(space[order[i]].name);
  return names;
}

CsvTable sobol_table(const SobolResult& result, const DesignSpace& space) {
  CsvTable t;
  t.header = {"parameter", "first_order", "total", "first_order_se", "total_se"};
  for (std::size_t i = 0; i < space.size(); ++i) {
    t.add_row({space[i].name, format_double(std::max(result.first_order[i], 0.0)),
               format_double(std::max(result.total[i], 0.0)), format_double(result.first_order_se[i]),
               format_double(result.total_se[i])});
  }
  return t;
}

}  // namespace rdo
