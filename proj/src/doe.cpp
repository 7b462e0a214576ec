#include "rdo/doe.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "rdo/error.hpp"
#include "rdo/random.hpp"

namespace rdo {

DesignPoint SampleSet::row(std::size_t i) const {
  DesignPoint out(dimension());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

SampleSet lhs(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (n == 0 || d == 0) {
    throw Error(ErrorCode::invalid_argument, "LHS needs at least one point and one dimension");
  }
  Rng rng(seed);
  SampleSet out;
  out.seed = seed;
  out.kind = SampleKind::lhs;
  out.points.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<std::size_t> strata(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < d; ++j) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    rng.shuffle(std::span(strata));
    for (std::size_t i = 0; i < n; ++i) {
      double v = (static_cast<double>(strata[i]) + rng.uniform()) * inv_n;
      // Guard against rounding onto the next stratum's lower edge.
      const double cap = std::nextafter((static_cast<double>(strata[i]) + 1.0) * inv_n, 0.0);
      out.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::min(v, cap);
    }
  }
  return out;
}

namespace {

// Nearest-neighbour bookkeeping over squared distances for the swap search.
class NearestNeighbours {
 public:
  explicit NearestNeighbours(const Eigen::MatrixXd& pts) : pts_(&pts) {
    const auto n = pts.rows();
    dist_.assign(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    idx_.assign(static_cast<std::size_t>(n), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = i + 1; k < n; ++k) {
        const double dd = (pts.row(i) - pts.row(k)).squaredNorm();
        offer(i, k, dd);
        offer(k, i, dd);
      }
    }
  }

  // Refreshes bookkeeping after rows a and b changed.
  void update(Eigen::Index a, Eigen::Index b) {
    const auto n = pts_->rows();
    std::vector<Eigen::Index> stale;
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      if (k != a && k != b && (idx_[kk] == a || idx_[kk] == b)) stale.push_back(k);
    }
    recompute(a);
    recompute(b);
    for (Eigen::Index k : stale) recompute(k);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == a || k == b) continue;
      offer(k, a, (pts_->row(k) - pts_->row(a)).squaredNorm());
      offer(k, b, (pts_->row(k) - pts_->row(b)).squaredNorm());
    }
  }

  double min() const { return *std::min_element(dist_.begin(), dist_.end()); }
  double sum() const {
    double s = 0.0;
    for (double v : dist_) s += std::sqrt(v);
    return s;
  }

 private:
  void offer(Eigen::Index i, Eigen::Index k, double dd) {
    const auto ii = static_cast<std::size_t>(i);
    if (dd < dist_[ii]) {
      dist_[ii] = dd;
      idx_[ii] = k;
    }
  }

  void recompute(Eigen::Index i) {
    const auto ii = static_cast<std::size_t>(i);
    dist_[ii] = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < pts_->rows(); ++k) {
      if (k != i) offer(i, k, (pts_->row(i) - pts_->row(k)).squaredNorm());
    }
  }

  const Eigen::MatrixXd* pts_;
  std::vector<double> dist_;
  std::vector<Eigen::Index> idx_;
};

}  // namespace

SampleSet maximin_lhs(std::size_t n, std::size_t d, std::uint64_t seed,
                      std::size_t iterations) {
  if (n < 2) throw Error(ErrorCode::invalid_argument, "maximin LHS needs at least two points");
  SampleSet out = lhs(n, d, seed);
  out.kind = SampleKind::maximin_lhs;
  if (iterations == 0) iterations = 10 * n * d;

  Rng rng(derive_seed(seed, "maximin"));
  Eigen::MatrixXd& pts = out.points;
  NearestNeighbours nn(pts);
  double best_min = nn.min();
  double best_sum = nn.sum();

  for (std::size_t it = 0; it < iterations; ++it) {
    const auto j = static_cast<Eigen::Index>(rng.below(d));
    const auto a = static_cast<Eigen::Index>(rng.below(n));
    auto b = static_cast<Eigen::Index>(rng.below(n - 1));
    if (b >= a) ++b;

    NearestNeighbours saved = nn;
    std::swap(pts(a, j), pts(b, j));
    nn.update(a, b);
    const double m = nn.min();
    const double s = nn.sum();
    if (m > best_min || (m == best_min && s > best_sum)) {
      best_min = m;
      best_sum = s;
    } else {
      std::swap(pts(a, j), pts(b, j));
      nn = std::move(saved);
    }
  }
  return out;
}

double min_pairwise_distance(const Eigen::MatrixXd& points) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index k = i + 1; k < points.rows(); ++k) {
      best = std::min(best, (points.row(i) - points.row(k)).squaredNorm());
    }
  }
  return std::sqrt(best);
}

bool is_latin_hypercube(const Eigen::MatrixXd& unit_points) {
  const auto n = unit_points.rows();
  if (n == 0) return false;
  for (Eigen::Index j = 0; j < unit_points.cols(); ++j) {
    std::vector<bool> hit(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = unit_points(i, j);
      if (!(v >= 0.0 && v < 1.0)) return false;
      const auto k = static_cast<std::size_t>(std::floor(v * static_cast<double>(n)));
      if (k >= hit.size() || hit[k]) return false;
      hit[k] = true;
    }
  }
  return true;
}

SampleSet scale(const SampleSet& unit, const DesignSpace& space) {
  if (unit.dimension() != space.size()) {
    throw Error(ErrorCode::dimension_mismatch, "sample dimension " + std::to_string(unit.dimension()) +
                                                   " differs from space dimension " +
                                                   std::to_string(space.size()));
  }
  SampleSet out = unit;
  out.names = space.names();
  out.lower = space.lower();
  out.upper = space.upper();
  for (std::size_t j = 0; j < space.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    out.points.col(jj) = (space[j].lower + space[j].width() * unit.points.col(jj).array()).matrix();
  }
  return out;
}

SampleSet unscale(const SampleSet& scaled, const DesignSpace& space) {
  if (scaled.dimension() != space.size()) {
    throw Error(ErrorCode::dimension_mismatch, "sample dimension differs from space dimension");
  }
  SampleSet out = scaled;
  out.lower.clear();
  out.upper.clear();
  for (std::size_t j = 0; j < space.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    out.points.col(jj) = ((scaled.points.col(jj).array() - space[j].lower) / space[j].width()).matrix();
  }
  return out;
}

CsvTable to_csv(const SampleSet& samples) {
  CsvTable table;
  if (samples.names.size() == samples.dimension()) {
    table.header = samples.names;
  } else {
    for (std::size_t j = 0; j < samples.dimension(); ++j) table.header.push_back("x" + std::to_string(j));
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::vector<std::string> row;
    for (std::size_t j = 0; j < samples.dimension(); ++j) {
      row.push_back(format_double(samples.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    }
    table.add_row(std::move(row));
  }
  return table;
}

}  // namespace rdo
