#include "rdo/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "rdo/doe.hpp"
#include "rdo/error.hpp"
#include "rdo/parallel.hpp"
#include "rdo/random.hpp"

namespace rdo {

const char* to_string(RobustMetric metric) {
  return metric == RobustMetric::expectation ? "expectation" : "worst_case";
}

namespace {

Formulation formulation_of(RobustMetric metric) {
  return metric == RobustMetric::expectation ? Formulation::expectation : Formulation::worst_case;
}

UncertaintyTag tag_of(const UncertaintySpec& u) {
  if (u.include_material) return UncertaintyTag::ug_um;
  return u.degenerate() ? UncertaintyTag::none : UncertaintyTag::ug;
}

// Members sorted by f1, as (f1, f2) pairs.
std::vector<std::array<double, 2>> sorted_points(const ParetoFront& front) {
  std::vector<std::array<double, 2>> pts;
  for (const auto& ind : front.individuals) pts.push_back({ind.objectives[0], ind.objectives[1]});
  std::sort(pts.begin(), pts.end());
  return pts;
}

}  // namespace

ParetoFront reevaluate_front(const ParetoFront& front, const ResponsePair& responses, const UncertaintySpec& u,
                             RobustMetric metric, const RobustSettings& settings, std::uint64_t seed,
                             std::vector<std::string>* warnings) {
  if (front.empty()) throw Error(ErrorCode::invalid_argument, "cannot reevaluate an empty front");
  const MultiObjective objectives = make_objectives(responses, u, formulation_of(metric), settings, seed);
  ParetoFront out;
  out.formulation = formulation_of(metric);
  out.uncertainty = tag_of(u);
  out.seed = seed;
  std::vector<Individual> evaluated;
  for (std::size_t i = 0; i < front.size(); ++i) {
    Individual ind = front.individuals[i];
    try {
      ind.objectives = objectives(ind.x);
    } catch (const std::exception& e) {
      if (warnings) warnings->push_back("design " + std::to_string(i) + " skipped: " + e.what());
      continue;
    }
    ++out.evaluations;
    evaluated.push_back(std::move(ind));
  }
  out.individuals = non_dominated(evaluated);
  std::stable_sort(out.individuals.begin(), out.individuals.end(),
                   [](const Individual& a, const Individual& b) { return a.objectives < b.objectives; });
  return out;
}

std::vector<ZonePair> match_zones(const ParetoFront& a, const ParetoFront& b, std::size_t n_zones) {
  if (n_zones == 0) throw Error(ErrorCode::invalid_argument, "need at least one zone");
  if (a.empty() || b.empty()) throw Error(ErrorCode::empty_overlap, "cannot match zones of an empty front");
  auto range = [](const ParetoFront& f) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& ind : f.individuals) {
      lo = std::min(lo, ind.objectives[0]);
      hi = std::max(hi, ind.objectives[0]);
    }
    return std::pair{lo, hi};
  };
  const auto [alo, ahi] = range(a);
  const auto [blo, bhi] = range(b);
  const double lo = std::max(alo, blo), hi = std::min(ahi, bhi);
  if (lo > hi) throw Error(ErrorCode::empty_overlap, "fronts have disjoint first-objective ranges");

  auto closest = [](const ParetoFront& f, double center, double band_lo, double band_hi, bool& in_band) {
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    in_band = false;
    for (int pass = 0; pass < 2 && best_dist == std::numeric_limits<double>::infinity(); ++pass) {
      for (std::size_t i = 0; i < f.size(); ++i) {
        const double v = f.individuals[i].objectives[0];
        if (pass == 0 && (v < band_lo || v > band_hi)) continue;
        const double dist = std::abs(v - center);
        if (dist < best_dist) {
          best_dist = dist;
          best = i;
          in_band = pass == 0;
        }
      }
    }
    return best;
  };

  std::vector<ZonePair> zones;
  const double width = (hi - lo) / static_cast<double>(n_zones);
  for (std::size_t z = 0; z < n_zones; ++z) {
    ZonePair p;
    p.zone = z;
    p.lower = lo + width * static_cast<double>(z);
    p.upper = z + 1 == n_zones ? hi : lo + width * static_cast<double>(z + 1);
    p.center = 0.5 * (p.lower + p.upper);
    p.index_a = closest(a, p.center, p.lower, p.upper, p.a_in_band);
    p.index_b = closest(b, p.center, p.lower, p.upper, p.b_in_band);
    zones.push_back(p);
  }
  return zones;
}

std::optional<double> front_value_at(const ParetoFront& front, double f1) {
  const auto pts = sorted_points(front);
  if (pts.empty() || f1 < pts.front()[0] || f1 > pts.back()[0]) return std::nullopt;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    if (f1 >= pts[k][0] && f1 <= pts[k + 1][0]) {
      const double span = pts[k + 1][0] - pts[k][0];
      if (span == 0.0) return std::min(pts[k][1], pts[k + 1][1]);
      const double t = (f1 - pts[k][0]) / span;
      return pts[k][1] + t * (pts[k + 1][1] - pts[k][1]);
    }
  }
  return pts.back()[1];
}

std::vector<ZoneBoxplot> zone_boxplots(const ParetoFront& a, const ParetoFront& b, const std::vector<ZonePair>& zones,
                                       const ResponsePair& responses, const UncertaintySpec& u, std::size_t samples,
                                       std::uint64_t seed) {
  std::vector<ZoneBoxplot> out;
  for (const auto& z : zones) {
    ZoneBoxplot box;
    box.zone = z.zone;
    const auto& xa = a.individuals.at(z.index_a).x;
    const auto& xb = b.individuals.at(z.index_b).x;
    const auto ra = sample_outputs(responses.ripple, xa, u, samples, seed);
    const auto rb = sample_outputs(responses.ripple, xb, u, samples, seed);
    const auto ta = sample_outputs(responses.torque, xa, u, samples, seed);
    const auto tb = sample_outputs(responses.torque, xb, u, samples, seed);
    box.ripple_a = boxplot_stats(ra);
    box.ripple_b = boxplot_stats(rb);
    box.torque_a = boxplot_stats(ta);
    box.torque_b = boxplot_stats(tb);
    box.worst_ripple_a = *std::max_element(ra.begin(), ra.end());
    box.worst_ripple_b = *std::max_element(rb.begin(), rb.end());
    out.push_back(box);
  }
  return out;
}

namespace {

// Offsets (in normalized units) used for one coordinate at position c.
struct Stencil {
  double lo = 0.0, mid = 0.0, hi = 0.0;
  bool one_sided = false;
};

Stencil first_stencil(double c, double h) {
  if (c - h < 0.0) return {0.0, 0.0, h, true};
  if (c + h > 1.0) return {-h, 0.0, 0.0, true};
  return {-h, 0.0, h, false};
}

}  // namespace

std::vector<double> material_derivatives(const Response& f, std::span<const double> geometry, const MaterialState& at,
                                         DerivativeOrder order, double h, std::vector<bool>* one_sided) {
  const double beta_range = MaterialState::max_beta;
  if (!(at.alpha >= 0.0 && at.alpha <= 1.0 && at.beta >= 0.0 && at.beta <= beta_range)) {
    throw Error(ErrorCode::invalid_argument, "material point outside the degradation box");
  }
  if (!(h > 0.0 && h < 0.25)) throw Error(ErrorCode::invalid_argument, "finite-difference step must be in (0, 0.25)");
  const double a0 = at.alpha, b0 = at.beta / beta_range;
  auto value = [&](double a, double b) { return f(geometry, MaterialState{a, b * beta_range}); };

  const Stencil sa = first_stencil(a0, h), sb = first_stencil(b0, h);
  std::vector<double> out;
  if (order == DerivativeOrder::first) {
    out.push_back((value(a0 + sa.hi, b0) - value(a0 + sa.lo, b0)) / (sa.hi - sa.lo));
    out.push_back((value(a0, b0 + sb.hi) - value(a0, b0 + sb.lo)) / (sb.hi - sb.lo));
    if (one_sided) *one_sided = {sa.one_sided, sb.one_sided};
    return out;
  }
  // One-sided second differences step twice into the interior.
  auto offsets = [h](double c) -> std::array<double, 3> {
    if (c - h < 0.0) return {0.0, h, 2.0 * h};
    if (c + h > 1.0) return {-2.0 * h, -h, 0.0};
    return {-h, 0.0, h};
  };
  const auto oa = offsets(a0), ob = offsets(b0);
  out.push_back((value(a0 + oa[0], b0) - 2.0 * value(a0 + oa[1], b0) + value(a0 + oa[2], b0)) / (h * h));
  out.push_back((value(a0, b0 + ob[0]) - 2.0 * value(a0, b0 + ob[1]) + value(a0, b0 + ob[2])) / (h * h));
  out.push_back((value(a0 + sa.hi, b0 + sb.hi) - value(a0 + sa.hi, b0 + sb.lo) - value(a0 + sa.lo, b0 + sb.hi) +
                 value(a0 + sa.lo, b0 + sb.lo)) /
                ((sa.hi - sa.lo) * (sb.hi - sb.lo)));
  if (one_sided) *one_sided = {sa.one_sided, sb.one_sided, sa.one_sided || sb.one_sided};
  return out;
}

std::vector<DerivativeSeries> derivative_study(const Response& f, const DesignSpace& geometry, std::size_t n_points,
                                               const std::vector<MaterialState>& grid, DerivativeOrder order,
                                               std::uint64_t seed, const DerivativeStudyOptions& options) {
  if (n_points < 4) throw Error(ErrorCode::invalid_argument, "derivative study needs at least 4 geometry points");
  if (grid.empty()) throw Error(ErrorCode::invalid_argument, "empty material grid");
  const SampleSet points = scale(maximin_lhs(n_points, geometry.size(), seed, options.maximin_iterations), geometry);
  const std::vector<std::string> components =
      order == DerivativeOrder::first ? std::vector<std::string>{"alpha", "beta"}
                                      : std::vector<std::string>{"alpha", "beta", "alpha_beta"};

  std::vector<DerivativeSeries> out;
  for (const MaterialState& m : grid) {
    std::vector<bool> flags;
    material_derivatives(f, points.row(0), m, order, options.step, &flags);
    std::vector<std::vector<double>> values(n_points);
    parallel_for(n_points, options.workers, [&](std::size_t i) {
      values[i] = material_derivatives(f, points.row(i), m, order, options.step);
    });
    for (std::size_t c = 0; c < components.size(); ++c) {
      DerivativeSeries series;
      series.at = m;
      series.component = components[c];
      series.one_sided = flags[c];
      series.values.reserve(n_points);
      for (const auto& v : values) series.values.push_back(v[c]);
      series.stats = boxplot_stats(series.values);
      out.push_back(std::move(series));
    }
  }
  return out;
}

ZoneOrdering zone_ordering(const ParetoFront& robust, const ParetoFront& reference, const std::vector<ZonePair>& zones,
                           double tolerance) {
  ZoneOrdering out;
  for (const auto& z : zones) {
    const Individual& ref = reference.individuals.at(z.index_b);
    double f2 = robust.individuals.at(z.index_a).objectives[1];
    if (const auto v = front_value_at(robust, ref.objectives[0])) f2 = *v;
    const bool ok = f2 <= ref.objectives[1] + tolerance;
    out.holds.push_back(ok);
    out.robust_f2.push_back(f2);
    out.reference_f2.push_back(ref.objectives[1]);
    if (ok) ++out.count;
  }
  return out;
}

FrontShift front_shift_check(const ParetoFront& base, const ParetoFront& shifted, RobustMetric metric) {
  // Base front as torque over ripple, sorted by ripple.
  std::vector<std::array<double, 2>> curve;
  for (const auto& ind : base.individuals) curve.push_back({ind.objectives[1], -ind.objectives[0]});
  std::sort(curve.begin(), curve.end());
  if (curve.size() < 2) throw Error(ErrorCode::invalid_argument, "base front needs at least two members");

  std::vector<double> widths;
  for (std::size_t k = 0; k + 1 < curve.size(); ++k) widths.push_back(curve[k + 1][0] - curve[k][0]);
  std::vector<double> sorted_widths = widths;
  std::nth_element(sorted_widths.begin(), sorted_widths.begin() + static_cast<std::ptrdiff_t>(sorted_widths.size() / 2),
                   sorted_widths.end());
  const double max_gap = 3.0 * sorted_widths[sorted_widths.size() / 2];

  std::vector<double> diffs;
  for (const auto& ind : shifted.individuals) {
    const double ripple = ind.objectives[1];
    const double torque = -ind.objectives[0];
    for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
      if (ripple < curve[k][0] || ripple > curve[k + 1][0]) continue;
      if (widths[k] > max_gap) break;
      const double t = widths[k] > 0.0 ? (ripple - curve[k][0]) / widths[k] : 0.0;
      const double base_torque = curve[k][1] + t * (curve[k + 1][1] - curve[k][1]);
      diffs.push_back(torque - base_torque);
      break;
    }
  }
  if (diffs.size() < 3) {
    throw Error(ErrorCode::invalid_argument,
                "only " + std::to_string(diffs.size()) + " ripple-matched pairs; need at least 3");
  }
  FrontShift out;
  out.metric = metric;
  out.pairs = diffs.size();
  for (double d : diffs) out.offset += d;
  out.offset /= static_cast<double>(diffs.size());
  for (double d : diffs) out.residual = std::max(out.residual, std::abs(d - out.offset));
  return out;
}

}  // namespace rdo
