#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "rdo/doe.hpp"
#include "rdo/error.hpp"
#include "rdo/optimizers.hpp"
#include "rdo/parallel.hpp"
#include "rdo/random.hpp"

namespace rdo {

const char* to_string(Formulation f) {
  switch (f) {
    case Formulation::deterministic: return "deterministic";
    case Formulation::expectation: return "expectation";
    case Formulation::worst_case: return "worst_case";
  }
  return "?";
}

const char* to_string(UncertaintyTag u) {
  switch (u) {
    case UncertaintyTag::none: return "none";
    case UncertaintyTag::ug: return "Ug";
    case UncertaintyTag::ug_um: return "Ug_Um";
  }
  return "?";
}

Formulation parse_formulation(const std::string& s) {
  if (s == "det" || s == "deterministic") return Formulation::deterministic;
  if (s == "exp" || s == "expectation") return Formulation::expectation;
  if (s == "wc" || s == "worst_case") return Formulation::worst_case;
  throw Error(ErrorCode::invalid_argument, "unknown formulation '" + s + "'");
}

UncertaintyTag parse_uncertainty_tag(const std::string& s) {
  if (s == "none") return UncertaintyTag::none;
  if (s == "ug" || s == "Ug") return UncertaintyTag::ug;
  if (s == "ugum" || s == "Ug_Um") return UncertaintyTag::ug_um;
  throw Error(ErrorCode::invalid_argument, "unknown uncertainty tag '" + s + "'");
}

void Nsga2Config::validate() const {
  if (population < 2 || generations < 1) {
    throw Error(ErrorCode::invalid_argument, "NSGA-II needs a population of at least 2 and one generation");
  }
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(crossover_probability) || (mutation_probability >= 0.0 && !prob(mutation_probability))) {
    throw Error(ErrorCode::invalid_argument, "NSGA-II probabilities must lie in [0, 1]");
  }
  if (!(crossover_eta >= 0.0) || !(mutation_eta >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "distribution indices must be non-negative");
  }
}

bool dominates(std::span<const double> a, std::span<const double> b) {
  bool strictly = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] > b[k]) return false;
    if (a[k] < b[k]) strictly = true;
  }
  return strictly;
}

std::vector<std::vector<std::size_t>> non_dominated_sort(const std::vector<Individual>& pop) {
  const std::size_t n = pop.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      if (dominates(pop[p].objectives, pop[q].objectives)) {
        dominated[p].push_back(q);
        ++count[q];
      } else if (dominates(pop[q].objectives, pop[p].objectives)) {
        dominated[q].push_back(p);
        ++count[p];
      }
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (count[p] == 0) fronts[0].push_back(p);
  }
  while (!fronts.back().empty()) {
    std::vector<std::size_t> next;
    for (std::size_t p : fronts.back()) {
      for (std::size_t q : dominated[p]) {
        if (--count[q] == 0) next.push_back(q);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();
  return fronts;
}

void assign_crowding(std::vector<Individual>& pop, const std::vector<std::size_t>& front) {
  for (std::size_t i : front) pop[i].crowding = 0.0;
  if (front.empty()) return;
  const std::size_t m = pop[front.front()].objectives.size();
  std::vector<std::size_t> order = front;
  for (std::size_t k = 0; k < m; ++k) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return pop[a].objectives[k] < pop[b].objectives[k];
    });
    const double lo = pop[order.front()].objectives[k];
    const double hi = pop[order.back()].objectives[k];
    pop[order.front()].crowding = std::numeric_limits<double>::infinity();
    pop[order.back()].crowding = std::numeric_limits<double>::infinity();
    if (!(hi > lo)) continue;
    for (std::size_t i = 1; i + 1 < order.size(); ++i) {
      pop[order[i]].crowding +=
          (pop[order[i + 1]].objectives[k] - pop[order[i - 1]].objectives[k]) / (hi - lo);
    }
  }
}

std::vector<Individual> non_dominated(const std::vector<Individual>& pop) {
  std::vector<Individual> out;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    bool dominated_by_any = false;
    for (std::size_t k = 0; k < pop.size() && !dominated_by_any; ++k) {
      dominated_by_any = k != i && dominates(pop[k].objectives, pop[i].objectives);
    }
    if (!dominated_by_any) out.push_back(pop[i]);
  }
  return out;
}

namespace {

// Simulated binary crossover for one variable pair (bounded form).
void sbx(double& c1, double& c2, double lo, double hi, double eta, Rng& rng) {
  const double y1 = std::min(c1, c2), y2 = std::max(c1, c2);
  if (y2 - y1 <= 1e-14 || !(hi > lo)) return;
  const double u = rng.uniform();
  auto child = [&](double beta_bound) {
    const double alpha = 2.0 - std::pow(beta_bound, -(eta + 1.0));
    const double betaq = u <= 1.0 / alpha ? std::pow(u * alpha, 1.0 / (eta + 1.0))
                                          : std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
    return betaq;
  };
  const double b1 = 1.0 + 2.0 * (y1 - lo) / (y2 - y1);
  const double b2 = 1.0 + 2.0 * (hi - y2) / (y2 - y1);
  double n1 = 0.5 * ((y1 + y2) - child(b1) * (y2 - y1));
  double n2 = 0.5 * ((y1 + y2) + child(b2) * (y2 - y1));
  n1 = std::clamp(n1, lo, hi);
  n2 = std::clamp(n2, lo, hi);
  if (rng.uniform() <= 0.5) std::swap(n1, n2);
  c1 = n1;
  c2 = n2;
}

// Bounded polynomial mutation.
double polynomial_mutation(double y, double lo, double hi, double eta, Rng& rng) {
  if (!(hi > lo)) return y;
  const double d1 = (y - lo) / (hi - lo), d2 = (hi - y) / (hi - lo);
  const double u = rng.uniform();
  const double p = 1.0 / (eta + 1.0);
  double dq;
  if (u < 0.5) {
    const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
    dq = std::pow(val, p) - 1.0;
  } else {
    const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
    dq = 1.0 - std::pow(val, p);
  }
  return std::clamp(y + dq * (hi - lo), lo, hi);
}

std::string describe(std::span<const double> x) {
  std::ostringstream out;
  out.precision(17);
  out << '[';
  for (std::size_t i = 0; i < x.size(); ++i) out << (i ? ", " : "") << x[i];
  out << ']';
  return out.str();
}

// Evaluates every individual, computing each distinct design once.
std::size_t evaluate(std::vector<Individual>& batch, const MultiObjective& f, std::size_t workers) {
  std::map<DesignPoint, std::size_t> unique;
  std::vector<std::size_t> owner(batch.size());
  std::vector<std::size_t> firsts;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    auto [it, inserted] = unique.emplace(batch[i].x, firsts.size());
    if (inserted) firsts.push_back(i);
    owner[i] = it->second;
  }
  std::vector<std::vector<double>> values(firsts.size());
  parallel_for(firsts.size(), workers, [&](std::size_t u) {
    const auto& x = batch[firsts[u]].x;
    try {
      values[u] = f(x);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::evaluator_failure, "objective evaluation failed at x=" + describe(x) + ": " + e.what());
    }
    for (double v : values[u]) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::evaluator_failure, "non-finite objective at x=" + describe(x));
      }
    }
  });
  for (std::size_t i = 0; i < batch.size(); ++i) batch[i].objectives = values[owner[i]];
  return firsts.size();
}

// Ranks and crowding for a whole population.
void rank_population(std::vector<Individual>& pop, std::vector<std::vector<std::size_t>>& fronts) {
  fronts = non_dominated_sort(pop);
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    for (std::size_t i : fronts[r]) pop[i].rank = r;
    assign_crowding(pop, fronts[r]);
  }
}

bool crowded_less(const Individual& a, const Individual& b) {
  if (a.rank != b.rank) return a.rank < b.rank;
  return a.crowding > b.crowding;
}

}  // namespace

ParetoFront nsga2(const MultiObjective& objectives, const Box& box, const Nsga2Config& config,
                  const GenerationObserver& observer) {
  config.validate();
  const std::size_t d = box.size();
  if (d == 0) throw Error(ErrorCode::invalid_argument, "NSGA-II needs at least one variable");
  for (std::size_t j = 0; j < d; ++j) {
    if (!std::isfinite(box.lower[j]) || !std::isfinite(box.upper[j]) || box.upper[j] < box.lower[j]) {
      throw Error(ErrorCode::invalid_argument, "NSGA-II box must be bounded");
    }
  }
  const std::size_t n = config.population;
  const double pm = config.mutation_probability < 0.0 ? 1.0 / static_cast<double>(d) : config.mutation_probability;
  Rng rng(derive_seed(config.seed, "nsga2"));

  ParetoFront result;
  result.seed = config.seed;

  const SampleSet init = lhs(n, d, derive_seed(config.seed, "nsga2-init"));
  std::vector<Individual> pop(n);
  for (std::size_t i = 0; i < n; ++i) {
    pop[i].x.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      pop[i].x[j] = box.lower[j] + box.width(j) * init.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  result.evaluations += evaluate(pop, objectives, config.workers);
  std::vector<std::vector<std::size_t>> fronts;
  rank_population(pop, fronts);
  if (observer) observer(0, pop);

  auto tournament = [&]() -> const Individual& {
    const std::size_t a = rng.below(n), b = rng.below(n);
    if (crowded_less(pop[b], pop[a])) return pop[b];
    return pop[a];
  };

  for (std::size_t gen = 1; gen <= config.generations; ++gen) {
    std::vector<Individual> offspring;
    offspring.reserve(n + 1);
    while (offspring.size() < n) {
      Individual c1, c2;
      c1.x = tournament().x;
      c2.x = tournament().x;
      if (rng.uniform() <= config.crossover_probability) {
        for (std::size_t j = 0; j < d; ++j) {
          if (rng.uniform() <= 0.5) sbx(c1.x[j], c2.x[j], box.lower[j], box.upper[j], config.crossover_eta, rng);
        }
      }
      for (auto* c : {&c1, &c2}) {
        for (std::size_t j = 0; j < d; ++j) {
          if (rng.uniform() < pm) c->x[j] = polynomial_mutation(c->x[j], box.lower[j], box.upper[j], config.mutation_eta, rng);
        }
      }
      offspring.push_back(std::move(c1));
      if (offspring.size() < n) offspring.push_back(std::move(c2));
    }
    result.evaluations += evaluate(offspring, objectives, config.workers);

    std::vector<Individual> merged = std::move(pop);
    merged.insert(merged.end(), std::make_move_iterator(offspring.begin()), std::make_move_iterator(offspring.end()));
    rank_population(merged, fronts);

    std::vector<Individual> next;
    next.reserve(n);
    for (const auto& front : fronts) {
      if (next.size() + front.size() <= n) {
        for (std::size_t i : front) next.push_back(merged[i]);
        continue;
      }
      std::vector<std::size_t> last = front;
      std::stable_sort(last.begin(), last.end(), [&](std::size_t a, std::size_t b) {
        return merged[a].crowding > merged[b].crowding;
      });
      for (std::size_t k = 0; next.size() < n; ++k) next.push_back(merged[last[k]]);
      break;
    }
    pop = std::move(next);
    rank_population(pop, fronts);
    if (observer) observer(gen, pop);
  }

  std::map<DesignPoint, bool> seen;
  for (std::size_t i : fronts.front()) {
    if (seen.emplace(pop[i].x, true).second) result.individuals.push_back(pop[i]);
  }
  std::stable_sort(result.individuals.begin(), result.individuals.end(), [](const Individual& a, const Individual& b) {
    return a.objectives < b.objectives;
  });
  return result;
}

ParetoFront nsga2(const MultiObjective& objectives, const DesignSpace& space, const Nsga2Config& config,
                  const GenerationObserver& observer) {
  return nsga2(objectives, Box{space.lower(), space.upper()}, config, observer);
}

double hypervolume(const std::vector<Individual>& points, std::array<double, 2> reference,
                   std::size_t* excluded) {
  std::vector<std::array<double, 2>> inside;
  std::size_t dropped = 0;
  for (const auto& p : points) {
    if (p.objectives.size() != 2) throw Error(ErrorCode::dimension_mismatch, "hypervolume is two-objective only");
    if (p.objectives[0] < reference[0] && p.objectives[1] < reference[1]) {
      inside.push_back({p.objectives[0], p.objectives[1]});
    } else {
      ++dropped;
    }
  }
  if (excluded) *excluded = dropped;
  std::sort(inside.begin(), inside.end());
  double area = 0.0;
  double ceiling = reference[1];
  for (const auto& p : inside) {
    if (p[1] < ceiling) {
      area += (reference[0] - p[0]) * (ceiling - p[1]);
      ceiling = p[1];
    }
  }
  return area;
}

double generational_distance(const std::vector<Individual>& front,
                             const std::vector<std::array<double, 2>>& reference) {
  if (front.empty() || reference.empty()) {
    throw Error(ErrorCode::invalid_argument, "generational distance needs non-empty sets");
  }
  double total = 0.0;
  for (const auto& p : front) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : reference) {
      const double d0 = p.objectives[0] - r[0], d1 = p.objectives[1] - r[1];
      best = std::min(best, d0 * d0 + d1 * d1);
    }
    total += std::sqrt(best);
  }
  return total / static_cast<double>(front.size());
}

CsvTable front_table(const ParetoFront& front, const std::vector<std::string>& names) {
  CsvTable t;
  t.header = names;
  t.header.insert(t.header.end(), {"f1", "f2", "formulation", "uncertainty"});
  for (const auto& ind : front.individuals) {
    if (ind.x.size() != names.size()) throw Error(ErrorCode::dimension_mismatch, "front design length differs from names");
    std::vector<std::string> row;
    for (double v : ind.x) row.push_back(format_double(v));
    for (double v : ind.objectives) row.push_back(format_double(v));
    row.push_back(to_string(front.formulation));
    row.push_back(to_string(front.uncertainty));
    t.add_row(std::move(row));
  }
  return t;
}

ParetoFront front_from_table(const CsvTable& table, const std::vector<std::string>& names) {
  ParetoFront front;
  std::vector<std::size_t> cols;
  for (const auto& n : names) cols.push_back(table.column(n));
  const std::size_t f1 = table.column("f1"), f2 = table.column("f2");
  const std::size_t form = table.column("formulation"), unc = table.column("uncertainty");
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    Individual ind;
    for (std::size_t c : cols) ind.x.push_back(table.number(r, c));
    ind.objectives = {table.number(r, f1), table.number(r, f2)};
    front.individuals.push_back(std::move(ind));
    if (r == 0) {
      front.formulation = parse_formulation(table.rows[r][form]);
      front.uncertainty = parse_uncertainty_tag(table.rows[r][unc]);
    }
  }
  return front;
}

}  // namespace rdo
