#include "rdo/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "rdo/analysis.hpp"
#include "rdo/csv.hpp"
#include "rdo/doe.hpp"
#include "rdo/error.hpp"
#include "rdo/motor_bench.hpp"
#include "rdo/random.hpp"
#include "rdo/sensitivity.hpp"

namespace rdo {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kTorqueColumn = "mean_torque";
constexpr const char* kRippleColumn = "torque_ripple";

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::size_t parse_count(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw Error(ErrorCode::parse_error, "config key '" + key + "': expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(out)) {
    throw Error(ErrorCode::parse_error, "config key '" + key + "': expected a number, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::parse_error, "config key '" + key + "': expected true or false, got '" + v + "'");
}

std::string short_name(Formulation f) {
  switch (f) {
    case Formulation::deterministic: return "det";
    case Formulation::expectation: return "exp";
    case Formulation::worst_case: return "wc";
  }
  return "?";
}

std::string short_name(UncertaintyTag u) {
  switch (u) {
    case UncertaintyTag::none: return "none";
    case UncertaintyTag::ug: return "ug";
    case UncertaintyTag::ug_um: return "ugum";
  }
  return "?";
}

std::string out_path(const RunConfig& config, const std::string& name) {
  return (fs::path(config.out) / name).string();
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const std::string& path, const json& doc) { write_text_file(path, doc.dump(2) + "\n"); }

// DOE rows are (geometry[, alpha, beta]); split them for the benchmark.
MaterialState row_material(const DesignPoint& row, std::size_t n_geometric) {
  if (row.size() == n_geometric) return {};
  return MaterialState{row[n_geometric], row[n_geometric + 1]};
}

struct DoeData {
  SampleSet inputs;
  std::vector<double> torque;
  std::vector<double> ripple;
};

DoeData read_doe(const RunConfig& config, const DesignSpace& space) {
  const std::string path = out_path(config, "doe.csv");
  if (!fs::exists(path)) throw Error(ErrorCode::io_error, "missing " + path + " (run the doe stage first)");
  const CsvTable table = read_csv(path);
  const std::size_t tcol = table.column(kTorqueColumn), rcol = table.column(kRippleColumn);
  const std::size_t n_inputs = table.header.size() - 2;
  const DesignSpace input_space = n_inputs == space.size() ? space : with_material(space);
  if (input_space.size() != n_inputs) {
    throw Error(ErrorCode::dimension_mismatch, "doe.csv has " + std::to_string(n_inputs) + " inputs, expected " +
                                                   std::to_string(space.size()) + " or " +
                                                   std::to_string(space.size() + 2));
  }
  DoeData d;
  d.inputs.points.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(n_inputs));
  const auto names = input_space.names();
  for (std::size_t j = 0; j < n_inputs; ++j) {
    const std::size_t col = table.column(names[j]);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      d.inputs.points(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = table.number(r, col);
    }
  }
  d.inputs.names = names;
  d.inputs.lower = input_space.lower();
  d.inputs.upper = input_space.upper();
  d.inputs.kind = SampleKind::maximin_lhs;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    d.torque.push_back(table.number(r, tcol));
    d.ripple.push_back(table.number(r, rcol));
  }
  return d;
}

SampleSet take_rows(const SampleSet& s, std::span<const std::size_t> rows) {
  SampleSet out = s;
  out.points.resize(static_cast<Eigen::Index>(rows.size()), s.points.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.points.row(static_cast<Eigen::Index>(i)) = s.points.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

json model_report(const KrigingModel& model, double error) {
  const KernelSpec k = model.kernel();
  return json{{"kernel", to_string(k.family)},
              {"nrmse_percent", error},
              {"lengthscales", k.lengthscales},
              {"variance", k.variance},
              {"nugget", model.nugget()},
              {"log_likelihood", model.log_likelihood()}};
}

ParetoFront read_front(const RunConfig& config, Formulation f, UncertaintyTag u, const DesignSpace& space) {
  return front_from_table(read_csv(out_path(config, front_file_name(f, u))), space.names());
}

bool has_front(const RunConfig& config, Formulation f, UncertaintyTag u) {
  return fs::exists(out_path(config, front_file_name(f, u)));
}

UncertaintySpec uncertainty_for(const RunConfig& config, const DesignSpace& space, UncertaintyTag tag) {
  RunConfig c = config;
  c.uncertainty = tag;
  return run_uncertainty(c, space);
}

// Zone letters run from the lowest torque (A) to the highest.
char zone_letter(std::size_t band, std::size_t n_zones) { return static_cast<char>('A' + (n_zones - 1 - band)); }

void add_front_rows(CsvTable& table, const std::string& series, const ParetoFront& front) {
  for (const auto& ind : front.individuals) {
    std::vector<std::string> row = {series, format_double(-ind.objectives[0]), format_double(ind.objectives[1])};
    for (double v : ind.x) row.push_back(format_double(v));
    table.add_row(std::move(row));
  }
}

CsvTable front_figure_header(const DesignSpace& space) {
  CsvTable t;
  t.header = {"series", "torque", "ripple"};
  for (const auto& n : space.names()) t.header.push_back(n);
  return t;
}

void add_boxplot_columns(std::vector<std::string>& row, const BoxplotStats& s) {
  for (double v : {s.q1, s.q2, s.q3, s.whisker_low, s.whisker_high, s.mean, s.std}) row.push_back(format_double(v));
}

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  RunConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::parse_error, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string v = trim(std::string_view(content).substr(eq + 1));
    try {
      if (key == "space") c.space_file = v;
      else if (key == "evaluator") {
        if (v != "bench" && v != "surrogate") throw Error(ErrorCode::parse_error, "evaluator must be bench or surrogate");
        c.evaluator = v;
      }
      else if (key == "doe_size") c.doe_size = parse_count(key, v);
      else if (key == "doe_material") c.doe_material = parse_bool(key, v);
      else if (key == "ripple_material") c.ripple_material = parse_bool(key, v);
      else if (key == "train_fraction") c.train_fraction = parse_real(key, v);
      else if (key == "kernel_torque") c.kernel_torque = parse_kernel_family(v);
      else if (key == "kernel_ripple") c.kernel_ripple = parse_kernel_family(v);
      else if (key == "fit_starts") c.fit_starts = parse_count(key, v);
      else if (key == "sobol_base") c.sobol_base = parse_count(key, v);
      else if (key == "sobol_bootstrap") c.sobol_bootstrap = parse_count(key, v);
      else if (key == "top_k") c.top_k = parse_count(key, v);
      else if (key == "uncertain") {
        c.uncertain.clear();
        std::istringstream items(v);
        std::string item;
        while (std::getline(items, item, ',')) {
          if (auto t = trim(item); !t.empty()) c.uncertain.push_back(t);
        }
      }
      else if (key == "formulation") c.formulation = parse_formulation(v);
      else if (key == "uncertainty") c.uncertainty = parse_uncertainty_tag(v);
      else if (key == "population") c.population = parse_count(key, v);
      else if (key == "generations") c.generations = parse_count(key, v);
      else if (key == "expectation_samples") c.expectation_samples = parse_count(key, v);
      else if (key == "wc_particles") c.wc_particles = parse_count(key, v);
      else if (key == "wc_iterations") c.wc_iterations = parse_count(key, v);
      else if (key == "wc_patience") c.wc_patience = parse_count(key, v);
      else if (key == "zones") c.zones = parse_count(key, v);
      else if (key == "boxplot_samples") c.boxplot_samples = parse_count(key, v);
      else if (key == "derivative_points") c.derivative_points = parse_count(key, v);
      else if (key == "seed") c.seed = parse_count(key, v);
      else if (key == "workers") c.workers = parse_count(key, v);
      else if (key == "out") c.out = v;
      else throw Error(ErrorCode::parse_error, "unknown config key '" + key + "'");
    } catch (const Error& e) {
      throw Error(ErrorCode::parse_error, "config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!(c.train_fraction > 0.0 && c.train_fraction <= 1.0)) {
    throw Error(ErrorCode::parse_error, "train_fraction must lie in (0, 1]");
  }
  return c;
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(read_text(path)); }

DesignSpace run_space(const RunConfig& config) {
  const DesignSpace full = config.space_file.empty() ? DesignSpace::table_one() : load_design_space(config.space_file);
  std::vector<ParameterSpec> geometric;
  for (const auto& p : full.params()) {
    if (p.kind == ParameterKind::geometric) geometric.push_back(p);
  }
  return DesignSpace(std::move(geometric));
}

UncertaintySpec run_uncertainty(const RunConfig& config, const DesignSpace& space) {
  switch (config.uncertainty) {
    case UncertaintyTag::none: return UncertaintySpec::none(space);
    case UncertaintyTag::ug: return UncertaintySpec::geometric(space, config.uncertain, false);
    case UncertaintyTag::ug_um: return UncertaintySpec::geometric(space, config.uncertain, true);
  }
  return UncertaintySpec::none(space);
}

RobustSettings run_robust_settings(const RunConfig& config) {
  RobustSettings s;
  s.expectation_samples = config.expectation_samples;
  s.worst_case_pso.particles = config.wc_particles;
  s.worst_case_pso.iterations = config.wc_iterations;
  s.worst_case_pso.patience = config.wc_patience;
  return s;
}

Evaluators load_evaluators(const RunConfig& config) {
  const DesignSpace space = run_space(config);
  Evaluators e;
  if (config.evaluator == "bench") {
    if (space.size() != bench::reference_design().geometry.size()) {
      throw Error(ErrorCode::dimension_mismatch, "the benchmark evaluator needs the 12 reference geometry parameters");
    }
    e.responses = bench::responses();
    e.material_inputs = true;
    e.description = "benchmark";
    return e;
  }
  auto torque = std::make_shared<const KrigingModel>(load_model(out_path(config, "model_torque.json")));
  auto ripple = std::make_shared<const KrigingModel>(load_model(out_path(config, "model_ripple.json")));
  e.material_inputs = torque->dimension() == space.size() + 2;
  const bool ripple_invariant = e.material_inputs && ripple->dimension() == space.size();
  e.responses = {as_response(torque, space.size()), as_response(ripple, space.size(), ripple_invariant)};
  e.description = e.material_inputs ? "surrogate (geometry and material inputs)" : "surrogate (geometry inputs)";
  return e;
}

std::uint64_t objective_seed(const RunConfig& config, Formulation formulation) {
  return derive_seed(config.seed, "objectives-" + short_name(formulation));
}

std::vector<std::size_t> split_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(std::span<std::size_t>(order));
  return order;
}

std::size_t train_size(std::size_t n, double train_fraction) {
  return static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
}

std::string front_file_name(Formulation formulation, UncertaintyTag uncertainty) {
  return "front_" + short_name(formulation) + "_" + short_name(uncertainty) + ".csv";
}

std::string cmd_doe(const RunConfig& config) {
  if (config.doe_size == 0) throw Error(ErrorCode::invalid_argument, "doe_size must be positive");
  const DesignSpace space = run_space(config);
  const DesignSpace input_space = config.doe_material ? with_material(space) : space;
  const std::uint64_t seed = derive_seed(config.seed, "doe");
  // A single point has no pairwise distance to improve.
  const SampleSet unit = config.doe_size == 1 ? lhs(1, input_space.size(), seed)
                                              : maximin_lhs(config.doe_size, input_space.size(), seed);
  const SampleSet doe = scale(unit, input_space);
  CsvTable table = to_csv(doe);
  table.header.push_back(kTorqueColumn);
  table.header.push_back(kRippleColumn);
  for (std::size_t i = 0; i < doe.size(); ++i) {
    const DesignPoint row = doe.row(i);
    const MaterialState m = row_material(row, space.size());
    const std::span<const double> g(row.data(), space.size());
    table.rows[i].push_back(format_double(bench::mean_torque(g, m)));
    table.rows[i].push_back(format_double(bench::torque_ripple(g, m)));
  }
  write_text_file(out_path(config, "doe.csv"), table.to_string());
  return "doe: " + std::to_string(doe.size()) + " points x " + std::to_string(input_space.size()) + " inputs -> doe.csv";
}

std::string cmd_fit(const RunConfig& config) {
  const DesignSpace space = run_space(config);
  const DoeData d = read_doe(config, space);
  const std::size_t n = d.inputs.size();
  const std::vector<std::size_t> order = split_order(n, config.seed);
  const std::size_t n_train = train_size(n, config.train_fraction);
  const std::size_t n_test = n - n_train;
  const std::span<const std::size_t> train_rows(order.data(), n_train);
  if (n_train < d.inputs.dimension() + 2) {
    throw Error(ErrorCode::invalid_argument, "training set of " + std::to_string(n_train) +
                                                 " points is too small for the linear trend");
  }
  KrigingFitOptions options;
  options.starts = config.fit_starts;
  options.workers = config.workers;

  json report = {{"train_size", n_train}, {"test_size", n_test}};
  std::string summary = "fit: " + std::to_string(n_train) + "/" + std::to_string(n_test) + " split";
  const struct {
    const char* name;
    const std::vector<double>* y;
    KernelFamily family;
  } outputs[] = {{"torque", &d.torque, config.kernel_torque}, {"ripple", &d.ripple, config.kernel_ripple}};
  for (const auto& o : outputs) {
    std::vector<double> y_train;
    for (std::size_t r : train_rows) y_train.push_back((*o.y)[r]);
    const bool drop_material =
        std::string(o.name) == "ripple" && d.inputs.dimension() == space.size() + 2 && !config.ripple_material;
    SampleSet inputs = d.inputs;
    if (drop_material) {
      inputs.points = d.inputs.points.leftCols(static_cast<Eigen::Index>(space.size()));
      inputs.names.resize(space.size());
      inputs.lower.resize(space.size());
      inputs.upper.resize(space.size());
    }
    const KrigingModel model = KrigingModel::fit(take_rows(inputs, train_rows), y_train, o.family,
                                                 derive_seed(config.seed, std::string("fit-") + o.name), options);
    double error = 0.0;
    if (n_test > 0) {
      std::vector<double> truth, pred;
      for (std::size_t k = n_train; k < n; ++k) {
        truth.push_back((*o.y)[order[k]]);
        pred.push_back(model.predict_mean(inputs.row(order[k])));
      }
      error = nrmse(truth, pred);
    }
    report[o.name] = model_report(model, error);
    report[o.name]["inputs"] = inputs.names;
    save_model(model, out_path(config, std::string("model_") + o.name + ".json"));
    std::ostringstream s;
    s << ", " << o.name << " NRMSE " << error << "%";
    summary += s.str();
  }
  write_json(out_path(config, "fit_report.json"), report);
  return summary;
}

std::string cmd_sobol(const RunConfig& config) {
  const DesignSpace space = run_space(config);
  const Evaluators ev = load_evaluators(config);
  SobolOptions options;
  options.bootstrap = config.sobol_bootstrap;
  options.workers = config.workers;
  json report = {{"evaluator", ev.description}, {"n_base", config.sobol_base}};
  std::string summary = "sobol:";
  const struct {
    const char* name;
    const char* file;
    const Response* f;
  } outputs[] = {{"torque", "fig6.csv", &ev.responses.torque}, {"ripple", "fig7.csv", &ev.responses.ripple}};
  for (const auto& o : outputs) {
    const Response& response = *o.f;
    const PointFunction f = [&response](std::span<const double> x) { return response(x, MaterialState{}); };
    const SobolResult r =
        sobol_indices(f, space, config.sobol_base, derive_seed(config.seed, std::string("sobol-") + o.name), options);
    write_text_file(out_path(config, o.file), sobol_table(r, space).to_string());
    const auto top = rank_uncertain_parameters(r, space, std::min(config.top_k, space.size()));
    std::vector<std::string> interacting;
    for (std::size_t i = 0; i < space.size(); ++i) {
      if (r.total[i] - r.first_order[i] > 0.05) interacting.push_back(space[i].name);
    }
    report[o.name] = {{"top", top}, {"interacting", interacting}, {"variance", r.output_variance}};
    summary += std::string(" ") + o.name + " top";
    for (const auto& t : top) summary += " " + t;
    summary += ";";
  }
  write_json(out_path(config, "sobol_report.json"), report);
  return summary;
}

std::string cmd_optimize(const RunConfig& config) {
  const DesignSpace space = run_space(config);
  const Evaluators ev = load_evaluators(config);
  const Formulation form = config.formulation;
  const UncertaintyTag tag = form == Formulation::deterministic ? UncertaintyTag::none : config.uncertainty;
  const UncertaintySpec u = uncertainty_for(config, space, tag);
  if (u.include_material && !ev.material_inputs) {
    throw Error(ErrorCode::invalid_argument,
                "the surrogates have no material inputs; rerun doe and fit with doe_material = true");
  }
  const DesignSpace search = form == Formulation::deterministic ? space : robust_search_space(space, u);
  const MultiObjective objectives =
      make_objectives(ev.responses, u, form, run_robust_settings(config), objective_seed(config, form));
  Nsga2Config nsga;
  nsga.population = config.population;
  nsga.generations = config.generations;
  nsga.seed = derive_seed(config.seed, "nsga-" + short_name(form));
  nsga.workers = config.workers;
  ParetoFront front = nsga2(objectives, search, nsga);
  front.uncertainty = tag;
  front.formulation = form;
  const std::string file = front_file_name(form, tag);
  write_text_file(out_path(config, file), front_table(front, space.names()).to_string());
  return "optimize: " + std::string(to_string(form)) + "/" + to_string(tag) + " front of " +
         std::to_string(front.size()) + " designs, " + std::to_string(front.evaluations) + " evaluations -> " + file;
}

std::string cmd_analyze(const RunConfig& config) {
  const DesignSpace space = run_space(config);
  const Evaluators ev = load_evaluators(config);
  if (!has_front(config, Formulation::deterministic, UncertaintyTag::none)) {
    throw Error(ErrorCode::io_error, "missing " + front_file_name(Formulation::deterministic, UncertaintyTag::none) +
                                         " (run optimize with the deterministic formulation first)");
  }
  const ParetoFront det = read_front(config, Formulation::deterministic, UncertaintyTag::none, space);
  const RobustSettings settings = run_robust_settings(config);
  json report = {{"evaluator", ev.description}, {"zones", config.zones}};
  json skipped = json::array();
  std::vector<std::string> warnings;
  std::vector<std::string> written;

  const Formulation forms[] = {Formulation::expectation, Formulation::worst_case};
  const char* front_figs[2][2] = {{"fig9.csv", "fig13.csv"}, {"fig10.csv", "fig14.csv"}};
  const char* box_figs[2] = {"fig11.csv", "fig12.csv"};
  const UncertaintyTag tags[] = {UncertaintyTag::ug, UncertaintyTag::ug_um};

  std::optional<DesignPoint> zone_a_design;
  for (int fi = 0; fi < 2; ++fi) {
    const Formulation form = forms[fi];
    const RobustMetric metric = form == Formulation::expectation ? RobustMetric::expectation : RobustMetric::worst_case;
    std::optional<ParetoFront> robust_by_tag[2];
    std::optional<ParetoFront> reeval_by_tag[2];
    for (int ti = 0; ti < 2; ++ti) {
      const UncertaintyTag tag = tags[ti];
      const std::string key = short_name(form) + "_" + short_name(tag);
      if (!has_front(config, form, tag)) {
        skipped.push_back(front_file_name(form, tag) + " not found");
        continue;
      }
      const UncertaintySpec u = uncertainty_for(config, space, tag);
      if (u.include_material && !ev.material_inputs) {
        skipped.push_back(key + ": evaluator has no material inputs");
        continue;
      }
      const ParetoFront robust = read_front(config, form, tag, space);
      const ParetoFront reeval =
          reevaluate_front(det, ev.responses, u, metric, settings, objective_seed(config, form), &warnings);
      const auto zones = match_zones(robust, reeval, config.zones);
      const ZoneOrdering order = zone_ordering(robust, reeval, zones, 0.05);
      json zone_rows = json::array();
      for (std::size_t z = 0; z < zones.size(); ++z) {
        zone_rows.push_back({{"zone", std::string(1, zone_letter(zones[z].zone, zones.size()))},
                             {"robust_ripple", order.robust_f2[z]},
                             {"reevaluated_ripple", order.reference_f2[z]},
                             {"robust_no_worse", static_cast<bool>(order.holds[z])}});
      }
      report[key] = {{"robust_front_size", robust.size()},
                     {"reevaluated_front_size", reeval.size()},
                     {"zones", zone_rows},
                     {"zones_robust_no_worse", order.count}};

      if (tag == UncertaintyTag::ug) {
        const auto boxes = zone_boxplots(robust, reeval, zones, ev.responses, u, config.boxplot_samples,
                                         derive_seed(config.seed, "boxplots-" + short_name(form)));
        CsvTable t;
        t.header = {"zone", "series", "torque_objective", "ripple_objective", "q1", "q2", "q3", "whisker_low",
                    "whisker_high", "mean", "std", "max"};
        for (std::size_t z = 0; z < boxes.size(); ++z) {
          const std::string letter(1, zone_letter(zones[z].zone, zones.size()));
          const Individual& r = robust.individuals[zones[z].index_a];
          const Individual& d = reeval.individuals[zones[z].index_b];
          std::vector<std::string> row_r = {letter, "robust", format_double(-r.objectives[0]),
                                            format_double(r.objectives[1])};
          add_boxplot_columns(row_r, boxes[z].ripple_a);
          row_r.push_back(format_double(boxes[z].worst_ripple_a));
          std::vector<std::string> row_d = {letter, "deterministic", format_double(-d.objectives[0]),
                                            format_double(d.objectives[1])};
          add_boxplot_columns(row_d, boxes[z].ripple_b);
          row_d.push_back(format_double(boxes[z].worst_ripple_b));
          t.add_row(std::move(row_d));
          t.add_row(std::move(row_r));
        }
        write_text_file(out_path(config, box_figs[fi]), t.to_string());
        written.push_back(box_figs[fi]);
        // Lowest-torque zone: the robust design should vary less.
        const ZoneBoxplot& a = boxes.back();
        report[key]["zone_A_std"] = {{"robust", a.ripple_a.std}, {"deterministic", a.ripple_b.std}};
        if (form == Formulation::expectation) zone_a_design = robust.individuals[zones.back().index_a].x;
      }

      CsvTable t = front_figure_header(space);
      if (tag == UncertaintyTag::ug) add_front_rows(t, "deterministic", det);
      add_front_rows(t, "deterministic_reevaluated", reeval);
      add_front_rows(t, to_string(form), robust);
      if (tag == UncertaintyTag::ug_um && robust_by_tag[0]) {
        add_front_rows(t, std::string(to_string(form)) + "_Ug", *robust_by_tag[0]);
        add_front_rows(t, "deterministic_reevaluated_Ug", *reeval_by_tag[0]);
      }
      write_text_file(out_path(config, front_figs[fi][ti]), t.to_string());
      written.push_back(front_figs[fi][ti]);
      robust_by_tag[ti] = robust;
      reeval_by_tag[ti] = reeval;
    }
    if (robust_by_tag[0] && robust_by_tag[1]) {
      const std::string key = "front_shift_" + short_name(form);
      try {
        const FrontShift shift = front_shift_check(*robust_by_tag[0], *robust_by_tag[1], metric);
        report[key] = {{"offset", shift.offset}, {"residual", shift.residual}, {"pairs", shift.pairs}};
        if (config.evaluator == "bench") {
          report[key]["closed_form_offset"] = form == Formulation::expectation ? bench::expected_material_shift()
                                                                               : bench::worst_material_shift();
        }
      } catch (const Error& e) {
        report[key] = {{"error", e.what()}};
      }
    }
  }

  // Material studies use the evaluator when it takes material inputs and
  // fall back to the benchmark otherwise.
  const Response torque = ev.material_inputs ? ev.responses.torque : bench::responses().torque;
  report["material_study_evaluator"] = ev.material_inputs ? ev.description : "benchmark (fallback)";
  const DesignPoint reference = zone_a_design ? *zone_a_design : det.individuals.front().x;
  report["material_study_reference"] = zone_a_design ? "zone A of the expectation front" : "first deterministic design";

  {
    CsvTable t;
    t.header = {"alpha", "beta", "torque"};
    for (int i = 0; i <= 10; ++i) {
      for (int j = 0; j <= 10; ++j) {
        const MaterialState m{0.1 * i, MaterialState::max_beta * 0.1 * j};
        t.add_row({format_double(m.alpha), format_double(m.beta), format_double(torque(reference, m))});
      }
    }
    write_text_file(out_path(config, "fig15.csv"), t.to_string());
    written.push_back("fig15.csv");
  }

  const std::vector<MaterialState> grid = {{0.0, 0.0},
                                           {0.25, 0.25 * MaterialState::max_beta},
                                           {0.5, 0.5 * MaterialState::max_beta},
                                           {0.75, 0.75 * MaterialState::max_beta},
                                           {1.0, MaterialState::max_beta},
                                           {1.0, 0.0}};
  DerivativeStudyOptions dopt;
  dopt.workers = config.workers;
  const struct {
    DerivativeOrder order;
    const char* file;
  } studies[] = {{DerivativeOrder::second, "fig16.csv"}, {DerivativeOrder::first, "fig17.csv"}};
  for (const auto& s : studies) {
    const auto series = derivative_study(torque, space, config.derivative_points, grid, s.order,
                                         derive_seed(config.seed, "derivatives"), dopt);
    CsvTable t;
    t.header = {"alpha", "beta", "component", "q1", "q2", "q3", "whisker_low", "whisker_high",
                "mean", "std", "min", "max", "one_sided", "reference_design"};
    double max_abs = 0.0;
    for (std::size_t k = 0; k < series.size(); ++k) {
      const auto& d = series[k];
      const std::size_t per_point = s.order == DerivativeOrder::first ? 2 : 3;
      const auto ref = material_derivatives(torque, reference, d.at, s.order, dopt.step);
      const auto [lo, hi] = std::minmax_element(d.values.begin(), d.values.end());
      std::vector<std::string> row = {format_double(d.at.alpha), format_double(d.at.beta), d.component};
      add_boxplot_columns(row, d.stats);
      row.push_back(format_double(*lo));
      row.push_back(format_double(*hi));
      row.push_back(d.one_sided ? "1" : "0");
      row.push_back(format_double(ref[k % per_point]));
      t.add_row(std::move(row));
      max_abs = std::max({max_abs, std::abs(*lo), std::abs(*hi)});
    }
    write_text_file(out_path(config, s.file), t.to_string());
    written.push_back(s.file);
    report[s.order == DerivativeOrder::second ? "second_derivative_max_abs" : "first_derivative_max_abs"] = max_abs;
  }

  report["skipped"] = skipped;
  report["warnings"] = warnings;
  write_json(out_path(config, "analysis.json"), report);
  std::string summary = "analyze:";
  for (const auto& w : written) summary += " " + w;
  summary += " analysis.json";
  return summary;
}

std::vector<std::string> cmd_all(const RunConfig& config) {
  std::vector<std::string> log;
  log.push_back(cmd_doe(config));
  log.push_back(cmd_fit(config));
  log.push_back(cmd_sobol(config));
  const bool material = load_evaluators(config).material_inputs;
  const std::pair<Formulation, UncertaintyTag> runs[] = {
      {Formulation::deterministic, UncertaintyTag::none}, {Formulation::expectation, UncertaintyTag::ug},
      {Formulation::worst_case, UncertaintyTag::ug},      {Formulation::expectation, UncertaintyTag::ug_um},
      {Formulation::worst_case, UncertaintyTag::ug_um}};
  for (const auto& [form, tag] : runs) {
    if (tag == UncertaintyTag::ug_um && !material) {
      log.push_back(std::string("optimize: skipped ") + to_string(form) + "/Ug_Um (no material inputs)");
      continue;
    }
    RunConfig c = config;
    c.formulation = form;
    c.uncertainty = tag;
    log.push_back(cmd_optimize(c));
  }
  log.push_back(cmd_analyze(config));
  return log;
}

}  // namespace rdo
