// Command-line driver for the robust design workflow.
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rdo/error.hpp"
#include "rdo/pipeline.hpp"
#include "acceptance.hpp"

namespace {

void print_error(const std::string& command, const std::string& code, const std::string& message) {
  nlohmann::json record = {{"error", code}, {"message", message}, {"command", command}};
  std::cerr << record.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust design optimization of a synchronous reluctance motor benchmark"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string out, formulation, uncertainty, evaluator;
  app.add_option("--config", config_path, "key = value run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "global seed");
  app.add_option("--out", out, "output directory");
  app.add_option("--formulation", formulation, "det | exp | wc")->check(CLI::IsMember({"det", "exp", "wc"}));
  app.add_option("--uncertainty", uncertainty, "none | ug | ugum")->check(CLI::IsMember({"none", "ug", "ugum"}));
  app.add_option("--evaluator", evaluator, "bench | surrogate")->check(CLI::IsMember({"bench", "surrogate"}));
  app.add_option("--workers", workers, "worker threads");

  auto* doe = app.add_subcommand("doe", "maximin LHS over the design space, evaluated on the benchmark");
  auto* fit = app.add_subcommand("fit", "fit and validate the Kriging surrogates");
  auto* sobol = app.add_subcommand("sobol", "Sobol indices of both outputs");
  auto* optimize = app.add_subcommand("optimize", "NSGA-II under the selected formulation");
  auto* analyze = app.add_subcommand("analyze", "front comparisons and material studies");
  auto* all = app.add_subcommand("all", "every stage in order");
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  std::vector<int> only;
  verify->add_option("--only", only, "criterion numbers to run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (verify->parsed()) {
      const auto results = rdo::acceptance::run(std::cout, only);
      std::size_t failed = 0;
      for (const auto& r : results) failed += r.pass ? 0 : 1;
      return failed == 0 ? 0 : 1;
    }
    rdo::RunConfig config = config_path.empty() ? rdo::RunConfig{} : rdo::load_run_config(config_path);
    if (seed) config.seed = *seed;
    if (workers) config.workers = *workers;
    if (!out.empty()) config.out = out;
    if (!formulation.empty()) config.formulation = rdo::parse_formulation(formulation);
    if (!uncertainty.empty()) config.uncertainty = rdo::parse_uncertainty_tag(uncertainty);
    if (!evaluator.empty()) config.evaluator = evaluator;

    if (doe->parsed()) std::cout << rdo::cmd_doe(config) << "\n";
    if (fit->parsed()) std::cout << rdo::cmd_fit(config) << "\n";
    if (sobol->parsed()) std::cout << rdo::cmd_sobol(config) << "\n";
    if (optimize->parsed()) std::cout << rdo::cmd_optimize(config) << "\n";
    if (analyze->parsed()) std::cout << rdo::cmd_analyze(config) << "\n";
    if (all->parsed()) {
      for (const auto& line : rdo::cmd_all(config)) std::cout << line << "\n";
    }
  } catch (const rdo::Error& e) {
    print_error(command, rdo::to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error(command, "internal", e.what());
    return 1;
  }
  return 0;
}
