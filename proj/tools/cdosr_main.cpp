// Apache License, Version 2.0, refer to LICENSE.txt

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <optional>

#include "cdosr/dispatch.hpp"

namespace {

std::optional<std::uint64_t> seed_from_env() {
  const char* v = std::getenv("CDOSR_SEED");
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto s = std::stoull(v, &used);
    if (used != std::string(v).size()) throw std::invalid_argument(v);
    return s;
  } catch (const std::exception&) {
    throw cdosr::ConfigError(std::string("CDOSR_SEED: expected an integer, got '") + v + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open set recognition by HDP co-clustering"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, dataset, out_dir, input, unknown_counts, fractions, eps_grid, nu_grid,
      varsigma_grid;
  std::optional<std::uint64_t> seed;
  std::optional<int> repeats, sweeps, init_components, omega, unknown_count;
  std::optional<double> epsilon, nu_offset, varsigma;
  bool verbose = false, serial = false;

  app.add_option("--config", config_path, "INI configuration file");
  app.add_option("--dataset", dataset, "dataset file (dense CSV or sparse label idx:val)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "root seed (overrides CDOSR_SEED)");
  app.add_option("--repeats", repeats, "repeats per study point");
  app.add_option("--unknown-counts", unknown_counts, "comma-separated unknown class counts");
  app.add_option("--unknown-count", unknown_count, "unknown classes for batch/epsilon/discover");
  app.add_option("--fractions", fractions, "comma-separated batch fractions");
  app.add_option("--eps-grid", eps_grid, "comma-separated epsilon values");
  app.add_option("--nu-grid", nu_grid, "comma-separated nu offsets for fit");
  app.add_option("--varsigma-grid", varsigma_grid, "comma-separated varsigma values for fit");
  app.add_option("--t-sweeps", sweeps, "Gibbs sweeps per chain");
  app.add_option("--init-components", init_components, "initial tables per group");
  app.add_option("--omega", omega, "known training classes");
  app.add_option("--epsilon", epsilon, "subclass pruning threshold");
  app.add_option("--nu-offset", nu_offset, "prior degrees of freedom minus dimension");
  app.add_option("--varsigma", varsigma, "prior scatter scale");
  app.add_flag("--serial", serial, "run study jobs and kernels serially");
  app.add_flag("-v,--verbose", verbose, "per-sweep progress");

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"fit", "grid search for nu and varsigma"},
      {"sweep", "micro-F across openness levels"},
      {"batch", "micro-F across test batch sizes"},
      {"epsilon", "micro-F across pruning thresholds"},
      {"discover", "one recognition run with a subclass report"},
      {"report", "render a saved artifact"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);
  app.get_subcommand("report")->add_option("--input", input, "artifact to render")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cdosr::kExitConfig;
  }

  cdosr::RunConfig config;
  try {
    config.kind = cdosr::parse_study_kind(app.get_subcommands().front()->get_name());
    if (!config_path.empty()) {
      const auto kind = config.kind;
      config = cdosr::load_config_file(config_path, config);
      config.kind = kind;
    }
    if (auto s = seed_from_env()) config.study.root_seed = *s;
    auto& h = config.study.hyper;
    if (!dataset.empty()) config.dataset = dataset;
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (!input.empty()) config.input = input;
    if (seed) config.study.root_seed = *seed;
    if (repeats) config.study.repeats = *repeats;
    if (omega) config.study.omega = *omega;
    if (unknown_count) config.unknown_count = *unknown_count;
    if (!unknown_counts.empty()) config.unknown_counts = cdosr::parse_int_list(unknown_counts);
    if (!fractions.empty()) config.fractions = cdosr::parse_real_list(fractions);
    if (!eps_grid.empty()) config.eps_grid = cdosr::parse_real_list(eps_grid);
    if (!nu_grid.empty()) config.nu_grid = cdosr::parse_real_list(nu_grid);
    if (!varsigma_grid.empty()) config.varsigma_grid = cdosr::parse_real_list(varsigma_grid);
    if (sweeps) h.sweeps = *sweeps;
    if (init_components) h.init_components = *init_components;
    if (epsilon) h.epsilon = *epsilon;
    if (nu_offset) h.nu_offset = *nu_offset;
    if (varsigma) h.varsigma = *varsigma;
    if (serial) {
      config.study.jobs = cdosr::Execution::kSerial;
      h.sampler.execution = cdosr::Execution::kSerial;
    }
    config.verbose = config.verbose || verbose;
  } catch (const cdosr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cdosr::kExitConfig;
  }
  return cdosr::dispatch(config, std::cout, std::cerr);
}
