// kdvb-lab: run experiments from TOML configs, write JSON/CSV reports.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kdvb/lab/experiments.hpp"

namespace {

int run_single(const std::string& kind, const std::string& config, const std::string& out,
               std::optional<std::uint64_t> seed, int threads) {
  kdvb::lab::ExperimentConfig c = kdvb::lab::load_config(config);
  if (c.experiment != kind)
    throw kdvb::lab::ConfigError("experiment", "config is for " + c.experiment + ", not " + kind);
  if (seed) c.seed = *seed;
  const auto r = kdvb::lab::run_experiment(c, threads);
  kdvb::lab::write_report(r, out);
  for (const auto& ch : r.checks)
    std::cerr << (ch.passed ? "  ok   " : "  FAIL ") << ch.name << " = " << kdvb::lab::format_number(ch.value) << "\n";
  std::cerr << r.name << ": " << (r.passed() ? "pass" : "FAIL") << ", wall " << r.wall_seconds << " s\n";
  return r.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear KdV-Burgers experiment runner"};
  app.require_subcommand(1);
  std::string config, out = "out";
  std::optional<std::uint64_t> seed;
  int threads = 1;
  auto common = [&](CLI::App* sub, const std::string& what) {
    sub->add_option("--config", config, what)->required();
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--threads", threads, "worker threads; results do not depend on it")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  };
  for (const char* kind : {"simulate", "observability", "carleman", "control"}) {
    CLI::App* sub = app.add_subcommand(kind, std::string("run a ") + kind + " experiment");
    common(sub, "TOML config file");
  }
  CLI::App* all = app.add_subcommand("reproduce-all", "run every config in a directory");
  common(all, "directory of TOML configs");
  CLI11_PARSE(app, argc, argv);

  try {
    if (all->parsed()) {
      const auto suite = kdvb::lab::cmd_reproduce_all(config, out, seed, threads, &std::cerr);
      return suite.passed() ? 0 : 1;
    }
    return run_single(app.get_subcommands().front()->get_name(), config, out, seed, threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
