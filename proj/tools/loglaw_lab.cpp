// loglaw_lab: runs configured logarithm-law experiments.
//
//   loglaw_lab run <config.json | name> [--seed N] [--out DIR] [--threads K] [--no-timestamp]
//   loglaw_lab list
//   loglaw_lab validate <config.json | name>

#include <CLI11.hpp>

#include <iostream>

#include "lab/lab.hpp"

namespace lab = loglaw::lab;

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for hitting-time logarithm laws"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out;
  bool no_timestamp = false;

  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("config", config, "Config file or bundled config name")->required();
  run->add_option("--seed", seed, "Master seed (overrides the config)");
  run->add_option("--out", out, "Output directory (default: runs/<config name>)");
  run->add_option("--threads", threads, "Worker threads (overrides the config)");
  run->add_flag("--no-timestamp", no_timestamp, "Omit the generated-at header lines");

  auto* list = app.add_subcommand("list", "List bundled configs");

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", config, "Config file or bundled config name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& b : lab::bundled_configs()) {
        std::cout << b.name << "  [" << b.experiment << "]  " << b.description << '\n';
      }
      return 0;
    }
    auto path = lab::resolve_config(config);
    lab::Overrides overrides{seed, threads};
    auto json = lab::load_config(path);
    if (validate->parsed()) {
      auto errors = lab::validate(json, overrides);
      if (errors.empty()) {
        std::cout << path.string() << ": ok\n";
        return 0;
      }
      std::cerr << path.string() << ": invalid config:\n";
      for (const auto& e : errors) std::cerr << "  " << e << '\n';
      return 1;
    }
    if (out.empty()) out = "runs/" + path.stem().string();
    auto outcome = lab::run(json, overrides);
    lab::write_outcome(outcome, out, !no_timestamp);
    std::cout << outcome.report << "wrote " << out << '\n';
    return lab::exit_code(outcome.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
