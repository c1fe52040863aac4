// Command-line driver: run one experiment config or a directory of them.
#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "hext/experiment.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Extension-of-set-functions experiment runner"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
  app.add_option("--jobs", jobs, "Concurrent suite members")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Seed overriding the config");
  app.add_option("--out", out, "CSV path (run) or output directory (suite)");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one experiment config");
  run->add_option("config", config_path, "Config file")->required();

  std::string suite_dir;
  auto* suite = app.add_subcommand("suite", "Run every *.cfg in a directory");
  suite->add_option("dir", suite_dir, "Config directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  hext::RunOptions options;
  options.seed = seed;

  if (*run) {
    if (!out.empty()) options.out = out;
    hext::ExperimentResult result;
    try {
      result = hext::run_experiment(hext::load_config(config_path), options);
    } catch (const std::exception& e) {
      std::cerr << config_path << ": " << e.what() << '\n';
      return 1;
    }
    std::cerr << result.message;
    if (result.witness)
      std::cout << "WITNESS " << hext::format_real(result.witness->value_first) << ' '
                << hext::format_real(result.witness->value_second) << ' '
                << hext::format_real(result.witness->gap_first) << ' '
                << hext::format_real(result.witness->gap_second) << '\n';
    std::cout << result.summary_line() << std::endl;
    return result.exit_code;
  }

  try {
    const fs::path out_dir = out.empty() ? fs::current_path() : fs::path(out);
    const auto report = hext::run_suite(suite_dir, out_dir, jobs, options);
    for (const auto& m : report.members) {
      std::cout << m.config << ": " << m.result.summary_line() << '\n';
      if (!m.result.message.empty()) std::cerr << m.config << ": " << m.result.message;
    }
    std::cout << report.table();
    return report.exit_code;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
}
