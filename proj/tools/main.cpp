#include <CLI11.hpp>
#include <iostream>

#include "ma/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet Monge-Ampere solver with boundary subsolutions"};
  app.require_subcommand(1);

  std::string config_path, solution_path;

  auto* barrier = app.add_subcommand(
      "barrier", "Build the boundary subsolution and verify its inequality");
  barrier->add_option("config", config_path, "JSON experiment config")
      ->required()
      ->check(CLI::ExistingFile);

  auto* solve = app.add_subcommand("solve", "Run the monotone scheme");
  solve->add_option("config", config_path, "JSON experiment config")
      ->required()
      ->check(CLI::ExistingFile);

  auto* sweep =
      app.add_subcommand("sweep", "Parameter sweep over (alpha, beta, gamma, h)");
  sweep->add_option("config", config_path, "JSON experiment config")
      ->required()
      ->check(CLI::ExistingFile);

  auto* verify =
      app.add_subcommand("verify", "Sampled structure checks on the rhs");
  verify->add_option("config", config_path, "JSON experiment config")
      ->required()
      ->check(CLI::ExistingFile);

  auto* analyze =
      app.add_subcommand("analyze", "Diagnostics for a stored solution");
  analyze->add_option("config", config_path, "JSON experiment config")
      ->required()
      ->check(CLI::ExistingFile);
  analyze->add_option("solution", solution_path, "solution CSV")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    const ma::ExperimentConfig cfg = ma::ExperimentConfig::load(config_path);
    if (barrier->parsed()) return ma::cmd_barrier(cfg);
    if (solve->parsed()) return ma::cmd_solve(cfg);
    if (sweep->parsed()) return ma::cmd_sweep(cfg);
    if (verify->parsed()) return ma::cmd_verify(cfg);
    if (analyze->parsed()) return ma::cmd_analyze(cfg, solution_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
