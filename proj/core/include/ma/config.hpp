#pragma once

#include <filesystem>
#include <string>

#include "ma/analysis.hpp"
#include "ma/barrier.hpp"
#include "ma/rhs.hpp"
#include "ma/solver.hpp"

namespace ma {

/// One experiment: domain + rhs + solver/diagnostic knobs, parsed from a
/// JSON config file. All numeric constraints of the referenced types are
/// re-validated on load (construction throws on violation).
struct ExperimentConfig {
  int schema = 1;
  std::uint64_t seed = 12345;
  std::filesystem::path output_dir = "out";

  ConvexDomain domain = ConvexDomain::disk(Vec::Zero(2), 1.0);
  RhsSpec rhs = RhsSpec::envelope(2, 1.0, 0.0, 3.0, 0.0);
  SolveConfig solver;

  int barrier_samples = 10000;
  int barrier_boundary_points = 4;
  int structure_samples = 100000;

  bool diag_holder = true;
  bool diag_interior = true;
  double level_fraction = 0.1;  // t = -fraction * |min u|

  // sweep grids (empty: use the rhs values as a single row)
  std::vector<double> sweep_alpha, sweep_beta, sweep_gamma, sweep_h;
  bool sweep_solve = false;
  int sweep_workers = 4;

  static ExperimentConfig load(const std::filesystem::path& file);
};

/// Subcommand drivers; each writes its artifacts under output_dir and
/// returns a process exit status (0 iff every verdict passes).
int cmd_barrier(const ExperimentConfig& cfg);
int cmd_solve(const ExperimentConfig& cfg);
int cmd_sweep(const ExperimentConfig& cfg);
int cmd_verify(const ExperimentConfig& cfg);
int cmd_analyze(const ExperimentConfig& cfg,
                const std::filesystem::path& solution_csv);

/// Solution CSV schema: x1,x2,value,classification.
void write_solution_csv(const GridFunction& u, const std::filesystem::path& file);
GridFunction read_solution_csv(const std::shared_ptr<const Grid>& grid,
                               const std::filesystem::path& file);

}  // namespace ma
