#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pintoc/algorithms.hpp"

namespace pintoc {

/// Experiment description: problem parameters, algorithm selection and the
/// (N, l_max) sweep. Parsed from `key = value` text with '#' comments.
struct ExperimentConfig {
  double alpha = 1e-2;
  double nu = 1e-2;
  double T = 6.4;
  double dt = 1e-2;
  int nx = 9;
  int ny = 9;
  std::vector<int> intervals{4};
  std::vector<int> inner_steps{1};
  Algorithm algorithm = Algorithm::sitpoc;
  int workers = 4;
  int max_outer = 200;
  double tol = 1e-8;  // relative to max(1, initial residual)
  int coarse_steps = 1;
  std::string y0_spec = "zero";
  std::string y_target_spec = "gaussian(0.5,0.5,0.15,1.0)";
  std::string output_path = "out";
  unsigned seed = 0;
  bool timing = false;  // off keeps CSV output bitwise reproducible
};

ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& cfg);

/// Evaluate a named analytic profile ("zero", "gaussian(cx,cy,sigma,amp)",
/// "product_sine(amp)") on the grid.
Field make_profile(const Grid& grid, const std::string& spec);

ControlProblem make_problem(const ExperimentConfig& cfg);

/// Run the sweep and write run_N<N>_l<l>.csv per run plus summary.csv and
/// diagnostics.csv under cfg.output_path. Returns 0 when every run converged,
/// 2 when some did not; I/O failures throw.
int run_experiment(const ExperimentConfig& cfg);

}  // namespace pintoc
