#pragma once

#include <limits>
#include <string>
#include <vector>

#include "pintoc/time_decomposition.hpp"

namespace pintoc {

enum class Algorithm { serial, sitpoc, pitpoc };

Algorithm algorithm_from_string(const std::string& name);
std::string to_string(Algorithm a);

/// One row of the convergence history. For serial/sitpoc, J and grad_norm are
/// the true cost and gradient norm at iterate k and theta is the relaxation
/// (for serial: the step rho). For pitpoc, J is the interface surrogate cost,
/// grad_norm the update-size proxy, and true_J a certified uncounted value.
struct IterationRecord {
  int k = 0;
  double J = 0.0;
  double grad_norm = 0.0;
  double theta = 0.0;
  long solves_serial = 0;
  long solves_parallel = 0;
  double wall_ms = 0.0;
  double true_J = std::numeric_limits<double>::quiet_NaN();
};

struct RunConfig {
  ControlProblem problem;
  Algorithm algorithm = Algorithm::sitpoc;
  int intervals = 4;
  int inner_steps = 1;
  int max_outer = 100;
  double tol = 1e-8;
  bool relative_tol = true;  // threshold = tol * max(1, first residual)
  int workers = 1;
  int coarse_steps_per_interval = 1;
  bool record_iterates = true;
};

struct RunResult {
  std::vector<IterationRecord> history;
  std::vector<ControlTrajectory> iterates;  // v^0..v^K when recorded
  ControlTrajectory v;
  bool converged = false;
  double final_true_cost = 0.0;
  CounterPair counters;
  std::vector<double> rho_log;  // inner steps, gathered in interval order
};

struct SitpocStepResult {
  ControlTrajectory v_next;
  double cost = 0.0;       // J(v^k)
  double grad_norm = 0.0;  // ||grad J(v^k)||_v
  double theta = 0.0;
  bool converged = false;
  std::vector<double> rhos;  // inner step sizes, interval-major order
};

/// One SITPOC outer iteration: serial fine sweeps for (y, p, chi), parallel
/// local solves, then optimal relaxation. J(v_next) <= J(v).
SitpocStepResult sitpoc_iterate(const ControlProblem& pb,
                                const ControlTrajectory& v,
                                const Subdivision& sub, int l_max, int workers,
                                CounterPair& counters);

RunResult run_sitpoc(const RunConfig& cfg);

/// Optimal-step gradient descent on the global J; the N=1 baseline.
RunResult run_serial_baseline(const RunConfig& cfg);

RunResult run_algorithm(const RunConfig& cfg);

}  // namespace pintoc
