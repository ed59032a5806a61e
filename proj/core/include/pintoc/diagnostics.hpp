#pragma once

#include <optional>
#include <random>

#include "pintoc/algorithms.hpp"

namespace pintoc {

struct HypothesisRow {
  int k = 0;
  double descent_inner = 0.0;  // <grad J(v^k), v^{k+1}-v^k>_v, must be <= 0
  double eta_ratio = 0.0;      // ||grad J(v^k)|| / ||v^{k+1}-v^k||
  double step_norm = 0.0;
  double cost = 0.0;
};

/// Per-run verification of the convergence hypotheses and linear rate.
struct HypothesisReport {
  std::vector<HypothesisRow> rows;
  double eta_bound = 0.0;   // beta_emp^2 / alpha
  double rate_bound = 0.0;  // 1 - 2 alpha^2 / eta^2
  double fitted_rate = 0.0;
  bool rate_fit_valid = false;
  bool finite_termination = false;  // some iterate already reached J*
  bool descent_ok = true;           // all descent_inner <= tolerance
  bool eta_ok = true;               // all eta_ratio <= eta_bound
};

/// Evaluate the hypotheses on a recorded run. Requires iterates in `result`.
/// Without J_star the rate fit is skipped; the inequality checks still run.
HypothesisReport check_hypotheses(const ControlProblem& pb,
                                  const RunResult& result,
                                  std::optional<double> J_star,
                                  double beta_emp);

/// Empirical upper Hessian bound: max Rayleigh quotient over random probes
/// plus a few structured (time-constant, smooth) ones.
double estimate_beta(const ControlProblem& pb, int probes, unsigned seed);

/// Exact largest eigenvalue of the dense control Hessian. Desk scale only
/// (same unknown cap as the dense oracle).
double exact_beta(const ControlProblem& pb);

ControlTrajectory random_control(const ControlProblem& pb, Window window,
                                 std::mt19937_64& rng, double scale = 1.0);

/// Time-alternating probe driving the Rayleigh quotient toward alpha.
ControlTrajectory high_frequency_probe(const ControlProblem& pb);

/// Least-squares slope fit of log(values) vs index; returns exp(slope).
std::optional<double> fit_linear_rate(const std::vector<double>& values,
                                      int skip, int min_points);

}  // namespace pintoc
