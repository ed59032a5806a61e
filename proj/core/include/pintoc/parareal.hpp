#pragma once

#include "pintoc/algorithms.hpp"

namespace pintoc {

/// Coarse forward propagator over interval n: `coarse_steps` implicit-Euler
/// steps of size delta_t/coarse_steps, with the fine control snapshots
/// averaged inside each coarse step. coarse_steps must divide the interval's
/// fine step count; coarse_steps equal to it makes the coarse and fine
/// propagators identical.
Field coarse_forward(const ControlProblem& pb, const Subdivision& sub,
                     int coarse_steps, const Field& lambda_n,
                     const ControlTrajectory& vn, int n, OpCounter& counter);

/// Fine forward propagator over interval n (terminal value only).
Field fine_forward(const ControlProblem& pb, const Subdivision& sub,
                   const Field& lambda_n, const ControlTrajectory& vn, int n,
                   OpCounter& counter);

/// Homogeneous backward propagators mapping mu_{n+1} to a value at t_n.
Field coarse_backward(const ControlProblem& pb, const Subdivision& sub,
                      int coarse_steps, const Field& mu_next, int n,
                      OpCounter& counter);
Field fine_backward(const ControlProblem& pb, const Subdivision& sub,
                    const Field& mu_next, int n, OpCounter& counter);

/// Parareal forward correction sweep:
///   lt_{n+1} = G(lt_n, vt_n) + F(l_n, vt_n) - G(l_n, vt_n),  lt_0 = y0.
/// Fine propagations and coarse correctors run concurrently across
/// intervals; the predictor recursion is serial. The previous control v is
/// accepted for interface compatibility but the correction is computed
/// entirely with the updated control, which keeps the relaxed iteration
/// stationary at the optimum.
std::vector<Field> parareal_forward_sweep(const ControlProblem& pb,
                                          const Subdivision& sub,
                                          int coarse_steps,
                                          const std::vector<Field>& lambdas,
                                          const ControlTrajectory& v,
                                          const ControlTrajectory& v_tilde,
                                          int workers, CounterPair& counters);

/// Parareal backward correction sweep for the homogeneous adjoint:
///   mu_n' = Gt(mu_{n+1}') + Ft(mu_{n+1}) - Gt(mu_{n+1}),  mu_N' given.
/// mus holds mu_1..mu_N (size N); the result has the same layout.
std::vector<Field> parareal_backward_sweep(const ControlProblem& pb,
                                           const Subdivision& sub,
                                           int coarse_steps,
                                           const std::vector<Field>& mus,
                                           const Field& mu_final, int workers,
                                           CounterPair& counters);

struct PitpocState {
  ControlTrajectory v;
  std::vector<Field> lambdas;  // size N+1
  std::vector<Field> mus;      // size N, mu_1..mu_N
};

/// Coarse forward/backward recursions seeding lambda^0 and mu^0.
PitpocState pitpoc_init(const ControlProblem& pb, const Subdivision& sub,
                        int coarse_steps, ControlTrajectory v0,
                        CounterPair& counters);

struct PitpocStepResult {
  PitpocState next;
  double surrogate_cost = 0.0;  // at the pre-step state
  double theta = 0.0;
  double step_norm = 0.0;  // ||v^{k+1}-v^k||_v
  bool converged = false;
  std::vector<double> rhos;
};

/// One PITPOC outer iteration: targets from interface states, parallel local
/// solves, forward sweeps, relaxation of (v, lambda) by the closed-form
/// minimizer of the quadratic relaxation model (local-gradient slope, sweep
/// response curvature), then the backward sweep from the relaxed terminal
/// mismatch.
PitpocStepResult pitpoc_iterate(const ControlProblem& pb,
                                const Subdivision& sub, int coarse_steps,
                                const PitpocState& state, int l_max,
                                int workers, CounterPair& counters);

/// Surrogate cost 1/2 ||lambda_N - y_target||^2 + alpha/2 ||v||_v^2.
double surrogate_cost(const ControlProblem& pb, const PitpocState& state);

RunResult run_pitpoc(const RunConfig& cfg);

}  // namespace pintoc
