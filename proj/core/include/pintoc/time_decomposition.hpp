#pragma once

#include <vector>

#include "pintoc/optimal_control.hpp"

namespace pintoc {

/// Uniform subdivision of [0,T] into N sub-intervals aligned to the fine
/// time grid. boundaries holds the N+1 fine-step indices of the interfaces.
struct Subdivision {
  int count = 0;
  std::vector<int> boundaries;
  double delta_t = 0.0;

  Window interval(int n) const { return {boundaries[n], boundaries[n + 1]}; }
  int steps_per_interval() const { return boundaries[1] - boundaries[0]; }
};

Subdivision subdivide(const TimeGrid& time, int N);

/// Interface-time sequences: forward values lambda_0..lambda_N, backward
/// values mu_1..mu_N and targets chi_1..chi_N.
struct InterfaceStates {
  std::vector<Field> lambdas;  // size N+1
  std::vector<Field> mus;      // size N, mu(n) for n = 1..N
  std::vector<Field> chis;     // size N, chi(n) for n = 1..N

  const Field& lambda(int n) const { return lambdas[n]; }
  const Field& mu(int n) const { return mus[n - 1]; }
  const Field& chi(int n) const { return chis[n - 1]; }
};

/// chi_n = y(t_n) - p(t_n) at every interface; chi_N equals y_target by the
/// adjoint terminal condition.
InterfaceStates build_targets(const std::vector<Field>& y_traj,
                              const std::vector<Field>& p_traj,
                              const Subdivision& sub);

/// Local problem on interval n: propagate from y_start, hit chi_end.
struct SubProblem {
  int n = 0;
  Field y_start;
  Field chi_end;
  Window window;
};

SubProblem make_subproblem(const Subdivision& sub, int n, Field y_start,
                           Field chi_end);

double local_cost(const ControlProblem& pb, const SubProblem& sp,
                  const ControlTrajectory& vn, OpCounter& counter);
ControlTrajectory local_gradient(const ControlProblem& pb, const SubProblem& sp,
                                 const ControlTrajectory& vn,
                                 OpCounter& counter);
ControlTrajectory local_hessian_apply(const ControlProblem& pb,
                                      const SubProblem& sp,
                                      const ControlTrajectory& dv,
                                      OpCounter& counter);

/// l_max iterations of the locally optimal step gradient method on J_n.
/// Returns immediately if the local gradient vanishes. When rho_log is given
/// the step sizes are appended to it; when grad0 is given it receives the
/// local gradient evaluated at v_init.
ControlTrajectory solve_subproblem(const ControlProblem& pb,
                                   const SubProblem& sp,
                                   ControlTrajectory v_init, int l_max,
                                   OpCounter& counter,
                                   std::vector<double>* rho_log = nullptr,
                                   ControlTrajectory* grad0 = nullptr);

}  // namespace pintoc
