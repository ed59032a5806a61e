#include "pintoc/time_decomposition.hpp"

namespace pintoc {

Subdivision subdivide(const TimeGrid& time, int N) {
  if (N < 1) throw ConfigError("subdivide: N must be >= 1");
  if (time.M % N != 0)
    throw ConfigError("subdivide: fine step count " + std::to_string(time.M) +
                      " not divisible by N = " + std::to_string(N));
  Subdivision sub;
  sub.count = N;
  sub.delta_t = time.T / N;
  const int per = time.M / N;
  sub.boundaries.resize(N + 1);
  for (int n = 0; n <= N; ++n) sub.boundaries[n] = n * per;
  return sub;
}

InterfaceStates build_targets(const std::vector<Field>& y_traj,
                              const std::vector<Field>& p_traj,
                              const Subdivision& sub) {
  const int M = sub.boundaries.back();
  if (static_cast<int>(y_traj.size()) != M + 1 ||
      static_cast<int>(p_traj.size()) != M + 1)
    throw ShapeError("build_targets: trajectories do not span the fine grid");
  InterfaceStates st;
  st.lambdas.reserve(sub.count + 1);
  for (int n = 0; n <= sub.count; ++n)
    st.lambdas.push_back(y_traj[sub.boundaries[n]]);
  st.mus.reserve(sub.count);
  st.chis.reserve(sub.count);
  for (int n = 1; n <= sub.count; ++n) {
    st.mus.push_back(p_traj[sub.boundaries[n]]);
    st.chis.push_back(y_traj[sub.boundaries[n]] - p_traj[sub.boundaries[n]]);
  }
  return st;
}

SubProblem make_subproblem(const Subdivision& sub, int n, Field y_start,
                           Field chi_end) {
  SubProblem sp;
  sp.n = n;
  sp.y_start = std::move(y_start);
  sp.chi_end = std::move(chi_end);
  sp.window = sub.interval(n);
  return sp;
}

double local_cost(const ControlProblem& pb, const SubProblem& sp,
                  const ControlTrajectory& vn, OpCounter& counter) {
  auto y = forward_solve(*pb.op, pb.grid, pb.time.dt, sp.y_start, vn,
                         sp.window, counter);
  Field mismatch = y.back() - sp.chi_end;
  double nv = control_norm(pb.grid, pb.time.dt, vn);
  return 0.5 * field_dot(pb.grid, mismatch, mismatch) +
         0.5 * pb.alpha * nv * nv;
}

ControlTrajectory local_gradient(const ControlProblem& pb, const SubProblem& sp,
                                 const ControlTrajectory& vn,
                                 OpCounter& counter) {
  auto y = forward_solve(*pb.op, pb.grid, pb.time.dt, sp.y_start, vn,
                         sp.window, counter);
  auto p = backward_solve(*pb.op, pb.time.dt, Field(y.back() - sp.chi_end),
                          sp.window, counter);
  ControlTrajectory g;
  g.window = vn.window;
  g.snapshots.reserve(vn.snapshots.size());
  for (std::size_t s = 0; s < vn.snapshots.size(); ++s)
    g.snapshots.push_back(pb.alpha * vn.snapshots[s] +
                          restrict_control(pb.grid, p[s]));
  return g;
}

ControlTrajectory local_hessian_apply(const ControlProblem& pb,
                                      const SubProblem& sp,
                                      const ControlTrajectory& dv,
                                      OpCounter& counter) {
  if (!(dv.window == sp.window))
    throw ShapeError("local_hessian_apply: window mismatch");
  Field zero = Field::Zero(pb.grid.num_nodes());
  auto dy = forward_solve(*pb.op, pb.grid, pb.time.dt, zero, dv, sp.window,
                          counter);
  auto dp = backward_solve(*pb.op, pb.time.dt, dy.back(), sp.window, counter);
  ControlTrajectory h;
  h.window = dv.window;
  h.snapshots.reserve(dv.snapshots.size());
  for (std::size_t s = 0; s < dv.snapshots.size(); ++s)
    h.snapshots.push_back(pb.alpha * dv.snapshots[s] +
                          restrict_control(pb.grid, dp[s]));
  return h;
}

ControlTrajectory solve_subproblem(const ControlProblem& pb,
                                   const SubProblem& sp,
                                   ControlTrajectory v_init, int l_max,
                                   OpCounter& counter,
                                   std::vector<double>* rho_log,
                                   ControlTrajectory* grad0) {
  if (l_max < 1) throw ConfigError("solve_subproblem: l_max must be >= 1");
  if (!(v_init.window == sp.window))
    throw ShapeError("solve_subproblem: initial control window mismatch");
  ControlTrajectory v = std::move(v_init);
  for (int l = 0; l < l_max; ++l) {
    ControlTrajectory g = local_gradient(pb, sp, v, counter);
    if (l == 0 && grad0) *grad0 = g;
    if (control_dot(pb.grid, pb.time.dt, g, g) == 0.0) break;
    ControlTrajectory hg = local_hessian_apply(pb, sp, g, counter);
    double rho = optimal_rho(pb.grid, pb.time.dt, g, hg);
    if (rho_log) rho_log->push_back(rho);
    v = lin_comb(1.0, v, -rho, g);
  }
  return v;
}

}  // namespace pintoc
