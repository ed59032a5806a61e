#include "pintoc/algorithms.hpp"

#include <chrono>
#include <cmath>

#include "pintoc/parallel.hpp"
#include "pintoc/parareal.hpp"

namespace pintoc {

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "serial") return Algorithm::serial;
  if (name == "sitpoc") return Algorithm::sitpoc;
  if (name == "pitpoc") return Algorithm::pitpoc;
  throw ConfigError("unknown algorithm: " + name);
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::serial: return "serial";
    case Algorithm::sitpoc: return "sitpoc";
    case Algorithm::pitpoc: return "pitpoc";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since)
      .count();
}

// Serial fine sweeps: state, adjoint, cost and gradient at v. 2M solves.
struct StateEval {
  std::vector<Field> y;
  std::vector<Field> p;
  ControlTrajectory grad;
  double cost = 0.0;
  double grad_norm = 0.0;
};

StateEval evaluate_state(const ControlProblem& pb, const ControlTrajectory& v,
                         CounterPair& counters) {
  OpCounter work;
  StateEval ev;
  ev.y = forward_solve(*pb.op, pb.grid, pb.time.dt, pb.y0, v, pb.full_window(),
                       work);
  ev.p = backward_solve(*pb.op, pb.time.dt, Field(ev.y.back() - pb.y_target),
                        pb.full_window(), work);
  counters.add_serial_work(work.linear_solves());
  ev.grad.window = v.window;
  ev.grad.snapshots.reserve(v.snapshots.size());
  for (std::size_t s = 0; s < v.snapshots.size(); ++s)
    ev.grad.snapshots.push_back(pb.alpha * v.snapshots[s] +
                                restrict_control(pb.grid, ev.p[s]));
  Field mismatch = ev.y.back() - pb.y_target;
  double nv = pb.norm_v(v);
  ev.cost =
      0.5 * field_dot(pb.grid, mismatch, mismatch) + 0.5 * pb.alpha * nv * nv;
  ev.grad_norm = pb.norm_v(ev.grad);
  return ev;
}

// Steps II-III given the evaluated state: parallel local solves, then the
// exact line minimum along the concatenated direction.
SitpocStepResult sitpoc_update(const ControlProblem& pb,
                               const ControlTrajectory& v,
                               const StateEval& ev, const Subdivision& sub,
                               int l_max, int workers, CounterPair& counters) {
  SitpocStepResult res;
  res.cost = ev.cost;
  res.grad_norm = ev.grad_norm;

  InterfaceStates states = build_targets(ev.y, ev.p, sub);
  const int N = sub.count;
  std::vector<ControlTrajectory> tildes(N);
  std::vector<OpCounter> batch(N, OpCounter{CountMode::serial_sum});
  std::vector<std::vector<double>> rho_per(N);
  parallel_for_indexed(N, workers, [&](int n) {
    SubProblem sp =
        make_subproblem(sub, n, states.lambda(n), states.chi(n + 1));
    tildes[n] = solve_subproblem(pb, sp, slice_control(v, sp.window), l_max,
                                 batch[n], &rho_per[n]);
  });
  counters.absorb_batch(batch);
  for (int n = 0; n < N; ++n)
    res.rhos.insert(res.rhos.end(), rho_per[n].begin(), rho_per[n].end());

  ControlTrajectory v_tilde = concat_controls(tildes);
  ControlTrajectory d = lin_comb(1.0, v_tilde, -1.0, v);
  if (pb.dot_v(d, d) == 0.0) {
    res.v_next = v;
    res.converged = true;
    return res;
  }
  OpCounter hwork;
  ControlTrajectory hd = hessian_apply(pb, d, hwork);
  counters.add_serial_work(hwork.linear_solves());
  double den = pb.dot_v(hd, d);
  if (den <= 0.0) {
    // Direction numerically in the Hessian kernel; impossible for alpha > 0.
    res.v_next = v;
    res.converged = true;
    return res;
  }
  res.theta = -pb.dot_v(ev.grad, d) / den;
  res.v_next = lin_comb(1.0, v, res.theta, d);
  return res;
}

}  // namespace

SitpocStepResult sitpoc_iterate(const ControlProblem& pb,
                                const ControlTrajectory& v,
                                const Subdivision& sub, int l_max, int workers,
                                CounterPair& counters) {
  StateEval ev = evaluate_state(pb, v, counters);
  return sitpoc_update(pb, v, ev, sub, l_max, workers, counters);
}

namespace {

RunResult run_descent(const RunConfig& cfg, bool decomposed) {
  const ControlProblem& pb = cfg.problem;
  Subdivision sub =
      decomposed ? subdivide(pb.time, cfg.intervals) : Subdivision{};
  RunResult out;
  ControlTrajectory v = zero_control(pb.grid, pb.full_window());
  double threshold = cfg.tol;
  auto start = Clock::now();

  for (int k = 0;; ++k) {
    StateEval ev = evaluate_state(pb, v, out.counters);
    if (cfg.record_iterates) out.iterates.push_back(v);
    if (k == 0 && cfg.relative_tol)
      threshold = cfg.tol * std::max(1.0, ev.grad_norm);

    IterationRecord rec;
    rec.k = k;
    rec.J = ev.cost;
    rec.grad_norm = ev.grad_norm;
    rec.true_J = ev.cost;

    bool at_tol = ev.grad_norm <= threshold;
    if (at_tol || k == cfg.max_outer) {
      rec.solves_serial = out.counters.serial.linear_solves();
      rec.solves_parallel = out.counters.parallel.linear_solves();
      rec.wall_ms = elapsed_ms(start);
      out.history.push_back(rec);
      out.converged = at_tol;
      break;
    }

    double theta = 0.0;
    bool degenerate = false;
    if (decomposed) {
      SitpocStepResult step =
          sitpoc_update(pb, v, ev, sub, cfg.inner_steps, cfg.workers,
                        out.counters);
      out.rho_log.insert(out.rho_log.end(), step.rhos.begin(),
                         step.rhos.end());
      degenerate = step.converged;
      theta = step.theta;
      if (!degenerate) v = std::move(step.v_next);
    } else {
      OpCounter hwork;
      ControlTrajectory hg = hessian_apply(pb, ev.grad, hwork);
      out.counters.add_serial_work(hwork.linear_solves());
      double rho = optimal_rho(pb.grid, pb.time.dt, ev.grad, hg);
      out.rho_log.push_back(rho);
      theta = rho;
      v = lin_comb(1.0, v, -rho, ev.grad);
    }

    rec.theta = degenerate ? 0.0 : theta;
    rec.solves_serial = out.counters.serial.linear_solves();
    rec.solves_parallel = out.counters.parallel.linear_solves();
    rec.wall_ms = elapsed_ms(start);
    out.history.push_back(rec);
    if (degenerate) {
      out.converged = true;
      break;
    }
  }
  out.v = std::move(v);
  out.final_true_cost = out.history.back().J;
  return out;
}

}  // namespace

RunResult run_sitpoc(const RunConfig& cfg) { return run_descent(cfg, true); }

RunResult run_serial_baseline(const RunConfig& cfg) {
  return run_descent(cfg, false);
}

RunResult run_algorithm(const RunConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::serial: return run_serial_baseline(cfg);
    case Algorithm::sitpoc: return run_sitpoc(cfg);
    case Algorithm::pitpoc: return run_pitpoc(cfg);
  }
  throw ConfigError("run_algorithm: bad algorithm");
}

}  // namespace pintoc
