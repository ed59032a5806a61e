#include "pintoc/optimal_control.hpp"

#include <cmath>

namespace pintoc {

ControlProblem::ControlProblem(Grid grid_, TimeGrid time_, double alpha_,
                               double nu_, Field y0_, Field y_target_)
    : grid(std::move(grid_)),
      time(time_),
      alpha(alpha_),
      nu(nu_),
      y0(std::move(y0_)),
      y_target(std::move(y_target_)) {
  if (alpha <= 0.0) throw ConfigError("ControlProblem: alpha must be > 0");
  if (nu <= 0.0) throw ConfigError("ControlProblem: nu must be > 0");
  if (y0.size() != grid.num_nodes() || y_target.size() != grid.num_nodes())
    throw ShapeError("ControlProblem: y0/y_target size does not match grid");
  op = assemble_operator(grid, nu);
}

double evaluate_cost(const ControlProblem& pb, const ControlTrajectory& v,
                     OpCounter& counter) {
  auto y = forward_solve(*pb.op, pb.grid, pb.time.dt, pb.y0, v,
                         pb.full_window(), counter);
  Field mismatch = y.back() - pb.y_target;
  double nv = pb.norm_v(v);
  return 0.5 * field_dot(pb.grid, mismatch, mismatch) +
         0.5 * pb.alpha * nv * nv;
}

namespace {

// alpha*v_s + B* p[s]; p indexed relative to the window, entry s at the step's
// start. Shared by the global and the local gradients.
ControlTrajectory adjoint_gradient(const Grid& grid, double alpha,
                                   const ControlTrajectory& v,
                                   const std::vector<Field>& p) {
  ControlTrajectory g;
  g.window = v.window;
  g.snapshots.reserve(v.snapshots.size());
  for (std::size_t s = 0; s < v.snapshots.size(); ++s)
    g.snapshots.push_back(alpha * v.snapshots[s] +
                          restrict_control(grid, p[s]));
  return g;
}

}  // namespace

ControlTrajectory gradient(const ControlProblem& pb, const ControlTrajectory& v,
                           OpCounter& counter) {
  auto y = forward_solve(*pb.op, pb.grid, pb.time.dt, pb.y0, v,
                         pb.full_window(), counter);
  auto p = backward_solve(*pb.op, pb.time.dt, Field(y.back() - pb.y_target),
                          pb.full_window(), counter);
  return adjoint_gradient(pb.grid, pb.alpha, v, p);
}

ControlTrajectory hessian_apply(const ControlProblem& pb,
                                const ControlTrajectory& dv,
                                OpCounter& counter) {
  Field zero = Field::Zero(pb.grid.num_nodes());
  auto dy = forward_solve(*pb.op, pb.grid, pb.time.dt, zero, dv,
                          pb.full_window(), counter);
  auto dp =
      backward_solve(*pb.op, pb.time.dt, dy.back(), pb.full_window(), counter);
  return adjoint_gradient(pb.grid, pb.alpha, dv, dp);
}

double optimal_theta(const ControlProblem& pb, const ControlTrajectory& v,
                     const ControlTrajectory& v_tilde, OpCounter& counter) {
  ControlTrajectory d = lin_comb(1.0, v_tilde, -1.0, v);
  double dn2 = pb.dot_v(d, d);
  if (dn2 == 0.0)
    throw NumericError("optimal_theta: degenerate direction (v_tilde == v)");
  ControlTrajectory g = gradient(pb, v, counter);
  ControlTrajectory hd = hessian_apply(pb, d, counter);
  double den = pb.dot_v(hd, d);
  if (den <= 0.0)
    throw NumericError("optimal_theta: non-positive curvature along direction");
  return -pb.dot_v(g, d) / den;
}

double optimal_rho(const Grid& grid, double dt, const ControlTrajectory& g,
                   const ControlTrajectory& h_of_g) {
  double gn2 = control_dot(grid, dt, g, g);
  if (gn2 == 0.0) throw NumericError("optimal_rho: zero gradient");
  double den = control_dot(grid, dt, h_of_g, g);
  if (den <= 0.0) throw NumericError("optimal_rho: non-positive curvature");
  return gn2 / den;
}

HessianBounds hessian_bounds(const ControlProblem& pb) {
  // lambda_min of the plain negative Laplacian; the operator carries nu.
  double lam = pb.op->smallest_eigenvalue() / pb.nu;
  double C = 1.0 / std::sqrt(lam);
  HessianBounds b;
  b.alpha_lower = pb.alpha;
  b.poincare_const = C;
  b.beta_upper = pb.alpha + C * C / (2.0 * pb.nu);
  b.beta_closed_form = pb.alpha + C / std::sqrt(2.0);
  return b;
}

}  // namespace pintoc
