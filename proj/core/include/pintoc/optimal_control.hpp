#pragma once

#include <memory>

#include "pintoc/heat_core.hpp"
#include "pintoc/op_counter.hpp"
#include "pintoc/types.hpp"

namespace pintoc {

/// The linear-quadratic control problem: steer the heat equation from y0
/// toward y_target at time T, with Tikhonov weight alpha on the control.
struct ControlProblem {
  ControlProblem(Grid grid, TimeGrid time, double alpha, double nu, Field y0,
                 Field y_target);

  Grid grid;
  TimeGrid time;
  double alpha;
  double nu;
  Field y0;
  Field y_target;
  std::shared_ptr<const DiscreteOperator> op;

  Window full_window() const { return {0, time.M}; }
  double dot_v(const ControlTrajectory& u, const ControlTrajectory& w) const {
    return control_dot(grid, time.dt, u, w);
  }
  double norm_v(const ControlTrajectory& v) const {
    return control_norm(grid, time.dt, v);
  }
};

/// Two-sided spectral bounds on the control Hessian.
struct HessianBounds {
  double alpha_lower;      // coercivity constant
  double beta_upper;       // alpha + C^2/(2 nu), C the discrete Poincare constant
  double poincare_const;   // C = 1/sqrt(lambda_min(-Laplacian_h))
  double beta_closed_form;  // alpha + C/sqrt(2), reported for reference only
};

/// J(v) = 1/2 ||y(T)-y_target||^2 + alpha/2 ||v||_v^2.
double evaluate_cost(const ControlProblem& pb, const ControlTrajectory& v,
                     OpCounter& counter);

/// Exact discrete gradient: alpha*v + B*p, with p the backward adjoint from
/// p(T) = y(T) - y_target.
ControlTrajectory gradient(const ControlProblem& pb, const ControlTrajectory& v,
                           OpCounter& counter);

/// Hessian-vector product HJ(dv) = alpha*dv + B*dp, dy propagated from zero.
/// J is quadratic so this operator is constant in v.
ControlTrajectory hessian_apply(const ControlProblem& pb,
                                const ControlTrajectory& dv,
                                OpCounter& counter);

/// Exact minimizer of J((1-theta) v + theta v_tilde):
/// theta = -<grad J(v), d> / <HJ d, d>, d = v_tilde - v.
/// Throws NumericError when the direction is degenerate (d = 0).
double optimal_theta(const ControlProblem& pb, const ControlTrajectory& v,
                     const ControlTrajectory& v_tilde, OpCounter& counter);

/// Locally optimal gradient step rho = ||g||^2 / <H g, g>.
double optimal_rho(const Grid& grid, double dt, const ControlTrajectory& g,
                   const ControlTrajectory& h_of_g);

/// Spectral bounds on HJ from the discrete operator: [alpha, alpha+C^2/(2nu)].
HessianBounds hessian_bounds(const ControlProblem& pb);

}  // namespace pintoc
