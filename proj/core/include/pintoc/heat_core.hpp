#pragma once

#include <Eigen/SparseCholesky>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "pintoc/op_counter.hpp"
#include "pintoc/types.hpp"

namespace pintoc {

/// nu times the 5-point discrete negative Laplacian with homogeneous
/// Dirichlet closure. Symmetric positive definite. Implicit-Euler
/// factorizations of (I + dt*A) are cached per dt and shareable across
/// threads.
class DiscreteOperator {
 public:
  DiscreteOperator(const Grid& grid, double nu);

  double nu() const { return nu_; }
  const Eigen::SparseMatrix<double>& matrix() const { return A_; }
  Field apply(const Field& f) const { return A_ * f; }

  /// Solve (I + dt*A) x = rhs. One "linear solve" in the accounting model.
  Field step_solve(double dt, const Field& rhs) const;

  /// Smallest eigenvalue of A, by inverse power iteration. Cached.
  double smallest_eigenvalue() const;

 private:
  using Factorization = Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>;
  std::shared_ptr<const Factorization> stepper(double dt) const;

  double nu_;
  Eigen::SparseMatrix<double> A_;
  mutable std::mutex mutex_;
  mutable std::map<long long, std::shared_ptr<const Factorization>> cache_;
  mutable double lambda_min_ = -1.0;
};

std::shared_ptr<const DiscreteOperator> assemble_operator(const Grid& grid,
                                                          double nu);

/// Natural injection of a control snapshot into the full field (zero off the
/// control region).
Field inject(const Grid& grid, const ControlSnapshot& c);

/// Exact adjoint of inject under the discrete inner products: restriction of
/// a field to the control-region nodes.
ControlSnapshot restrict_control(const Grid& grid, const Field& f);

/// Implicit Euler y^{s+1} = (I + dt*A)^{-1} (y^s + dt*B v_s) over the given
/// window. Returns length+1 fields; result[s] sits at fine index
/// window.begin+s. Counts one linear solve per step.
std::vector<Field> forward_solve(const DiscreteOperator& op, const Grid& grid,
                                 double dt, const Field& y_init,
                                 const ControlTrajectory& v, Window window,
                                 OpCounter& counter);

/// Uncontrolled forward propagation over `steps` steps.
std::vector<Field> forward_solve_free(const DiscreteOperator& op, double dt,
                                      const Field& y_init, int steps,
                                      OpCounter& counter);

/// Backward implicit Euler p^s = (I + dt*A)^{-1} p^{s+1}, the exact discrete
/// adjoint of the forward scheme. Homogeneous: no control dependence.
/// result[s] sits at fine index window.begin+s.
std::vector<Field> backward_solve(const DiscreteOperator& op, double dt,
                                  const Field& p_final, Window window,
                                  OpCounter& counter);

}  // namespace pintoc
