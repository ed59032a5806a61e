#include "pintoc/heat_core.hpp"

#include <bit>
#include <cmath>

namespace pintoc {

DiscreteOperator::DiscreteOperator(const Grid& grid, double nu) : nu_(nu) {
  if (nu <= 0.0) throw ConfigError("DiscreteOperator: diffusivity must be > 0");
  const int nx = grid.nx(), ny = grid.ny();
  const double cx = nu / (grid.hx() * grid.hx());
  const double cy = nu / (grid.hy() * grid.hy());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(5) * grid.num_nodes());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      int row = grid.node_index(i, j);
      trip.emplace_back(row, row, 2.0 * cx + 2.0 * cy);
      if (i > 0) trip.emplace_back(row, grid.node_index(i - 1, j), -cx);
      if (i < nx - 1) trip.emplace_back(row, grid.node_index(i + 1, j), -cx);
      if (j > 0) trip.emplace_back(row, grid.node_index(i, j - 1), -cy);
      if (j < ny - 1) trip.emplace_back(row, grid.node_index(i, j + 1), -cy);
    }
  }
  A_.resize(grid.num_nodes(), grid.num_nodes());
  A_.setFromTriplets(trip.begin(), trip.end());
  A_.makeCompressed();
}

std::shared_ptr<const DiscreteOperator::Factorization>
DiscreteOperator::stepper(double dt) const {
  const long long key = std::bit_cast<long long>(dt);
  std::lock_guard lock(mutex_);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  Eigen::SparseMatrix<double> system(A_.rows(), A_.cols());
  system.setIdentity();
  system += dt * A_;
  auto fact = std::make_shared<Factorization>();
  fact->compute(system);
  if (fact->info() != Eigen::Success)
    throw NumericError("DiscreteOperator: implicit-Euler factorization failed");
  cache_.emplace(key, fact);
  return fact;
}

Field DiscreteOperator::step_solve(double dt, const Field& rhs) const {
  auto fact = stepper(dt);
  Field x = fact->solve(rhs);
  if (!x.allFinite())
    throw NumericError("DiscreteOperator: non-finite linear solve result");
  return x;
}

double DiscreteOperator::smallest_eigenvalue() const {
  {
    std::lock_guard lock(mutex_);
    if (lambda_min_ > 0.0) return lambda_min_;
  }
  Factorization llt;
  llt.compute(A_);
  if (llt.info() != Eigen::Success)
    throw NumericError("DiscreteOperator: factorization of A failed");
  Field x = Field::Ones(A_.rows());
  x.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 20000; ++it) {
    Field y = llt.solve(x);
    y.normalize();
    double next = y.dot(A_ * y);
    if (std::abs(next - lambda) <= 1e-13 * std::abs(next) && it > 2) {
      lambda = next;
      break;
    }
    lambda = next;
    x = std::move(y);
  }
  std::lock_guard lock(mutex_);
  lambda_min_ = lambda;
  return lambda_min_;
}

std::shared_ptr<const DiscreteOperator> assemble_operator(const Grid& grid,
                                                          double nu) {
  return std::make_shared<const DiscreteOperator>(grid, nu);
}

Field inject(const Grid& grid, const ControlSnapshot& c) {
  if (c.size() != grid.num_control_nodes())
    throw ShapeError("inject: snapshot size does not match control mask");
  Field f = Field::Zero(grid.num_nodes());
  const auto& mask = grid.control_mask();
  for (std::size_t k = 0; k < mask.size(); ++k) f[mask[k]] = c[k];
  return f;
}

ControlSnapshot restrict_control(const Grid& grid, const Field& f) {
  if (f.size() != grid.num_nodes())
    throw ShapeError("restrict_control: field size does not match grid");
  const auto& mask = grid.control_mask();
  ControlSnapshot c(mask.size());
  for (std::size_t k = 0; k < mask.size(); ++k) c[k] = f[mask[k]];
  return c;
}

std::vector<Field> forward_solve(const DiscreteOperator& op, const Grid& grid,
                                 double dt, const Field& y_init,
                                 const ControlTrajectory& v, Window window,
                                 OpCounter& counter) {
  if (!(v.window == window))
    throw ShapeError("forward_solve: control window mismatch");
  if (y_init.size() != grid.num_nodes())
    throw ShapeError("forward_solve: initial state size mismatch");
  std::vector<Field> traj;
  traj.reserve(window.length() + 1);
  traj.push_back(y_init);
  for (int s = 0; s < window.length(); ++s) {
    Field rhs = traj.back() + dt * inject(grid, v.snapshots[s]);
    traj.push_back(op.step_solve(dt, rhs));
    counter.add(1);
  }
  return traj;
}

std::vector<Field> forward_solve_free(const DiscreteOperator& op, double dt,
                                      const Field& y_init, int steps,
                                      OpCounter& counter) {
  std::vector<Field> traj;
  traj.reserve(steps + 1);
  traj.push_back(y_init);
  for (int s = 0; s < steps; ++s) {
    traj.push_back(op.step_solve(dt, traj.back()));
    counter.add(1);
  }
  return traj;
}

std::vector<Field> backward_solve(const DiscreteOperator& op, double dt,
                                  const Field& p_final, Window window,
                                  OpCounter& counter) {
  const int L = window.length();
  std::vector<Field> traj(L + 1);
  traj[L] = p_final;
  for (int s = L - 1; s >= 0; --s) {
    traj[s] = op.step_solve(dt, traj[s + 1]);
    counter.add(1);
  }
  return traj;
}

}  // namespace pintoc
