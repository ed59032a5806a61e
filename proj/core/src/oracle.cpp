#include "pintoc/oracle.hpp"

#include <Eigen/Dense>

namespace pintoc {

namespace {

// Columns of the map v -> y(end) with zero initial value: column (s, j) is
// dt * K^{L-s} B e_j, built by repeated back-substitution per control node.
Eigen::MatrixXd assemble_propagation(const ControlProblem& pb, int L,
                                     bool reverse) {
  const Grid& g = pb.grid;
  const int nc = g.num_control_nodes();
  const int nG = g.num_nodes();
  Eigen::MatrixXd S(nG, static_cast<long>(nc) * L);
  for (int jj = 0; jj < nc; ++jj) {
    int j = reverse ? nc - 1 - jj : jj;
    ControlSnapshot e = ControlSnapshot::Zero(nc);
    e[j] = 1.0;
    Field col = pb.time.dt * inject(g, e);
    for (int exp = 1; exp <= L; ++exp) {
      col = pb.op->step_solve(pb.time.dt, col);
      int s = L - exp;  // snapshot index this power corresponds to
      S.col(static_cast<long>(s) * nc + j) = col;
    }
  }
  return S;
}

}  // namespace

ControlTrajectory dense_optimal_control(const ControlProblem& pb, Window window,
                                        const Field& y_start,
                                        const Field& target,
                                        bool reverse_assembly) {
  const Grid& g = pb.grid;
  const int L = window.length();
  const int nc = g.num_control_nodes();
  const long dim = static_cast<long>(nc) * L;
  if (dim > kDenseKktMaxUnknowns)
    throw ConfigError("dense_optimal_control: instance too large for the "
                      "dense oracle (" +
                      std::to_string(dim) + " unknowns)");

  Eigen::MatrixXd S = assemble_propagation(pb, L, reverse_assembly);

  OpCounter scratch;
  Field y_free =
      forward_solve_free(*pb.op, pb.time.dt, y_start, L, scratch).back();
  Field b = y_free - target;

  // Stationarity of 1/2|S u + b|^2 + (alpha dt / 2)|u|^2; the cell-area
  // weight is common to both terms and cancels.
  Eigen::MatrixXd H = S.transpose() * S;
  H.diagonal().array() += pb.alpha * pb.time.dt;
  Eigen::VectorXd u = Eigen::LDLT<Eigen::MatrixXd>(H).solve(-S.transpose() * b);

  ControlTrajectory v;
  v.window = window;
  v.snapshots.reserve(L);
  for (int s = 0; s < L; ++s)
    v.snapshots.push_back(u.segment(static_cast<long>(s) * nc, nc));
  return v;
}

KktSolution solve_kkt_dense(const ControlProblem& pb, bool reverse_assembly) {
  KktSolution sol;
  sol.v = dense_optimal_control(pb, pb.full_window(), pb.y0, pb.y_target,
                                reverse_assembly);
  OpCounter scratch;
  sol.y = forward_solve(*pb.op, pb.grid, pb.time.dt, pb.y0, sol.v,
                        pb.full_window(), scratch);
  sol.p = backward_solve(*pb.op, pb.time.dt,
                         Field(sol.y.back() - pb.y_target), pb.full_window(),
                         scratch);
  Field mismatch = sol.y.back() - pb.y_target;
  double nv = pb.norm_v(sol.v);
  sol.cost =
      0.5 * field_dot(pb.grid, mismatch, mismatch) + 0.5 * pb.alpha * nv * nv;

  // Self-consistency through the independent adjoint path.
  ControlTrajectory res;
  res.window = sol.v.window;
  for (std::size_t s = 0; s < sol.v.snapshots.size(); ++s)
    res.snapshots.push_back(pb.alpha * sol.v.snapshots[s] +
                            restrict_control(pb.grid, sol.p[s]));
  double rel = control_norm(pb.grid, pb.time.dt, res) /
               std::max(1.0, control_norm(pb.grid, pb.time.dt, sol.v));
  if (rel > 1e-10)
    throw NumericError("solve_kkt_dense: stationarity residual " +
                       std::to_string(rel));
  return sol;
}

ControlTrajectory solve_local_kkt(const ControlProblem& pb,
                                  const SubProblem& sp) {
  return dense_optimal_control(pb, sp.window, sp.y_start, sp.chi_end);
}

}  // namespace pintoc
