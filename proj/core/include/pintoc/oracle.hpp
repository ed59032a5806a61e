#pragma once

#include "pintoc/time_decomposition.hpp"

namespace pintoc {

/// Brute-force reference solution of the discrete optimality system on tiny
/// instances: the map v -> y(end) is assembled column by column from unit
/// impulses and the dense normal equations are solved directly.
struct KktSolution {
  ControlTrajectory v;
  std::vector<Field> y;  // optimal state trajectory over the window
  std::vector<Field> p;  // optimal adjoint trajectory over the window
  double cost = 0.0;
};

/// Hard cap on control unknowns (control nodes x window steps).
inline constexpr int kDenseKktMaxUnknowns = 5000;

/// Dense solve of the window problem: start at y_start, target at the end.
/// reverse_assembly changes only the impulse ordering used to build the
/// propagation columns.
ControlTrajectory dense_optimal_control(const ControlProblem& pb, Window window,
                                        const Field& y_start,
                                        const Field& target,
                                        bool reverse_assembly = false);

/// Global problem over [0,T]. Verifies the stationarity residual of the
/// returned control before handing it back.
KktSolution solve_kkt_dense(const ControlProblem& pb,
                            bool reverse_assembly = false);

/// Sub-problem restricted to one interval.
ControlTrajectory solve_local_kkt(const ControlProblem& pb,
                                  const SubProblem& sp);

}  // namespace pintoc
