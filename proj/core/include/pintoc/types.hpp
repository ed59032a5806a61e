#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace pintoc {

/// Spatial state/adjoint vector on the interior nodes of the unit square,
/// homogeneous Dirichlet boundary implied. Lexicographic node order,
/// index = j*nx + i.
using Field = Eigen::VectorXd;

/// Control values on the control-region nodes, in control_mask order.
using ControlSnapshot = Eigen::VectorXd;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Uniform interior grid of [0,1]^2. The control region is the closed square
/// [1/3,2/3]^2; membership is decided in integer arithmetic so nodes on the
/// region boundary are always included.
class Grid {
 public:
  Grid(int nx, int ny);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double hx() const { return 1.0 / (nx_ + 1); }
  double hy() const { return 1.0 / (ny_ + 1); }
  double cell_area() const { return hx() * hy(); }
  int num_nodes() const { return nx_ * ny_; }
  int node_index(int i, int j) const { return j * nx_ + i; }

  /// Sorted interior node indices lying in the control region.
  const std::vector<int>& control_mask() const { return mask_; }
  int num_control_nodes() const { return static_cast<int>(mask_.size()); }

 private:
  int nx_, ny_;
  std::vector<int> mask_;
};

/// Uniform fine time grid with M steps of size dt covering [0,T].
struct TimeGrid {
  double T = 0.0;
  double dt = 0.0;
  int M = 0;

  static TimeGrid from_steps(double T, int M);
  static TimeGrid from_step_size(double T, double dt);
};

/// Half-open range [begin, end) of fine time steps.
struct Window {
  int begin = 0;
  int end = 0;
  int length() const { return end - begin; }
  bool operator==(const Window&) const = default;
};

/// Time-indexed control snapshots over a window of the fine grid.
/// snapshots[s] is the control applied during fine step window.begin+s.
struct ControlTrajectory {
  Window window;
  std::vector<ControlSnapshot> snapshots;
  int length() const { return window.length(); }
};

ControlTrajectory zero_control(const Grid& grid, Window window);
ControlTrajectory slice_control(const ControlTrajectory& v, Window window);
ControlTrajectory concat_controls(const std::vector<ControlTrajectory>& parts);
/// a*u + b*w over a common window.
ControlTrajectory lin_comb(double a, const ControlTrajectory& u, double b,
                           const ControlTrajectory& w);

// Discrete L^2 inner products. Field: cell_area-weighted Euclidean; control
// trajectories additionally carry the dt weight.
double field_dot(const Grid& grid, const Field& a, const Field& b);
double field_norm(const Grid& grid, const Field& f);
double snapshot_dot(const Grid& grid, const ControlSnapshot& a,
                    const ControlSnapshot& b);
double snapshot_norm(const Grid& grid, const ControlSnapshot& c);
double control_dot(const Grid& grid, double dt, const ControlTrajectory& u,
                   const ControlTrajectory& w);
double control_norm(const Grid& grid, double dt, const ControlTrajectory& v);

}  // namespace pintoc
