#include "pintoc/types.hpp"

#include <cmath>

namespace pintoc {

namespace {

// Node coordinate along an axis is (i+1)/(n+1); membership in the closed
// interval [1/3, 2/3] reduces to an integer test, so the mask never depends
// on rounding.
bool in_control_range(int i, int n) {
  int num = 3 * (i + 1);
  return num >= (n + 1) && num <= 2 * (n + 1);
}

}  // namespace

Grid::Grid(int nx, int ny) : nx_(nx), ny_(ny) {
  if (nx < 1 || ny < 1) throw ConfigError("Grid: interior node counts must be >= 1");
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i)
      if (in_control_range(i, nx_) && in_control_range(j, ny_))
        mask_.push_back(node_index(i, j));
  if (mask_.empty())
    throw ConfigError("Grid: control region contains no interior node");
}

TimeGrid TimeGrid::from_steps(double T, int M) {
  if (T <= 0.0 || M < 1) throw ConfigError("TimeGrid: need T > 0 and M >= 1");
  return {T, T / M, M};
}

TimeGrid TimeGrid::from_step_size(double T, double dt) {
  if (T <= 0.0 || dt <= 0.0) throw ConfigError("TimeGrid: need T > 0 and dt > 0");
  int M = static_cast<int>(std::lround(T / dt));
  if (M < 1 || std::abs(M * dt - T) > 1e-9 * T)
    throw ConfigError("TimeGrid: dt does not divide T");
  return {T, dt, M};
}

ControlTrajectory zero_control(const Grid& grid, Window window) {
  ControlTrajectory v;
  v.window = window;
  v.snapshots.assign(window.length(),
                     ControlSnapshot::Zero(grid.num_control_nodes()));
  return v;
}

ControlTrajectory slice_control(const ControlTrajectory& v, Window window) {
  if (window.begin < v.window.begin || window.end > v.window.end)
    throw ShapeError("slice_control: window not contained in trajectory");
  ControlTrajectory out;
  out.window = window;
  out.snapshots.assign(v.snapshots.begin() + (window.begin - v.window.begin),
                       v.snapshots.begin() + (window.end - v.window.begin));
  return out;
}

ControlTrajectory concat_controls(const std::vector<ControlTrajectory>& parts) {
  if (parts.empty()) throw ShapeError("concat_controls: no parts");
  ControlTrajectory out;
  out.window = {parts.front().window.begin, parts.back().window.end};
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0 && parts[i].window.begin != parts[i - 1].window.end)
      throw ShapeError("concat_controls: windows are not contiguous");
    out.snapshots.insert(out.snapshots.end(), parts[i].snapshots.begin(),
                         parts[i].snapshots.end());
  }
  return out;
}

ControlTrajectory lin_comb(double a, const ControlTrajectory& u, double b,
                           const ControlTrajectory& w) {
  if (!(u.window == w.window))
    throw ShapeError("lin_comb: window mismatch");
  ControlTrajectory out;
  out.window = u.window;
  out.snapshots.reserve(u.snapshots.size());
  for (std::size_t s = 0; s < u.snapshots.size(); ++s)
    out.snapshots.push_back(a * u.snapshots[s] + b * w.snapshots[s]);
  return out;
}

double field_dot(const Grid& grid, const Field& a, const Field& b) {
  return grid.cell_area() * a.dot(b);
}

double field_norm(const Grid& grid, const Field& f) {
  return std::sqrt(field_dot(grid, f, f));
}

double snapshot_dot(const Grid& grid, const ControlSnapshot& a,
                    const ControlSnapshot& b) {
  return grid.cell_area() * a.dot(b);
}

double snapshot_norm(const Grid& grid, const ControlSnapshot& c) {
  return std::sqrt(snapshot_dot(grid, c, c));
}

double control_dot(const Grid& grid, double dt, const ControlTrajectory& u,
                   const ControlTrajectory& w) {
  if (!(u.window == w.window))
    throw ShapeError("control_dot: window mismatch");
  double acc = 0.0;
  for (std::size_t s = 0; s < u.snapshots.size(); ++s)
    acc += u.snapshots[s].dot(w.snapshots[s]);
  return dt * grid.cell_area() * acc;
}

double control_norm(const Grid& grid, double dt, const ControlTrajectory& v) {
  return std::sqrt(control_dot(grid, dt, v, v));
}

}  // namespace pintoc
