#include "pintoc/diagnostics.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "pintoc/oracle.hpp"

namespace pintoc {

HypothesisReport check_hypotheses(const ControlProblem& pb,
                                  const RunResult& result,
                                  std::optional<double> J_star,
                                  double beta_emp) {
  if (result.iterates.size() < 2)
    throw ConfigError("check_hypotheses: need at least 2 recorded iterates");
  HypothesisReport rep;
  rep.eta_bound = beta_emp * beta_emp / pb.alpha;
  rep.rate_bound =
      1.0 - 2.0 * pb.alpha * pb.alpha / (rep.eta_bound * rep.eta_bound);

  OpCounter scratch;
  std::vector<double> sqrt_gaps;
  for (std::size_t k = 0; k + 1 < result.iterates.size(); ++k) {
    const ControlTrajectory& vk = result.iterates[k];
    const ControlTrajectory& vk1 = result.iterates[k + 1];
    ControlTrajectory step = lin_comb(1.0, vk1, -1.0, vk);
    ControlTrajectory g = gradient(pb, vk, scratch);
    double J = evaluate_cost(pb, vk, scratch);

    HypothesisRow row;
    row.k = static_cast<int>(k);
    row.cost = J;
    row.step_norm = pb.norm_v(step);
    row.descent_inner = pb.dot_v(g, step);
    double gn = pb.norm_v(g);
    row.eta_ratio = row.step_norm > 0.0
                        ? gn / row.step_norm
                        : std::numeric_limits<double>::infinity();
    rep.rows.push_back(row);

    double scale = std::max(1.0, gn * row.step_norm);
    if (row.descent_inner > 1e-12 * scale) rep.descent_ok = false;
    if (row.step_norm > 0.0 && row.eta_ratio > rep.eta_bound * (1.0 + 1e-9))
      rep.eta_ok = false;

    if (J_star) {
      double gap = J - *J_star;
      if (gap <= 1e-14 * std::max(1.0, std::abs(*J_star)))
        rep.finite_termination = true;  // eq0 violated: optimum hit exactly
      sqrt_gaps.push_back(gap > 0.0 ? std::sqrt(gap) : 0.0);
    }
  }

  if (J_star) {
    auto rate = fit_linear_rate(sqrt_gaps, 2, 6);
    if (rate) {
      rep.fitted_rate = *rate;
      rep.rate_fit_valid = true;
    }
  }
  return rep;
}

std::optional<double> fit_linear_rate(const std::vector<double>& values,
                                      int skip, int min_points) {
  std::vector<double> logs;
  for (std::size_t i = skip; i < values.size(); ++i) {
    if (values[i] <= 0.0) break;  // reached the optimum; stop the fit there
    logs.push_back(std::log(values[i]));
  }
  if (static_cast<int>(logs.size()) < min_points) return std::nullopt;
  // Least-squares slope of log(value) against iteration index.
  double n = static_cast<double>(logs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    double x = static_cast<double>(i);
    sx += x;
    sy += logs[i];
    sxx += x * x;
    sxy += x * logs[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return std::exp(slope);
}

ControlTrajectory random_control(const ControlProblem& pb, Window window,
                                 std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> dist(0.0, scale);
  ControlTrajectory v = zero_control(pb.grid, window);
  for (auto& snap : v.snapshots)
    for (int i = 0; i < snap.size(); ++i) snap[i] = dist(rng);
  return v;
}

ControlTrajectory high_frequency_probe(const ControlProblem& pb) {
  ControlTrajectory v = zero_control(pb.grid, pb.full_window());
  double sign = 1.0;
  for (auto& snap : v.snapshots) {
    snap.setConstant(sign);
    sign = -sign;
  }
  return v;
}

namespace {

double rayleigh_quotient(const ControlProblem& pb, const ControlTrajectory& dv,
                         OpCounter& counter) {
  ControlTrajectory h = hessian_apply(pb, dv, counter);
  return pb.dot_v(h, dv) / pb.dot_v(dv, dv);
}

}  // namespace

double estimate_beta(const ControlProblem& pb, int probes, unsigned seed) {
  if (probes < 10) throw ConfigError("estimate_beta: need at least 10 probes");
  std::mt19937_64 rng(seed);
  OpCounter scratch;
  double beta = 0.0;
  for (int i = 0; i < probes; ++i) {
    ControlTrajectory dv = random_control(pb, pb.full_window(), rng);
    beta = std::max(beta, rayleigh_quotient(pb, dv, scratch));
  }
  // Structured probes: time-constant controls carry the most mass to the
  // terminal term and tighten the empirical maximum.
  ControlTrajectory flat = zero_control(pb.grid, pb.full_window());
  for (auto& snap : flat.snapshots) snap.setOnes();
  beta = std::max(beta, rayleigh_quotient(pb, flat, scratch));
  for (int j = 0; j < pb.grid.num_control_nodes(); ++j) {
    ControlTrajectory e = zero_control(pb.grid, pb.full_window());
    for (auto& snap : e.snapshots) snap[j] = 1.0;
    beta = std::max(beta, rayleigh_quotient(pb, e, scratch));
  }
  return beta;
}

double exact_beta(const ControlProblem& pb) {
  const int nc = pb.grid.num_control_nodes();
  const int M = pb.time.M;
  const long dim = static_cast<long>(nc) * M;
  if (dim > kDenseKktMaxUnknowns)
    throw ConfigError("exact_beta: instance too large for the dense Hessian");
  // The coordinate weights (dt * cell area) are uniform, so the coordinate
  // matrix of HJ is symmetric and shares the operator's spectrum.
  Eigen::MatrixXd H(dim, dim);
  OpCounter scratch;
  for (int s = 0; s < M; ++s) {
    for (int j = 0; j < nc; ++j) {
      ControlTrajectory e = zero_control(pb.grid, pb.full_window());
      e.snapshots[s][j] = 1.0;
      ControlTrajectory col = hessian_apply(pb, e, scratch);
      for (int t = 0; t < M; ++t)
        H.block(static_cast<long>(t) * nc, static_cast<long>(s) * nc + j, nc,
                1) = col.snapshots[t];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (H + H.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace pintoc
