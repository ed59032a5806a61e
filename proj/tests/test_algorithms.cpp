#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pintoc/algorithms.hpp"
#include "pintoc/oracle.hpp"
#include "test_helpers.hpp"

using namespace pintoc;
using namespace pintoc::testing;

TEST_CASE("algorithm names round trip") {
  for (auto a : {Algorithm::serial, Algorithm::sitpoc, Algorithm::pitpoc})
    CHECK(algorithm_from_string(to_string(a)) == a);
  CHECK_THROWS_AS(algorithm_from_string("newton"), ConfigError);
}

TEST_CASE("sitpoc iterate never increases the cost") {
  auto pb = desk_problem(3, 16);
  auto sub = subdivide(pb.time, 4);
  auto v = zero_control(pb.grid, pb.full_window());
  CounterPair counters;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 25; ++k) {
    auto step = sitpoc_iterate(pb, v, sub, 2, 4, counters);
    CHECK(step.cost <= prev * (1.0 + 1e-14));
    prev = step.cost;
    if (step.converged) break;
    v = step.v_next;
  }
}

TEST_CASE("sitpoc at the optimum is a fixed point") {
  auto pb = desk_problem(3, 8);
  auto sol = solve_kkt_dense(pb);
  auto sub = subdivide(pb.time, 4);
  CounterPair counters;
  auto step = sitpoc_iterate(pb, sol.v, sub, 5, 2, counters);
  if (!step.converged) {
    CHECK(pb.norm_v(lin_comb(1.0, step.v_next, -1.0, sol.v)) <=
          1e-7 * std::max(1.0, pb.norm_v(sol.v)));
  }
}

TEST_CASE("sitpoc with N = 1, l_max = 1 equals the serial baseline") {
  RunConfig cfg{desk_problem(3, 16)};
  cfg.intervals = 1;
  cfg.inner_steps = 1;
  cfg.max_outer = 30;
  cfg.tol = 1e-10;
  cfg.algorithm = Algorithm::sitpoc;
  auto a = run_sitpoc(cfg);
  cfg.algorithm = Algorithm::serial;
  auto b = run_serial_baseline(cfg);
  REQUIRE(a.history.size() == b.history.size());
  for (size_t k = 0; k < a.history.size(); ++k) {
    double scale = std::max(1.0, std::abs(b.history[k].J));
    CHECK(std::abs(a.history[k].J - b.history[k].J) <= 1e-12 * scale);
    CHECK(std::abs(a.history[k].grad_norm - b.history[k].grad_norm) <= 1e-10);
  }
  const auto& pb = cfg.problem;
  CHECK(pb.norm_v(lin_comb(1.0, a.v, -1.0, b.v)) <=
        1e-10 * std::max(1.0, pb.norm_v(b.v)));
}

TEST_CASE("free-evolution target converges immediately from v = 0") {
  Grid g(3, 3);
  TimeGrid t = TimeGrid::from_steps(0.8, 8);
  std::mt19937_64 rng(3);
  Field y0 = random_field(g, rng);
  auto op = assemble_operator(g, 1e-2);
  OpCounter c;
  Field yT = forward_solve_free(*op, t.dt, y0, t.M, c).back();
  RunConfig cfg{ControlProblem(g, t, 1e-2, 1e-2, y0, yT)};
  cfg.intervals = 4;
  cfg.relative_tol = false;
  cfg.tol = 1e-9;
  auto res = run_sitpoc(cfg);
  CHECK(res.converged);
  CHECK(res.history.size() == 1);
  CHECK(cfg.problem.norm_v(res.v) == 0.0);
}

TEST_CASE("sitpoc reaches the dense optimum for N in {1, 2, 4}") {
  auto pb = desk_problem(3, 16);
  auto sol = solve_kkt_dense(pb);
  for (int N : {1, 2, 4}) {
    RunConfig cfg{pb};
    cfg.intervals = N;
    cfg.inner_steps = 2;
    cfg.max_outer = 800;
    cfg.tol = 1e-11;
    cfg.workers = 2;
    auto res = run_sitpoc(cfg);
    CHECK(res.converged);
    CHECK(pb.norm_v(lin_comb(1.0, res.v, -1.0, sol.v)) <=
          1e-5 * std::max(1.0, pb.norm_v(sol.v)));
    CHECK(res.final_true_cost ==
          doctest::Approx(sol.cost).epsilon(1e-6));
  }
}

TEST_CASE("serial baseline reaches the dense optimum") {
  auto pb = desk_problem(3, 16);
  auto sol = solve_kkt_dense(pb);
  RunConfig cfg{pb};
  cfg.algorithm = Algorithm::serial;
  cfg.max_outer = 2000;
  cfg.tol = 1e-11;
  auto res = run_serial_baseline(cfg);
  CHECK(res.converged);
  CHECK(pb.norm_v(lin_comb(1.0, res.v, -1.0, sol.v)) <=
        1e-5 * std::max(1.0, pb.norm_v(sol.v)));
}

TEST_CASE("history bookkeeping: monotone J, counters, rho bracket") {
  auto pb = desk_problem(3, 16);
  RunConfig cfg{pb};
  cfg.intervals = 4;
  cfg.inner_steps = 3;
  cfg.max_outer = 40;
  cfg.tol = 1e-9;
  auto res = run_sitpoc(cfg);
  REQUIRE(res.history.size() >= 2);
  auto bounds = hessian_bounds(pb);
  for (size_t k = 0; k < res.history.size(); ++k) {
    const auto& row = res.history[k];
    CHECK(row.k == static_cast<int>(k));
    if (k > 0) {
      CHECK(row.J <= res.history[k - 1].J * (1.0 + 1e-14));
      CHECK(row.solves_serial >= res.history[k - 1].solves_serial);
      CHECK(row.solves_parallel >= res.history[k - 1].solves_parallel);
    }
    CHECK(row.solves_parallel <= row.solves_serial);
  }
  CHECK(!res.rho_log.empty());
  for (double rho : res.rho_log) {
    CHECK(rho >= 1.0 / bounds.beta_upper * (1.0 - 1e-12));
    CHECK(rho <= 1.0 / bounds.alpha_lower * (1.0 + 1e-12));
  }
  CHECK(res.counters.parallel.linear_solves() <=
        res.counters.serial.linear_solves());
}

TEST_CASE("worker count does not change the result bitwise") {
  auto pb = desk_problem(3, 16);
  RunResult runs[2];
  int workers[2] = {1, 4};
  for (int i = 0; i < 2; ++i) {
    RunConfig cfg{pb};
    cfg.intervals = 4;
    cfg.inner_steps = 2;
    cfg.max_outer = 20;
    cfg.tol = 1e-10;
    cfg.workers = workers[i];
    runs[i] = run_sitpoc(cfg);
  }
  REQUIRE(runs[0].history.size() == runs[1].history.size());
  for (size_t k = 0; k < runs[0].history.size(); ++k) {
    CHECK(runs[0].history[k].J == runs[1].history[k].J);
    CHECK(runs[0].history[k].grad_norm == runs[1].history[k].grad_norm);
    CHECK(runs[0].history[k].theta == runs[1].history[k].theta);
  }
  for (int s = 0; s < pb.time.M; ++s)
    CHECK((runs[0].v.snapshots[s] - runs[1].v.snapshots[s]).norm() == 0.0);
}

TEST_CASE("run_algorithm dispatches on the configured algorithm") {
  auto pb = desk_problem(3, 8);
  RunConfig cfg{pb};
  cfg.max_outer = 3;
  cfg.algorithm = Algorithm::serial;
  auto s = run_algorithm(cfg);
  cfg.algorithm = Algorithm::sitpoc;
  cfg.intervals = 2;
  auto t = run_algorithm(cfg);
  CHECK(!s.history.empty());
  CHECK(!t.history.empty());
}
