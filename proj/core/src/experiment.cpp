#include "pintoc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pintoc/diagnostics.hpp"
#include "pintoc/oracle.hpp"
#include "pintoc/parareal.hpp"

namespace pintoc {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, int line) {
  std::size_t pos = 0;
  double x;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    parse_fail(line, "not a number: '" + v + "'");
  }
  if (pos != v.size()) parse_fail(line, "trailing characters in '" + v + "'");
  return x;
}

int to_int(const std::string& v, int line) {
  std::size_t pos = 0;
  long x;
  try {
    x = std::stol(v, &pos);
  } catch (const std::exception&) {
    parse_fail(line, "not an integer: '" + v + "'");
  }
  if (pos != v.size()) parse_fail(line, "trailing characters in '" + v + "'");
  return static_cast<int>(x);
}

std::vector<int> to_int_list(const std::string& v, int line) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_int(trim(item), line));
  if (out.empty()) parse_fail(line, "empty list");
  return out;
}

bool to_bool(const std::string& v, int line) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  parse_fail(line, "expected on/off: '" + v + "'");
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(xs[i]);
  }
  return out;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.alpha <= 0 || cfg.nu <= 0) throw ConfigError("alpha and nu must be > 0");
  if (cfg.nx < 1 || cfg.ny < 1) throw ConfigError("grid sizes must be >= 1");
  if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
  if (cfg.max_outer < 0) throw ConfigError("max_outer must be >= 0");
  if (cfg.tol <= 0) throw ConfigError("tol must be > 0");
  if (cfg.coarse_steps < 1) throw ConfigError("coarse_steps must be >= 1");
  TimeGrid time = TimeGrid::from_step_size(cfg.T, cfg.dt);
  for (int N : cfg.intervals) {
    if (N < 1) throw ConfigError("interval counts must be >= 1");
    if (time.M % N != 0)
      throw ConfigError("step count " + std::to_string(time.M) +
                        " not divisible by N = " + std::to_string(N));
    if ((time.M / N) % cfg.coarse_steps != 0)
      throw ConfigError("coarse_steps must divide the per-interval step count");
  }
  for (int l : cfg.inner_steps)
    if (l < 1) throw ConfigError("inner step counts must be >= 1");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    std::string line = trim(raw);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) parse_fail(lineno, "expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (val.empty()) parse_fail(lineno, "missing value for '" + key + "'");

    if (key == "alpha") cfg.alpha = to_double(val, lineno);
    else if (key == "nu") cfg.nu = to_double(val, lineno);
    else if (key == "T") cfg.T = to_double(val, lineno);
    else if (key == "dt") cfg.dt = to_double(val, lineno);
    else if (key == "nx") cfg.nx = to_int(val, lineno);
    else if (key == "ny") cfg.ny = to_int(val, lineno);
    else if (key == "N") cfg.intervals = to_int_list(val, lineno);
    else if (key == "l_max") cfg.inner_steps = to_int_list(val, lineno);
    else if (key == "algorithm") {
      try {
        cfg.algorithm = algorithm_from_string(val);
      } catch (const ConfigError& e) {
        parse_fail(lineno, e.what());
      }
    } else if (key == "workers") cfg.workers = to_int(val, lineno);
    else if (key == "max_outer") cfg.max_outer = to_int(val, lineno);
    else if (key == "tol") cfg.tol = to_double(val, lineno);
    else if (key == "coarse_steps") cfg.coarse_steps = to_int(val, lineno);
    else if (key == "y0") cfg.y0_spec = val;
    else if (key == "y_target") cfg.y_target_spec = val;
    else if (key == "output") cfg.output_path = val;
    else if (key == "seed") cfg.seed = static_cast<unsigned>(to_int(val, lineno));
    else if (key == "timing") cfg.timing = to_bool(val, lineno);
    else parse_fail(lineno, "unknown key '" + key + "'");
  }
  validate(cfg);
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "alpha = " << num(cfg.alpha) << "\n"
     << "nu = " << num(cfg.nu) << "\n"
     << "T = " << num(cfg.T) << "\n"
     << "dt = " << num(cfg.dt) << "\n"
     << "nx = " << cfg.nx << "\n"
     << "ny = " << cfg.ny << "\n"
     << "N = " << join(cfg.intervals) << "\n"
     << "l_max = " << join(cfg.inner_steps) << "\n"
     << "algorithm = " << to_string(cfg.algorithm) << "\n"
     << "workers = " << cfg.workers << "\n"
     << "max_outer = " << cfg.max_outer << "\n"
     << "tol = " << num(cfg.tol) << "\n"
     << "coarse_steps = " << cfg.coarse_steps << "\n"
     << "y0 = " << cfg.y0_spec << "\n"
     << "y_target = " << cfg.y_target_spec << "\n"
     << "output = " << cfg.output_path << "\n"
     << "seed = " << cfg.seed << "\n"
     << "timing = " << (cfg.timing ? "on" : "off") << "\n";
  return os.str();
}

Field make_profile(const Grid& grid, const std::string& spec) {
  std::string name = spec;
  std::vector<double> args;
  auto paren = spec.find('(');
  if (paren != std::string::npos) {
    if (spec.back() != ')')
      throw ConfigError("profile: missing ')' in '" + spec + "'");
    name = trim(spec.substr(0, paren));
    std::string inner = spec.substr(paren + 1, spec.size() - paren - 2);
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) args.push_back(to_double(trim(item), 0));
  }
  Field f = Field::Zero(grid.num_nodes());
  if (name == "zero") {
    if (!args.empty()) throw ConfigError("profile zero takes no arguments");
    return f;
  }
  auto coords = [&](int i, int j) {
    return std::pair<double, double>{(i + 1) * grid.hx(), (j + 1) * grid.hy()};
  };
  if (name == "gaussian") {
    if (args.size() != 4)
      throw ConfigError("profile gaussian needs (cx,cy,sigma,amp)");
    double cx = args[0], cy = args[1], sigma = args[2], amp = args[3];
    if (sigma <= 0) throw ConfigError("profile gaussian: sigma must be > 0");
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        auto [x, y] = coords(i, j);
        double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        f[grid.node_index(i, j)] = amp * std::exp(-r2 / (2.0 * sigma * sigma));
      }
    return f;
  }
  if (name == "product_sine") {
    if (args.size() != 1) throw ConfigError("profile product_sine needs (amp)");
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        auto [x, y] = coords(i, j);
        f[grid.node_index(i, j)] =
            args[0] * std::sin(M_PI * x) * std::sin(M_PI * y);
      }
    return f;
  }
  throw ConfigError("unknown profile '" + name + "'");
}

ControlProblem make_problem(const ExperimentConfig& cfg) {
  Grid grid(cfg.nx, cfg.ny);
  TimeGrid time = TimeGrid::from_step_size(cfg.T, cfg.dt);
  return ControlProblem(grid, time, cfg.alpha, cfg.nu,
                        make_profile(grid, cfg.y0_spec),
                        make_profile(grid, cfg.y_target_spec));
}

namespace {

struct CsvFile {
  explicit CsvFile(const std::filesystem::path& p) : os(p) {
    if (!os) throw std::runtime_error("cannot open " + p.string());
  }
  void row(const std::string& line) {
    os << line << "\n";
    if (!os) throw std::runtime_error("write failure");
  }
  std::ofstream os;
};

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  namespace fs = std::filesystem;
  const fs::path out_dir(cfg.output_path);
  fs::create_directories(out_dir);

  ControlProblem pb = make_problem(cfg);

  // Desk-scale reference values for the diagnostics block, when affordable.
  std::optional<double> J_star;
  if (static_cast<long>(pb.grid.num_control_nodes()) * pb.time.M <=
      kDenseKktMaxUnknowns)
    J_star = solve_kkt_dense(pb).cost;
  double beta_emp = estimate_beta(pb, 16, cfg.seed);

  CsvFile summary(out_dir / "summary.csv");
  summary.row(
      "algorithm,N,l_max,converged,iterations,final_J,final_grad_norm,"
      "solves_serial,solves_parallel,wall_ms");
  CsvFile diag(out_dir / "diagnostics.csv");
  diag.row(
      "N,l_max,k,descent_inner,eta_ratio,step_norm,eta_bound,rate_bound,"
      "fitted_rate");

  bool all_converged = true;
  for (int N : cfg.intervals) {
    for (int l : cfg.inner_steps) {
      RunConfig rc{pb};
      rc.algorithm = cfg.algorithm;
      rc.intervals = N;
      rc.inner_steps = l;
      rc.max_outer = cfg.max_outer;
      rc.tol = cfg.tol;
      rc.workers = cfg.workers;
      rc.coarse_steps_per_interval = cfg.coarse_steps;
      RunResult res = run_algorithm(rc);
      all_converged = all_converged && res.converged;

      CsvFile run(out_dir / ("run_N" + std::to_string(N) + "_l" +
                             std::to_string(l) + ".csv"));
      run.row("iter,J,grad_norm,theta,solves_serial,solves_parallel,wall_ms");
      for (const auto& r : res.history) {
        run.row(std::to_string(r.k) + "," + num(r.J) + "," +
                num(r.grad_norm) + "," + num(r.theta) + "," +
                std::to_string(r.solves_serial) + "," +
                std::to_string(r.solves_parallel) + "," +
                num(cfg.timing ? r.wall_ms : 0.0));
      }

      const auto& last = res.history.back();
      summary.row(to_string(cfg.algorithm) + "," + std::to_string(N) + "," +
                  std::to_string(l) + "," + (res.converged ? "1" : "0") + "," +
                  std::to_string(last.k) + "," + num(res.final_true_cost) +
                  "," + num(last.grad_norm) + "," +
                  std::to_string(last.solves_serial) + "," +
                  std::to_string(last.solves_parallel) + "," +
                  num(cfg.timing ? last.wall_ms : 0.0));

      if (res.iterates.size() >= 2) {
        HypothesisReport rep = check_hypotheses(pb, res, J_star, beta_emp);
        for (const auto& row : rep.rows)
          diag.row(std::to_string(N) + "," + std::to_string(l) + "," +
                   std::to_string(row.k) + "," + num(row.descent_inner) + "," +
                   num(row.eta_ratio) + "," + num(row.step_norm) + "," +
                   num(rep.eta_bound) + "," + num(rep.rate_bound) + "," +
                   (rep.rate_fit_valid ? num(rep.fitted_rate)
                                       : std::string("nan")));
      }
    }
  }
  return all_converged ? 0 : 2;
}

}  // namespace pintoc
