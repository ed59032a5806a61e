#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pintoc/experiment.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Time-parallel optimal control of the 2D heat equation: serial, "
      "intermediate-targets (sitpoc) and parareal-accelerated (pitpoc) "
      "solvers with CSV convergence output"};

  std::string config_path;
  std::string algorithm;
  int intervals = -1;
  int inner_steps = -1;
  int max_iter = -1;
  double tol = -1.0;
  int workers = -1;
  std::string output;

  app.add_option("--config", config_path, "experiment config file");
  app.add_option("--algorithm", algorithm, "serial | sitpoc | pitpoc");
  app.add_option("--intervals", intervals, "number of time sub-intervals N");
  app.add_option("--inner-steps", inner_steps,
                 "inner gradient steps per sub-problem");
  app.add_option("--max-iter", max_iter, "outer iteration cap");
  app.add_option("--tol", tol, "stopping tolerance (relative)");
  app.add_option("--workers", workers, "worker pool size")
      ->envname("PINTOC_WORKERS");
  app.add_option("--output", output, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    pintoc::ExperimentConfig cfg =
        config_path.empty() ? pintoc::ExperimentConfig{}
                            : pintoc::parse_config(slurp(config_path));
    if (!algorithm.empty())
      cfg.algorithm = pintoc::algorithm_from_string(algorithm);
    if (intervals > 0) cfg.intervals = {intervals};
    if (inner_steps > 0) cfg.inner_steps = {inner_steps};
    if (max_iter >= 0) cfg.max_outer = max_iter;
    if (tol > 0) cfg.tol = tol;
    if (workers > 0) cfg.workers = workers;
    if (!output.empty()) cfg.output_path = output;

    return pintoc::run_experiment(cfg);
  } catch (const pintoc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
