// sttrace: run convergence experiments and property suites.
#include <omp.h>

#include <iostream>

#include <CLI11.hpp>

#include "sttrace/error.hpp"
#include "sttrace/experiment.hpp"
#include "sttrace/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Eulerian space-time trace FEM for surface PDEs on evolving curves"};
  app.require_subcommand(1);

  std::string config, out;
  int threads = 0;
  auto* run = app.add_subcommand("run", "run a convergence experiment from a config file");
  run->add_option("--config", config, "flat key = value config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "output directory for CSV files (overrides 'out')");
  run->add_option("--threads", threads, "OpenMP threads (overrides 'threads')")->check(CLI::NonNegativeNumber);

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run a property suite");
  verify->add_option("--suite", suite, "invariants or oracles")
      ->required()
      ->check(CLI::IsMember({"invariants", "oracles"}));
  verify->add_option("--threads", threads, "OpenMP threads")->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      sttrace::ExperimentConfig cfg = sttrace::load_config(config);
      if (!out.empty()) cfg.out = out;
      if (threads > 0) cfg.threads = threads;
      const sttrace::ConvergenceReport report = sttrace::run_experiment(cfg, &std::cerr);
      sttrace::print_table(report, std::cout);
      return report.all_completed() ? 0 : 1;
    }
    if (threads > 0) omp_set_num_threads(threads);
    int failed = 0;
    for (const auto& r : sttrace::run_suite(suite)) {
      std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
      failed += !r.passed;
    }
    return failed == 0 ? 0 : 1;
  } catch (const sttrace::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
