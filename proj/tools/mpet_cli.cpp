// Command line front end: one subcommand per experiment.
//
//   mpet_cli biot-errors --config run.cfg --set reduction_tol=1e-6 --format markdown
//
// Exit status: 0 when every iterative solve converged, 1 when at least one
// did not, 2 on configuration or runtime errors.

#include <CLI11.hpp>
#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mpet/experiment.hpp"

namespace {

struct Options {
  std::string config_file;
  std::vector<std::string> sets;
  std::string format;
  std::string output;
  std::string mesh;
  bool quiet = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mpet::ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void apply_thread_cap() {
  const char* env = std::getenv("MPET_NUM_THREADS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw mpet::ConfigError("MPET_NUM_THREADS must be a positive integer, got '" + std::string(env) + "'");
  omp_set_num_threads(static_cast<int>(n));
}

int run(mpet::Experiment e, const Options& o) {
  // Convenience flags are plain overrides; --set entries come after them and win.
  std::vector<std::string> overrides = {"experiment=" + std::string(mpet::experiment_name(e))};
  if (!o.format.empty()) overrides.push_back("format=" + o.format);
  if (!o.output.empty()) overrides.push_back("output=" + o.output);
  if (!o.mesh.empty()) overrides.push_back("mesh=" + o.mesh);
  overrides.insert(overrides.end(), o.sets.begin(), o.sets.end());

  const std::string text = o.config_file.empty() ? std::string() : read_file(o.config_file);
  const mpet::RunConfig cfg = mpet::parse_config(text, overrides);
  apply_thread_cap();

  const auto t0 = std::chrono::steady_clock::now();
  const mpet::ExperimentOutput out = mpet::run_experiment(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (cfg.output.empty()) {
    mpet::emit_table(out.table, cfg.format, std::cout);
  } else {
    std::ofstream f(cfg.output);
    if (!f) throw std::runtime_error("cannot write '" + cfg.output + "'");
    mpet::emit_table(out.table, cfg.format, f);
  }
  if (!o.quiet) {
    std::cerr << mpet::experiment_name(e) << ": " << out.solves << " solves, " << out.unconverged
              << " unconverged, max mass residual " << out.max_mass_residual << ", " << secs << " s\n";
  }
  return out.unconverged > 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter-robust MPET discretization: reproduce the benchmark tables"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Expand help of every subcommand");

  Options opts;
  std::optional<mpet::Experiment> chosen;
  const std::vector<std::pair<mpet::Experiment, std::string>> commands = {
      {mpet::Experiment::BiotErrors, "Error norms of the manufactured single-network problem"},
      {mpet::Experiment::BiotMinres, "Preconditioned MinRes iterations, single network"},
      {mpet::Experiment::Barenblatt, "MinRes iterations, two-network cantilever"},
      {mpet::Experiment::FourNetwork, "MinRes iterations, four-network cantilever"},
      {mpet::Experiment::Spectra, "Condition numbers of the preconditioned operator"},
      {mpet::Experiment::Converge, "Observed convergence ratios under mesh halving"},
  };
  for (const auto& [e, help] : commands) {
    CLI::App* sub = app.add_subcommand(std::string(mpet::experiment_name(e)), help);
    sub->add_option("-c,--config", opts.config_file, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("-s,--set", opts.sets, "Override one key, e.g. --set reduction_tol=1e-6 (repeatable)");
    sub->add_option("-f,--format", opts.format, "csv or markdown");
    sub->add_option("-o,--output", opts.output, "Table file (default: stdout)");
    sub->add_option("-m,--mesh", opts.mesh, "Subdivision list, e.g. 8,16,32");
    sub->add_flag("-q,--quiet", opts.quiet, "No summary line on stderr");
    sub->callback([&chosen, e = e] { chosen = e; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  try {
    return run(*chosen, opts);
  } catch (const mpet::ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
  }
  return 2;
}
