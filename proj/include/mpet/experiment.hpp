#pragma once

#include <vector>

#include "mpet/benchmarks.hpp"
#include "mpet/config.hpp"
#include "mpet/table.hpp"

namespace mpet {

/// One spectral sweep point.
struct SpectrumPoint {
  int n_subdiv = 0;
  int networks = 1;
  double alpha_p = 0.0;
  double lambda = 1.0;
  double r_inv = 1.0;
  ConditionReport report;
};

/// kappa(B A) for equal parameters in every network, u = 0 and v_i . n = 0
/// on the whole boundary (all pressures mean-zero).
SpectrumPoint spectrum_point(int n_subdiv, int networks, double alpha_p, double lambda, double r_inv,
                             const AssemblyConfig& cfg = {});

/// Every (mesh, networks, alpha_p, lambda, r_inv) point of the grid, in
/// that nesting order, followed by `samples` seeded log-uniform draws per
/// (mesh, networks).
std::vector<SpectrumPoint> run_spectra(const RunConfig& cfg);

struct ExperimentOutput {
  Table table;
  int solves = 0;
  int unconverged = 0;
  double max_mass_residual = 0.0;  // relative, over every solved state
};

/// Runs the configured experiment and lays the results out like the
/// published tables. Rows whose MinRes run missed reduction_tol carry a
/// trailing '!' on the iteration count.
ExperimentOutput run_experiment(const RunConfig& cfg);

/// Header of the table run_experiment would produce (no solves).
std::vector<std::string> experiment_header(const RunConfig& cfg);

}  // namespace mpet
