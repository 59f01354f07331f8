#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mpet/solver.hpp"

namespace mpet {

enum class Experiment { BiotErrors, BiotMinres, Barenblatt, FourNetwork, Spectra, Converge };
enum class OutputFormat { Csv, Markdown };

std::string_view experiment_name(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);

/// Thrown for any malformed configuration; the message names the line or
/// flag and the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fully resolved run description. Grids that an experiment does not use
/// are ignored.
struct RunConfig {
  Experiment experiment = Experiment::BiotErrors;
  /// Subdivisions N per unit side (h = 1/N); powers of two up to max_mesh.
  std::vector<int> mesh;
  int max_mesh = 256;

  // Manufactured single-network runs (rescaled values).
  std::vector<double> alpha_p;
  std::vector<double> lambda;
  std::vector<double> r_inv;
  // Two-network sweep: multipliers of the base permeabilities and beta values.
  std::vector<double> k1_factors;
  std::vector<double> k2_factors;
  std::vector<double> betas;
  // Four-network sweep: multipliers of lambda, K = K1 = K2 = K4 and K3.
  std::vector<double> lambda_factors;
  std::vector<double> k_factors;
  std::vector<double> k3_factors;
  // Spectra: network counts; `samples` extra log-uniform draws in [1, 1e8]^3.
  std::vector<int> networks;
  int samples = 0;

  double tau = 1.0;
  bool h2_term = true;
  AssemblyConfig assembly;
  SolverConfig solver;

  OutputFormat format = OutputFormat::Csv;
  std::string output;  // empty: stdout
  std::uint64_t seed = 0;

  /// Throws ConfigError on empty grids or out-of-range values.
  void validate() const;
};

/// Flat "key = value" text, one entry per line, '#' starts a comment.
/// Lists are comma separated; "log:a:b:s" expands to 10^a, 10^(a+s), ...,
/// 10^b. Keys absent from both the file and the overrides take the
/// defaults of the selected experiment (its published grid, penalty 10,
/// reduction 1e-8, tau 1). Overrides ("key=value", e.g. from flags) win over
/// the file.
RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});

/// Defaults of one experiment with nothing overridden.
RunConfig default_config(Experiment e);

/// All recognised keys, in documentation order.
const std::vector<std::string>& config_keys();

}  // namespace mpet
