#include "mpet/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>

namespace mpet {

namespace {

std::vector<BiotPoint> biot_points(const RunConfig& c) {
  std::vector<BiotPoint> pts;
  for (double ap : c.alpha_p)
    for (double l : c.lambda)
      for (double r : c.r_inv) pts.push_back({ap, l, r});
  return pts;
}

RunOptions run_options(const RunConfig& c, bool errors, bool iterations) {
  RunOptions o;
  o.errors = errors;
  o.iterations = iterations;
  o.include_h2_term = c.h2_term;
  o.assembly = c.assembly;
  o.solver = c.solver;
  return o;
}

std::string iteration_cell(const BenchmarkResult& r) {
  return std::to_string(r.iterations) + (r.converged ? "" : "!");
}

// Column labels of the error table: the value of the single varying grid,
// or every coordinate when several vary.
std::vector<std::string> biot_column_labels(const RunConfig& c) {
  const bool va = c.alpha_p.size() > 1, vl = c.lambda.size() > 1, vr = c.r_inv.size() > 1;
  std::vector<std::string> labels;
  for (const BiotPoint& p : biot_points(c)) {
    if (va + vl + vr > 1) {
      labels.push_back("alpha_p=" + format_param(p.alpha_p) + " lambda=" + format_param(p.lambda) +
                       " r_inv=" + format_param(p.r_inv));
    } else if (va) {
      labels.push_back(format_param(p.alpha_p));
    } else if (vl) {
      labels.push_back(format_param(p.lambda));
    } else {
      labels.push_back(format_param(p.r_inv));
    }
  }
  return labels;
}

void add_pair_columns(std::vector<std::string>& h, const std::vector<double>& values) {
  for (double v : values) {
    h.push_back(format_param(v) + " it");
    h.push_back(format_param(v) + " factor");
  }
}

void tally(ExperimentOutput& out, const std::vector<BenchmarkResult>& res) {
  for (const auto& r : res) {
    ++out.solves;
    if (!r.converged) ++out.unconverged;
    out.max_mass_residual = std::max(out.max_mass_residual, r.mass_residual);
  }
}

}  // namespace

SpectrumPoint spectrum_point(int n_subdiv, int networks, double alpha_p, double lambda, double r_inv,
                             const AssemblyConfig& cfg) {
  const Mesh mesh = Mesh::structured(n_subdiv);
  const RescaledParameters rp = RescaledParameters::direct(lambda, std::vector<double>(networks, r_inv),
                                                           std::vector<double>(networks, alpha_p));
  AssemblyConfig serial = cfg;
  serial.policy = ExecPolicy::Serial;
  const BlockSystem sys(mesh, rp, BoundaryConditions::clamped(networks), serial);
  const LambdaMatrices lm = build_lambda_matrices(rp);
  SpectrumPoint sp{n_subdiv, networks, alpha_p, lambda, r_inv, {}};
  sp.report = condition_diagnostic(sys, assemble_preconditioner_blocks(sys, lm));
  return sp;
}

std::vector<SpectrumPoint> run_spectra(const RunConfig& cfg) {
  std::vector<SpectrumPoint> todo;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> decade(0.0, 8.0);
  for (int n : cfg.mesh)
    for (int nets : cfg.networks) {
      for (double ap : cfg.alpha_p)
        for (double l : cfg.lambda)
          for (double r : cfg.r_inv) todo.push_back({n, nets, ap, l, r, {}});
      for (int s = 0; s < cfg.samples; ++s) {
        const double ap = std::pow(10.0, decade(rng)), l = std::pow(10.0, decade(rng));
        const double r = std::pow(10.0, decade(rng));
        todo.push_back({n, nets, ap, l, r, {}});
      }
    }
  const int count = static_cast<int>(todo.size());
  std::vector<std::string> errors(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (int k = 0; k < count; ++k) {
    try {
      const SpectrumPoint& p = todo[k];
      todo[k] = spectrum_point(p.n_subdiv, p.networks, p.alpha_p, p.lambda, p.r_inv, cfg.assembly);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw std::runtime_error(e);
  return todo;
}

std::vector<std::string> experiment_header(const RunConfig& c) {
  std::vector<std::string> h;
  switch (c.experiment) {
    case Experiment::BiotErrors: {
      h = {"h", "norm"};
      const auto labels = biot_column_labels(c);
      h.insert(h.end(), labels.begin(), labels.end());
      break;
    }
    case Experiment::BiotMinres:
      h = {"h", "alpha_p", "lambda"};
      add_pair_columns(h, c.r_inv);
      break;
    case Experiment::Barenblatt:
      h = {"h", "beta", "K2 factor"};
      add_pair_columns(h, c.k1_factors);
      break;
    case Experiment::FourNetwork:
      h = {"h", "lambda factor", "K factor"};
      add_pair_columns(h, c.k3_factors);
      break;
    case Experiment::Spectra:
      h = {"h", "n", "alpha_p", "lambda", "r_inv", "kappa", "min |eig|", "max |eig|", "dofs"};
      break;
    case Experiment::Converge:
      h = {"alpha_p", "lambda", "r_inv", "norm", "h", "error", "ratio"};
      break;
  }
  return h;
}

ExperimentOutput run_experiment(const RunConfig& c) {
  c.validate();
  ExperimentOutput out;
  out.table.header = experiment_header(c);
  auto& rows = out.table.rows;

  switch (c.experiment) {
    case Experiment::BiotErrors: {
      const auto pts = biot_points(c);
      const auto res = run_biot_table(c.mesh, pts, run_options(c, true, false));
      tally(out, res);
      const std::size_t np = pts.size();
      for (std::size_t m = 0; m < c.mesh.size(); ++m)
        for (int norm = 0; norm < 3; ++norm) {
          std::vector<std::string> row = {format_h(c.mesh[m]), norm == 0 ? "P" : norm == 1 ? "V" : "U_h"};
          for (std::size_t j = 0; j < np; ++j) {
            const ErrorNorms& e = res[m * np + j].errors;
            row.push_back(format_sci(norm == 0 ? e.p : norm == 1 ? e.v : e.u));
          }
          rows.push_back(std::move(row));
        }
      break;
    }
    case Experiment::BiotMinres: {
      const auto pts = biot_points(c);
      const auto res = run_biot_table(c.mesh, pts, run_options(c, false, true));
      tally(out, res);
      const std::size_t nr = c.r_inv.size();
      for (std::size_t k = 0; k < res.size(); k += nr) {
        const BiotPoint& p = pts[k % pts.size()];
        std::vector<std::string> row = {format_h(res[k].n_subdiv), format_param(p.alpha_p), format_param(p.lambda)};
        for (std::size_t j = 0; j < nr; ++j) {
          row.push_back(iteration_cell(res[k + j]));
          row.push_back(format_factor(res[k + j].factor));
        }
        rows.push_back(std::move(row));
      }
      break;
    }
    case Experiment::Barenblatt: {
      const auto res = run_barenblatt(c.mesh, c.k1_factors, c.k2_factors, c.betas, run_options(c, false, true), c.tau);
      tally(out, res);
      const std::size_t n1 = c.k1_factors.size();
      for (std::size_t k = 0; k < res.size(); k += n1) {
        std::vector<std::string> row = {format_h(res[k].n_subdiv), format_param(res[k].point[0]),
                                        format_param(res[k].point[1])};
        for (std::size_t j = 0; j < n1; ++j) {
          row.push_back(iteration_cell(res[k + j]));
          row.push_back(format_factor(res[k + j].factor));
        }
        rows.push_back(std::move(row));
      }
      break;
    }
    case Experiment::FourNetwork: {
      const auto res = run_four_network(c.mesh, c.lambda_factors, c.k_factors, c.k3_factors,
                                        run_options(c, false, true), c.tau);
      tally(out, res);
      const std::size_t n3 = c.k3_factors.size();
      for (std::size_t k = 0; k < res.size(); k += n3) {
        std::vector<std::string> row = {format_h(res[k].n_subdiv), format_param(res[k].point[0]),
                                        format_param(res[k].point[1])};
        for (std::size_t j = 0; j < n3; ++j) {
          row.push_back(iteration_cell(res[k + j]));
          row.push_back(format_factor(res[k + j].factor));
        }
        rows.push_back(std::move(row));
      }
      break;
    }
    case Experiment::Spectra: {
      for (const SpectrumPoint& s : run_spectra(c)) {
        rows.push_back({format_h(s.n_subdiv), std::to_string(s.networks), format_param(s.alpha_p),
                        format_param(s.lambda), format_param(s.r_inv), format_sci(s.report.kappa),
                        format_sci(s.report.min_abs), format_sci(s.report.max_abs),
                        std::to_string(s.report.dimension)});
      }
      break;
    }
    case Experiment::Converge: {
      const auto pts = biot_points(c);
      const auto res = run_biot_table(c.mesh, pts, run_options(c, true, false));
      tally(out, res);
      const std::size_t np = pts.size();
      for (std::size_t j = 0; j < np; ++j)
        for (int norm = 0; norm < 3; ++norm)
          for (std::size_t m = 0; m < c.mesh.size(); ++m) {
            auto pick = [&](std::size_t mm) {
              const ErrorNorms& e = res[mm * np + j].errors;
              return norm == 0 ? e.p : norm == 1 ? e.v : e.u;
            };
            std::string ratio;
            if (m > 0) {
              char buf[32];
              std::snprintf(buf, sizeof buf, "%.2f", pick(m - 1) / pick(m));
              ratio = buf;
            }
            rows.push_back({format_param(pts[j].alpha_p), format_param(pts[j].lambda), format_param(pts[j].r_inv),
                            norm == 0 ? "P" : norm == 1 ? "V" : "U_h", format_h(c.mesh[m]), format_sci(pick(m)),
                            ratio});
          }
      break;
    }
  }
  return out;
}

}  // namespace mpet
