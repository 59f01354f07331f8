#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "mpet/fespace.hpp"
#include "mpet/kernels.hpp"
#include "mpet/mesh.hpp"
#include "mpet/params.hpp"

namespace mpet {

using BoundaryVectorData = std::function<Vec2(BoundarySegment, const Vec2&)>;
using BoundaryScalarData = std::function<double(BoundarySegment, const Vec2&)>;

/// Per-field partition of the four sides. Empty data functions mean zero.
///
/// Displacement: `u_dirichlet` sides carry u = u_D (normal part essential,
/// tangential part by Nitsche terms); `u_traction` sides carry the total
/// traction. Network i: `pressure` sides carry p_i = p_D, `flux` sides carry
/// the essential condition v_i . n = q_N. A network without pressure sides
/// has its pressure fixed up to a constant, removed by the mean-zero
/// constraint.
struct NetworkBoundary {
  std::vector<BoundarySegment> pressure;
  std::vector<BoundarySegment> flux;
  BoundaryScalarData p_data;
  BoundaryScalarData q_data;
};

struct BoundaryConditions {
  std::vector<BoundarySegment> u_dirichlet;
  std::vector<BoundarySegment> u_traction;
  BoundaryVectorData u_data;
  BoundaryVectorData traction;
  std::vector<NetworkBoundary> networks;

  /// Throws std::invalid_argument if a field's sides overlap, miss a side,
  /// or the network count differs from n.
  void validate(int n) const;

  [[nodiscard]] bool mean_zero(int i) const { return networks[i].pressure.empty(); }

  /// u = 0 and v_i . n = 0 on the whole boundary.
  static BoundaryConditions clamped(int n);
};

struct AssemblyConfig {
  /// eta of the penalty eta h_e^{-1} <<u_t>> : <<w_t>> written with the
  /// symmetric tensor jump <<u_t>> = sym([u_t] (x) n). Since
  /// <<u_t>> : <<w_t>> = [u_t] . [w_t] / 2, the coefficient on the vector
  /// jumps is eta / 2; see jump_penalty().
  double penalty = 10.0;
  int quad_degree = 4;
  int rhs_quad_degree = 10;
  ExecPolicy policy = ExecPolicy::Parallel;

  void validate() const;
  /// Coefficient of h_e^{-1} [u_t] . [w_t].
  [[nodiscard]] double jump_penalty() const { return 0.5 * penalty; }
};

/// Volume load f and network sources g_i; empty functions mean zero.
struct ProblemData {
  VectorFunction f;
  std::vector<ScalarFunction> g;
};

/// Options of the generic interior-penalty form
///   vol(u, w) + lambda (div u, div w)
///   - consistency * sum_e (<{op(u)} n1 . t, [w] . t> + <{op(w)} n1 . t, [u] . t>)
///   + penalty * sum_e h_e^{-1} <[u] . t, [w] . t>
/// where vol and op use the symmetric gradient (strain) or the full gradient.
struct DgFormOptions {
  bool strain = true;
  bool consistency = true;
  double penalty = 10.0;
  double lambda = 0.0;
};

/// Interior edges followed by boundary edges on the given sides, ascending.
std::vector<int> dg_edges(const Mesh& mesh, const std::vector<BoundarySegment>& sides);

/// The DG form on all BDM1 dofs over the listed edges.
SparseMatrix assemble_dg_form(const DofMap& u, const std::vector<int>& edges,
                              const DgFormOptions& opt, const AssemblyConfig& cfg);

/// a_h + lambda div-div on all BDM1 dofs, edge terms on interior and
/// displacement-Dirichlet edges.
SparseMatrix assemble_elasticity_dg(const DofMap& u, const BoundaryConditions& bc, double lambda,
                                    const AssemblyConfig& cfg);

struct FluxBlocks {
  SparseMatrix mass;  // R^{-1} (v, z)
  SparseMatrix div;   // (div v, q): rows P0, columns RT0
};

FluxBlocks assemble_flux_blocks(const DofMap& v, const DofMap& p, double r_inv,
                                const AssemblyConfig& cfg);

/// Vector field mass (v, z) for BDM1 or RT0.
SparseMatrix assemble_vector_mass(const DofMap& space, const AssemblyConfig& cfg);
/// (div v, div z) for BDM1 or RT0.
SparseMatrix assemble_divdiv(const DofMap& space, const AssemblyConfig& cfg);
/// (div u, q) with q in P0.
SparseMatrix assemble_divergence(const DofMap& space, const DofMap& p, const AssemblyConfig& cfg);

/// n x n blocks of -(Lambda1 + Lambda2)_{ij} times the P0 mass.
SparseMatrix assemble_pressure_block(const RescaledParameters& rp, const DofMap& p);

/// Index sets of one field: `free[k]` is the full dof of free dof k and
/// `to_free[d]` is the free index of full dof d or -1.
struct FreeDofs {
  std::vector<int> free;
  std::vector<int> to_free;
  [[nodiscard]] int size() const { return static_cast<int>(free.size()); }
};

/// Offsets of the (u; v_1..v_n; p_1..p_n) blocks in the free system.
struct BlockLayout {
  int n = 1;
  int nu = 0;
  std::vector<int> nv;
  int np = 0;

  [[nodiscard]] int u_offset() const { return 0; }
  [[nodiscard]] int v_offset(int i) const;
  [[nodiscard]] int p_offset(int i) const;
  [[nodiscard]] int v_total() const;
  [[nodiscard]] int size() const { return p_offset(0) + n * np; }
};

/// Symmetric indefinite system on the free dofs, with everything needed to
/// lift boundary data, rebuild full fields and build norms/preconditioners.
/// Holds a pointer to the mesh, which must outlive it.
struct BlockSystem {
  const Mesh* mesh = nullptr;
  RescaledParameters rp;
  BoundaryConditions bc;
  AssemblyConfig cfg;
  DofMap u_space;
  DofMap v_space;
  DofMap p_space;
  BlockLayout layout;
  FreeDofs u_free;
  std::vector<FreeDofs> v_free;
  std::vector<bool> mean_zero;

  SparseMatrix matrix;
  /// Columns of the full operator at constrained dofs (free rows only).
  SparseMatrix lift;
  /// Essential data at constrained dofs, in `lift` column order.
  DenseVector constrained_values;
  std::vector<int> constrained_index;  // full-system dof of each lift column

  // Full-dof building blocks.
  SparseMatrix a_uu;       // a_h + lambda div-div
  SparseMatrix rt_mass;    // unscaled RT0 mass
  SparseMatrix rt_divdiv;  // unscaled RT0 div-div
  SparseMatrix div_u;      // (div u, q)
  SparseMatrix div_v;      // (div v, q)
  DenseVector cell_areas;

  BlockSystem(const Mesh& m, const RescaledParameters& r, const BoundaryConditions& b,
              const AssemblyConfig& c);

  [[nodiscard]] int size() const { return layout.size(); }

  /// Full BDM1 coefficients (constrained values filled in) from a free vector.
  [[nodiscard]] DenseVector full_u(const DenseVector& x) const;
  [[nodiscard]] DenseVector full_v(int i, const DenseVector& x) const;
  [[nodiscard]] DenseVector pressure(int i, const DenseVector& x) const;

  /// Free vector from full field coefficients (constrained entries dropped).
  [[nodiscard]] DenseVector pack(const DenseVector& u_full, const std::vector<DenseVector>& v_full,
                                 const std::vector<DenseVector>& p) const;
};

BlockSystem assemble_full_operator(const Mesh& mesh, const RescaledParameters& rp,
                                   const BoundaryConditions& bc, const AssemblyConfig& cfg);

/// Loads of all fields on the full dofs, before lifting: (f, w), traction,
/// Nitsche tangential data, pressure data against z . n, and (g_i, q).
DenseVector assemble_load(const BlockSystem& sys, const ProblemData& data);

/// Free right-hand side: the load restricted to free rows minus the lift of
/// the essential data.
DenseVector assemble_rhs(const BlockSystem& sys, const ProblemData& data);

/// Free right-hand side from an explicit full-dof load (used by the
/// backward-Euler driver).
DenseVector reduce_load(const BlockSystem& sys, const DenseVector& load);

struct PreconditionerBlocks {
  SparseMatrix bu;   // equals the free A_uu
  SparseMatrix bv;   // n x n blocks R_i^{-1} M delta_ij + gamma~_ij D
  SparseMatrix bp;   // n x n blocks gamma_ij M_p
  DenseMatrix lambda;
  DenseVector cell_areas;
};

PreconditionerBlocks assemble_preconditioner_blocks(const BlockSystem& sys,
                                                    const LambdaMatrices& lm);

struct NormGrams {
  SparseMatrix u;  // grad:grad + h_e^{-1} tangential jumps + lambda div-div
  SparseMatrix v;  // sum R_i^{-1} mass + Lambda^{-1}-weighted div-div
  SparseMatrix p;  // Lambda-weighted P0 mass
};

NormGrams assemble_norm_grams(const BlockSystem& sys, const LambdaMatrices& lm);

/// Rows and columns of `full` selected through the maps (-1 drops).
SparseMatrix extract(const SparseMatrix& full, const FreeDofs& rows, const FreeDofs& cols);

/// Matrix Market coordinate export: the %%MatrixMarket banner, a
/// "rows cols nnz" line, then 1-based "i j value" triples with 17
/// significant digits.
void write_matrix_market(std::ostream& os, const SparseMatrix& a);

}  // namespace mpet
