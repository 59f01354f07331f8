#pragma once

#include <functional>
#include <vector>

#include <Eigen/Sparse>

#include "mpet/params.hpp"

namespace mpet {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Serial is the reference path; Parallel must reproduce it bit for bit.
enum class ExecPolicy { Serial, Parallel };

/// Dense element contribution with its global row and column indices.
/// Indices < 0 are dropped on scatter.
struct LocalBlock {
  std::vector<int> rows;
  std::vector<int> cols;
  DenseMatrix values;
};

using LocalKernel = std::function<void(int item, LocalBlock& out)>;

/// Evaluates `kernel` for items 0..count-1 (in parallel when requested) and
/// scatters the blocks in ascending item order, so the summation order of
/// every entry is independent of the schedule.
SparseMatrix assemble_blocks(int rows, int cols, int count, const LocalKernel& kernel,
                             ExecPolicy policy);

/// y = A x. Each row is reduced in storage order on one thread.
void spmv(const SparseMatrix& a, const double* x, double* y, ExecPolicy policy);

/// Threads used by Parallel kernels.
[[nodiscard]] int max_threads();

}  // namespace mpet
