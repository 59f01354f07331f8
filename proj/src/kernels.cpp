#include "mpet/kernels.hpp"

#include <omp.h>

namespace mpet {

SparseMatrix assemble_blocks(int rows, int cols, int count, const LocalKernel& kernel,
                             ExecPolicy policy) {
  std::vector<LocalBlock> blocks(count);
  if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < count; ++i) kernel(i, blocks[i]);
  } else {
    for (int i = 0; i < count; ++i) kernel(i, blocks[i]);
  }

  std::size_t nnz = 0;
  for (const auto& b : blocks) nnz += b.rows.size() * b.cols.size();
  std::vector<Eigen::Triplet<double, int>> trip;
  trip.reserve(nnz);
  for (const auto& b : blocks)
    for (std::size_t r = 0; r < b.rows.size(); ++r) {
      if (b.rows[r] < 0) continue;
      for (std::size_t c = 0; c < b.cols.size(); ++c) {
        if (b.cols[c] < 0) continue;
        trip.emplace_back(b.rows[r], b.cols[c], b.values(r, c));
      }
    }
  SparseMatrix a(rows, cols);
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  return a;
}

void spmv(const SparseMatrix& a, const double* x, double* y, ExecPolicy policy) {
  const int n = static_cast<int>(a.rows());
  const int* outer = a.outerIndexPtr();
  const int* inner = a.innerIndexPtr();
  const double* val = a.valuePtr();
  auto row = [&](int i) {
    double s = 0.0;
    for (int k = outer[i]; k < outer[i + 1]; ++k) s += val[k] * x[inner[k]];
    y[i] = s;
  };
  if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) row(i);
  } else {
    for (int i = 0; i < n; ++i) row(i);
  }
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace mpet
