#pragma once

#include "mvl/types.hpp"

namespace mvl {

// Factorized kernel matrix over one set of latent columns. `values` already
// carries the jitter that made the factorization succeed; `log_det` and the
// explicit inverse refer to that jittered matrix.
struct KernelMatrix {
  Matrix values;   // n x n
  Matrix inv;      // n x n
  Eigen::LLT<Matrix> llt;
  double log_det = 0.0;
  double jitter_applied = 0.0;
  KernelSpec spec;

  int n() const { return static_cast<int>(values.rows()); }
  Matrix solve(const Matrix& rhs) const { return llt.solve(rhs); }
};

// Cross-kernel block k(u1[:,i], u2[:,j]) with no jitter.
Matrix kernel_cross(const Matrix& u1, const Matrix& u2, const KernelSpec& spec);

// Gram matrix of u with `jitter` added to the diagonal, Cholesky-factorized.
// If the factorization fails the jitter escalates tenfold up to three times;
// beyond that an IllConditionedKernel is thrown naming the final jitter.
KernelMatrix kernel_matrix(const Matrix& u, const KernelSpec& spec,
                           double jitter);

// Gradient of tr(W K(u)) with respect to u for symmetric W, returned as a
// k x n matrix. The jitter diagonal is constant in u and contributes nothing.
Matrix kernel_grad_contract(const Matrix& u, const KernelSpec& spec,
                            const Matrix& w);

}  // namespace mvl
