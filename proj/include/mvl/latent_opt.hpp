#pragma once

#include "mvl/types.hpp"

namespace mvl {

// Frozen expected sufficient statistics consumed by the M-step. f_outer is
// the label-block outer moment <f f^T> over the leading columns; give it
// size zero to drop the label terms entirely.
struct MStepMoments {
  double eta_mean = 1.0;
  Matrix g_mean;    // p x k
  Matrix gtg;       // k x k, <G^T G>
  Matrix h_mean;    // q x k
  Matrix hth;       // k x k, <H^T H>
  Matrix c_expect;  // q x n
  Matrix f_outer;   // n_gp x n_gp or empty
  KernelSpec kernel;
  double jitter = 1e-6;
};

// U-dependent part of the variational objective: both views' quadratic data
// terms, the standard-normal prior on U, and the label-process terms
// -log|K|/2 - tr(K^{-1} <f f^T>)/2 over the leading columns.
double objective_f(const Matrix& u, const MStepMoments& m, const Matrix& x);

// Gradient of objective_f as a k x n matrix.
Matrix gradient_f(const Matrix& u, const MStepMoments& m, const Matrix& x);

struct OptimizeOptions {
  double gtol = -1.0;  // non-positive picks 1e-5 * sqrt(k*n)
  int max_iter = 200;
  int history = 10;
  int max_line_evals = 25;
};

struct OptimizeResult {
  Matrix u;
  double value = 0.0;    // objective at the returned point
  int iterations = 0;
  bool line_search_failed = false;
};

// Maximizes objective_f by limited-memory BFGS with a strong Wolfe line
// search. Never returns a point below the start value; a failed line search
// sets the flag and returns the best iterate instead of throwing.
OptimizeResult optimize_u(const Matrix& u0, const MStepMoments& m,
                          const Matrix& x, const OptimizeOptions& opts = {});

}  // namespace mvl
