#pragma once

// Shared helpers for building small random datasets and internally
// consistent variational states, so property tests can start from an
// arbitrary point instead of the canonical initialization.

#include "mvl/kernels.hpp"
#include "mvl/labels_gp.hpp"
#include "mvl/rng.hpp"
#include "mvl/types.hpp"
#include "mvl/view_continuous.hpp"
#include "mvl/view_ordinal.hpp"

#include <cmath>

namespace fixtures {

using namespace mvl;

inline Matrix random_matrix(int rows, int cols, NormalSampler& rng) {
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng();
  return m;
}

inline Matrix random_spd(int k, NormalSampler& rng) {
  const Matrix a = random_matrix(k, k, rng);
  return a * a.transpose() / k + 0.3 * Matrix::Identity(k, k);
}

inline double spd_logdet(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

inline Dataset random_dataset(int p, int q, int n, int levels,
                              NormalSampler& rng) {
  Dataset d;
  d.x = random_matrix(p, n, rng);
  d.z = IntMatrix(q, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < q; ++i)
      d.z(i, j) = static_cast<int>(rng.uniform() * levels);
  return d;
}

// Random starting point whose caches (Beta log-moments, covariance log
// determinants, truncation moments, label-process factors) are consistent
// with one another, as the objective assumes.
inline VariationalState random_consistent_state(const Dataset& d,
                                                const Matrix& u,
                                                const Hyperparameters& h,
                                                int n_gp, NormalSampler& rng) {
  const int p = d.p(), q = d.q(), k = h.k;
  VariationalState s = make_initial_state(p, q, d.n(), n_gp, h);

  s.g_mean = 0.5 * random_matrix(p, k, rng);
  for (int i = 0; i < p; ++i) {
    s.g_cov[i] = 0.2 * random_spd(k, rng);
    s.g_cov_logdet(i) = spd_logdet(s.g_cov[i]);
  }
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < k; ++j)
      s.beta(i, j) = 0.05 + 0.9 * rng.uniform();
  update_pi_g(s, h);  // ties lg1/lg2 and the log-moment cache to beta

  s.h_mean = 0.5 * random_matrix(q, k, rng);
  for (int i = 0; i < q; ++i) {
    s.h_cov[i] = 0.2 * random_spd(k, rng);
    s.h_cov_logdet(i) = spd_logdet(s.h_cov[i]);
  }
  update_s_h(s, h);  // alpha plus its Beta posterior, mutually consistent

  s.eta_shape = 0.5 + 2.0 * rng.uniform();
  s.eta_rate = 0.5 + 2.0 * rng.uniform();

  update_c(s, d.z, u, h);  // truncation moments for the current regression

  if (n_gp > 0) {
    const KernelMatrix km = kernel_matrix(u.leftCols(n_gp), h.kernel,
                                          h.jitter);
    const IntVector y =
        d.has_labels() ? IntVector(d.y.head(n_gp)) : IntVector();
    const BoolArray obs =
        d.has_labels() ? BoolArray(d.y_observed.head(n_gp)) : BoolArray();
    update_f_sweep(s, y, obs, h.cutpoints_y, km);
  }
  return s;
}

}  // namespace fixtures
