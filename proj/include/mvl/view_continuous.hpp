#pragma once

#include "mvl/types.hpp"

#include <utility>

namespace mvl {

// Coordinate updates for the continuous view: loading rows G, their slab
// responsibilities, the selection probabilities, and the noise precision.
// Each call is one exact coordinate-ascent step given the rest of the state.

// Row posteriors: precision <eta> U U^T + diag(beta/s1 + (1-beta)/s2) per
// row, mean = cov * <eta> U x_i. Updates g_mean, g_cov, g_cov_logdet.
void update_g_rows(VariationalState& s, const Matrix& x, const Matrix& u,
                   const Hyperparameters& h);

// Slab responsibilities from the current row second moments and the cached
// selection log-moments.
void update_s_g(VariationalState& s, const Hyperparameters& h);

// Beta posterior over the selection probabilities and its log-moment cache.
void update_pi_g(VariationalState& s, const Hyperparameters& h);

// Gamma posterior over the noise precision. x_sq_norm is tr(X X^T), passed
// in because it never changes across iterations.
void update_eta(VariationalState& s, const Matrix& x, const Matrix& u,
                double x_sq_norm, const Hyperparameters& h);

// (<G>, <G^T G>) with the covariance blocks folded in.
std::pair<Matrix, Matrix> moments_g(const VariationalState& s);

}  // namespace mvl
