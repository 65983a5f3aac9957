#pragma once

#include "mvl/types.hpp"

#include <utility>

namespace mvl {

// Coordinate updates for the ordinal view. The latent regression targets C
// live in truncated-normal factors, one per observed cell; the loading rows
// H mirror the continuous view with unit noise.

// Truncated-normal moments of each c_ij given its ordinal level's interval
// and the current regression mean h_i . u_j. Updates c_mean_param, c_expect,
// c_sq_expect, c_logz.
void update_c(VariationalState& s, const IntMatrix& z, const Matrix& u,
              const Hyperparameters& h);

// Row posteriors for H against the current <C>.
void update_h_rows(VariationalState& s, const Matrix& u,
                   const Hyperparameters& h);

// Slab responsibilities followed by the Beta posterior over the ordinal
// selection probabilities (the two are refreshed together).
void update_s_h(VariationalState& s, const Hyperparameters& h);

// (<H>, <H^T H>).
std::pair<Matrix, Matrix> moments_h(const VariationalState& s);

}  // namespace mvl
