#pragma once

#include "mvl/kernels.hpp"
#include "mvl/types.hpp"

#include <utility>
#include <vector>

namespace mvl {

// Coordinate updates for the label process f over the leading n_gp subjects.
// Each factor Q(f_i) is a truncated (labeled) or plain (unlabeled) normal
// around the leave-one-out conditional, obtained from the full kernel
// precision: var_i = 1/P_ii, mean_i = <f_i> - (P <f>)_i / P_ii.

// One ascending sweep over all n_gp sites, maintaining P <f> incrementally.
// y and y_observed cover the n_gp block; y may be empty when nothing is
// labeled. Throws IllConditionedKernel if a conditional variance is not
// positive.
void update_f_sweep(VariationalState& s, const IntVector& y,
                    const BoolArray& y_observed,
                    const std::vector<double>& cutpoints_y,
                    const KernelMatrix& km);

// (<f>, <f f^T>) where the outer product uses the factorized moments:
// <f><f>^T off the diagonal, <f_i^2> on it.
std::pair<Vector, Matrix> f_moments(const VariationalState& s);

}  // namespace mvl
