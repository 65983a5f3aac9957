#pragma once

#include "mvl/em_driver.hpp"
#include "mvl/types.hpp"

namespace mvl {

// Joint refit over train and test columns: both views of the test subjects
// inform the shared latent features, while the label process covers only the
// training block. This is the adopted transductive strategy; there is no
// separate out-of-sample embedding.
struct TransductiveResult {
  Matrix u_train;  // k x n_train
  Matrix u_test;   // k x n_test
  VariationalState state;
  FitReport report;
};

// train must carry labels (possibly masked); test must not. Column counts
// may differ, feature dimensions must match.
TransductiveResult fit_transductive(const Dataset& train, const Dataset& test,
                                    const Hyperparameters& h,
                                    const FitOptions& opts = {});

struct LabelPrediction {
  IntVector y;  // decoded ordinal levels
  Vector f;     // latent scores behind them
};

// Posterior-mean extension of the label process to the test columns,
// f_test = K(test, train) K(train, train)^{-1} <f_train>, decoded against
// the cutpoints. A score exactly on a boundary takes the upper region.
LabelPrediction predict_labels(const Matrix& u_test, const Matrix& u_train,
                               const Vector& f_train, const KernelSpec& spec,
                               double jitter,
                               const std::vector<double>& cutpoints_y);

}  // namespace mvl
