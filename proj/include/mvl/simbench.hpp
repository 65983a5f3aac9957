#pragma once

#include "mvl/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace mvl {

// Ground truth behind a generated dataset. link_truth(i, j) = 1 exactly when
// continuous feature i and ordinal feature j load on a shared latent factor.
struct SyntheticTruth {
  Matrix g_true;      // p x k, 0/1
  Matrix h_true;      // q x k, 0/1
  Matrix u_true;      // k x n
  Matrix link_truth;  // p x q, 0/1
};

struct GenerateParams {
  int n = 200, p = 40, q = 40, k = 5;
  std::vector<double> cutpoints_z = {-kInf, -1.0, 1.0, kInf};
  double noise_sd = 1.0;  // noise scale of the continuous view
  std::uint64_t seed = 0;
};

// Block-design generator: G assigns ceil(p/k) rows of ones per factor (the
// last block truncates at p); H does the same over the first k-1 factors
// with its last column all zeros. U columns are standard normal, X = GU +
// noise, the ordinal view quantizes HU + noise by the cutpoints, and binary
// labels follow the sign of f ~ N(0, U^T U + I).
std::pair<Dataset, SyntheticTruth> generate(const GenerateParams& params);

// |<G> <H>^T| entrywise, the model's association evidence between feature
// pairs.
Matrix association_scores(const Matrix& g_mean, const Matrix& h_mean);

struct PRPoint {
  double threshold, precision, recall;
};

struct PRCurve {
  std::vector<PRPoint> points;  // thresholds descending
  double aupr = 0.0;
};

// Precision/recall of (scores >= threshold) against binary truth, with
// thresholds at evenly spaced score quantiles. The area is the step-wise
// average precision (no interpolation between points). All-zero truth is an
// error since recall would be undefined.
PRCurve precision_recall(const Matrix& scores, const Matrix& truth,
                         int num_thresholds = 200);

// Fraction of agreeing entries over the unmasked positions.
double accuracy(const IntVector& y_pred, const IntVector& y_true,
                const BoolArray& mask);

}  // namespace mvl
