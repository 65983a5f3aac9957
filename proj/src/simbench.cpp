#include "mvl/simbench.hpp"

#include "mvl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mvl {

namespace {

// 0/1 block design: column j covers rows [j*b, min((j+1)*b, rows)) with
// b = ceil(rows / active); columns beyond `active` stay zero.
Matrix block_design(int rows, int k, int active, const char* name) {
  if (active < 1) {
    std::ostringstream msg;
    msg << "block design for " << name << " needs at least one active factor";
    throw std::invalid_argument(msg.str());
  }
  const int b = (rows + active - 1) / active;
  Matrix m = Matrix::Zero(rows, k);
  for (int j = 0; j < active; ++j) {
    const int lo = j * b;
    const int hi = std::min(rows, (j + 1) * b);
    if (lo >= hi) {
      std::ostringstream msg;
      msg << "block design for " << name << " leaves factor " << j
          << " empty (" << rows << " rows over " << active << " factors)";
      throw std::invalid_argument(msg.str());
    }
    m.block(lo, j, hi - lo, 1).setOnes();
  }
  return m;
}

int quantize(double v, const std::vector<double>& cutpoints) {
  const auto it = std::upper_bound(cutpoints.begin(), cutpoints.end(), v);
  return static_cast<int>(it - cutpoints.begin()) - 1;
}

}  // namespace

std::pair<Dataset, SyntheticTruth> generate(const GenerateParams& params) {
  const int n = params.n, p = params.p, q = params.q, k = params.k;
  if (n < 1 || p < 1 || q < 1 || k < 1)
    throw std::invalid_argument("generate: all dimensions must be positive");
  const auto& cz = params.cutpoints_z;
  if (cz.size() < 2 || !std::isinf(cz.front()) || cz.front() > 0 ||
      !std::isinf(cz.back()) || cz.back() < 0 ||
      !std::is_sorted(cz.begin(), cz.end()))
    throw std::invalid_argument(
        "generate: cutpoints must run increasing from -inf to +inf");
  if (!(params.noise_sd > 0.0))
    throw std::invalid_argument("generate: noise_sd must be positive");

  SyntheticTruth truth;
  truth.g_true = block_design(p, k, k, "the continuous view");
  // the last factor is deliberately private to the continuous view
  truth.h_true = block_design(q, k, std::max(1, k - 1), "the ordinal view");
  if (k == 1) truth.h_true.setZero();
  truth.link_truth =
      ((truth.g_true * truth.h_true.transpose()).array() != 0.0)
          .cast<double>()
          .matrix();

  NormalSampler rng(params.seed);
  truth.u_true.resize(k, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < k; ++i) truth.u_true(i, j) = rng();

  Dataset d;
  d.x = truth.g_true * truth.u_true;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < p; ++i) d.x(i, j) += params.noise_sd * rng();

  Matrix c = truth.h_true * truth.u_true;
  d.z.resize(q, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < q; ++i)
      d.z(i, j) = quantize(c(i, j) + rng(), params.cutpoints_z);

  // labels from the latent process with a linear kernel plus unit diagonal
  Matrix cov = truth.u_true.transpose() * truth.u_true;
  cov.diagonal().array() += 1.0;
  const Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success)
    throw NumericalInconsistency(
        "label covariance failed to factorize during generation");
  Vector eps(n);
  for (int i = 0; i < n; ++i) eps(i) = rng();
  const Vector f = llt.matrixL() * eps;
  d.y = IntVector(n);
  for (int i = 0; i < n; ++i) d.y(i) = f(i) <= 0.0 ? 0 : 1;
  d.y_observed = BoolArray::Constant(n, true);

  return {std::move(d), std::move(truth)};
}

Matrix association_scores(const Matrix& g_mean, const Matrix& h_mean) {
  if (g_mean.cols() != h_mean.cols())
    throw std::invalid_argument(
        "association_scores: factor counts disagree");
  return (g_mean * h_mean.transpose()).cwiseAbs();
}

PRCurve precision_recall(const Matrix& scores, const Matrix& truth,
                         int num_thresholds) {
  if (scores.rows() != truth.rows() || scores.cols() != truth.cols())
    throw std::invalid_argument("precision_recall: shape mismatch");
  if (num_thresholds < 2)
    throw std::invalid_argument(
        "precision_recall: need at least two thresholds");
  const Eigen::Index total = scores.size();
  int positives = 0;
  for (Eigen::Index i = 0; i < total; ++i) {
    const double t = truth(i);
    if (t != 0.0 && t != 1.0)
      throw std::invalid_argument("precision_recall: truth must be 0/1");
    if (t == 1.0) ++positives;
  }
  if (positives == 0)
    throw std::invalid_argument(
        "precision_recall: truth has no positives, recall is undefined");

  std::vector<double> sorted(scores.data(), scores.data() + total);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> thresholds;
  thresholds.reserve(num_thresholds);
  for (int t = 0; t < num_thresholds; ++t) {
    const double frac = static_cast<double>(t) / (num_thresholds - 1);
    const auto idx = static_cast<Eigen::Index>(
        std::llround(frac * static_cast<double>(total - 1)));
    thresholds.push_back(sorted[idx]);
  }
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  PRCurve curve;
  double prev_recall = 0.0;
  for (const double th : thresholds) {
    int tp = 0, fp = 0;
    for (Eigen::Index i = 0; i < total; ++i) {
      if (scores(i) >= th) {
        if (truth(i) == 1.0)
          ++tp;
        else
          ++fp;
      }
    }
    const double precision = (tp + fp) > 0
                                 ? static_cast<double>(tp) / (tp + fp)
                                 : 1.0;
    const double recall = static_cast<double>(tp) / positives;
    curve.points.push_back({th, precision, recall});
    curve.aupr += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return curve;
}

double accuracy(const IntVector& y_pred, const IntVector& y_true,
                const BoolArray& mask) {
  if (y_pred.size() != y_true.size() || mask.size() != y_true.size())
    throw std::invalid_argument("accuracy: length mismatch");
  int used = 0, hit = 0;
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    if (!mask(i)) continue;
    ++used;
    if (y_pred(i) == y_true(i)) ++hit;
  }
  if (used == 0)
    throw std::invalid_argument("accuracy: mask selects no entries");
  return static_cast<double>(hit) / used;
}

}  // namespace mvl
