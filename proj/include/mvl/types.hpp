#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntMatrix = Eigen::MatrixXi;
using IntVector = Eigen::VectorXi;
using BoolArray = Eigen::Array<bool, Eigen::Dynamic, 1>;

// Latent subject features, k x n, column j belongs to subject j.
using LatentFeatures = Matrix;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Kernel matrix could not be factorized even after jitter escalation,
// or produced a non-positive conditional variance.
struct IllConditionedKernel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An internal quantity left its mathematically valid range (e.g. a rate
// or variance went non-positive). Indicates a bug or broken input, not a
// condition callers are expected to recover from.
struct NumericalInconsistency : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class KernelFamily { Linear, Rbf, Polynomial };

struct KernelSpec {
  KernelFamily family = KernelFamily::Linear;
  double lengthscale = 1.0;  // rbf only
  double offset = 1.0;       // polynomial only
  int degree = 2;            // polynomial only

  void validate() const;
};

// Fixed model constants. Cutpoints are full boundary vectors including the
// -inf / +inf sentinels, so R ordinal levels need R+1 entries; level r
// occupies [cutpoints[r], cutpoints[r+1]).
struct Hyperparameters {
  double sigma1_sq = 1.0;   // slab variance
  double sigma2_sq = 1e-6;  // spike variance
  double l1 = 1.0, l2 = 1.0;  // Beta prior over continuous-view selection
  double d1 = 1.0, d2 = 1.0;  // Beta prior over ordinal-view selection
  double r1 = 1e-3, r2 = 1e-3;  // Gamma prior over continuous noise precision
  std::vector<double> cutpoints_z = {-kInf, -1.0, 1.0, kInf};
  std::vector<double> cutpoints_y = {-kInf, -1.0, 1.0, kInf};
  KernelSpec kernel;
  int k = 5;             // latent dimension
  double jitter = 1e-6;  // base diagonal added to kernel matrices

  int levels_z() const { return static_cast<int>(cutpoints_z.size()) - 1; }
  int levels_y() const { return static_cast<int>(cutpoints_y.size()) - 1; }

  void validate() const;
};

// Observed data. x is p x n continuous, z is q x n ordinal with entries in
// [0, levels_z). Labels are optional: y has length n when present (size 0
// otherwise) and y_observed marks which entries carry a real label.
struct Dataset {
  Matrix x;
  IntMatrix z;
  IntVector y;
  BoolArray y_observed;

  int n() const { return static_cast<int>(x.cols()); }
  int p() const { return static_cast<int>(x.rows()); }
  int q() const { return static_cast<int>(z.rows()); }
  bool has_labels() const { return y.size() > 0; }
};

// Throws std::invalid_argument naming the offending entry when shapes or
// value ranges are inconsistent; returns the dataset unchanged otherwise.
Dataset validate_dataset(Dataset d, const Hyperparameters& h);

// Variational posterior over everything except U. Naming: g/h rows carry a
// mean vector and a shared-row covariance; beta/alpha are the slab
// responsibilities; lg/dh are Beta posterior parameters over the selection
// probabilities; c_* hold the ordinal pseudo-observation moments; f_* the
// label-process moments over the leading n_gp subjects.
struct VariationalState {
  // continuous view
  Matrix g_mean;               // p x k
  std::vector<Matrix> g_cov;   // p covariance blocks, each k x k
  Vector g_cov_logdet;         // cached log|cov| per row
  Matrix beta;                 // p x k slab responsibilities
  Matrix lg1, lg2;             // p x k Beta posterior parameters
  Matrix elog_pi_g, elog_1mpi_g;  // cached E[log pi], E[log(1-pi)]

  // ordinal view
  Matrix h_mean;               // q x k
  std::vector<Matrix> h_cov;
  Vector h_cov_logdet;
  Matrix alpha;                // q x k
  Matrix dh1, dh2;
  Matrix elog_pi_h, elog_1mpi_h;
  Matrix c_mean_param;         // q x n latent regression means
  Matrix c_expect;             // q x n first moments
  Matrix c_sq_expect;          // q x n second moments
  Matrix c_logz;               // q x n log interval masses

  // continuous noise precision, Gamma(shape, rate)
  double eta_shape = 1.0;
  double eta_rate = 1.0;

  // label process over the leading n_gp columns
  Vector f_bar;        // leave-one-out conditional means
  Vector f_var;        // leave-one-out conditional variances
  Vector f_expect;     // first moments
  Vector f_sq_expect;  // second moments

  double eta_mean() const { return eta_shape / eta_rate; }
  int n_gp() const { return static_cast<int>(f_expect.size()); }
};

// State with the documented starting values: responsibilities 1/2, row means
// zero, row covariances sigma1_sq * I, Beta parameters at prior + 1/2 pull,
// noise at its prior, label moments zero with unit variance.
VariationalState make_initial_state(int p, int q, int n, int n_gp,
                                    const Hyperparameters& h);

struct FitReport {
  Vector elbo_trace;   // one entry per outer iteration
  bool converged = false;
  int iterations = 0;
  int selected_k = 0;
  double wall_time = 0.0;  // seconds
};

}  // namespace mvl
