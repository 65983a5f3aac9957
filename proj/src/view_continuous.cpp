#include "mvl/view_continuous.hpp"

#include "mvl/special_math.hpp"

#include <cmath>

namespace mvl {

namespace {

double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

void update_g_rows(VariationalState& s, const Matrix& x, const Matrix& u,
                   const Hyperparameters& h) {
  const int p = static_cast<int>(x.rows());
  const int k = static_cast<int>(u.rows());
  const double eta = s.eta_mean();
  const Matrix uut = u * u.transpose();
  const Matrix ux = u * x.transpose();  // column i = U x_i
  Matrix prec(k, k);
  for (int i = 0; i < p; ++i) {
    prec = eta * uut;
    for (int j = 0; j < k; ++j)
      prec(j, j) +=
          s.beta(i, j) / h.sigma1_sq + (1.0 - s.beta(i, j)) / h.sigma2_sq;
    Eigen::LLT<Matrix> llt(prec);
    if (llt.info() != Eigen::Success)
      throw NumericalInconsistency(
          "row precision for the continuous view lost positive definiteness");
    s.g_cov[i] = llt.solve(Matrix::Identity(k, k));
    s.g_cov_logdet(i) =
        -2.0 * llt.matrixLLT().diagonal().array().log().sum();
    s.g_mean.row(i) = (eta * (s.g_cov[i] * ux.col(i))).transpose();
  }
}

void update_s_g(VariationalState& s, const Hyperparameters& h) {
  const double log_var_ratio = 0.5 * std::log(h.sigma1_sq / h.sigma2_sq);
  const double prec_gap = 1.0 / h.sigma1_sq - 1.0 / h.sigma2_sq;
  const int p = static_cast<int>(s.g_mean.rows());
  const int k = static_cast<int>(s.g_mean.cols());
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < k; ++j) {
      const double g2 =
          s.g_mean(i, j) * s.g_mean(i, j) + s.g_cov[i](j, j);
      const double arg = s.elog_pi_g(i, j) - s.elog_1mpi_g(i, j) -
                         log_var_ratio - 0.5 * g2 * prec_gap;
      s.beta(i, j) = logistic(arg);
    }
}

void update_pi_g(VariationalState& s, const Hyperparameters& h) {
  const int p = static_cast<int>(s.beta.rows());
  const int k = static_cast<int>(s.beta.cols());
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < k; ++j) {
      const double a = h.l1 + s.beta(i, j);
      const double b = h.l2 + 1.0 - s.beta(i, j);
      s.lg1(i, j) = a;
      s.lg2(i, j) = b;
      const double dab = digamma(a + b);
      s.elog_pi_g(i, j) = digamma(a) - dab;
      s.elog_1mpi_g(i, j) = digamma(b) - dab;
    }
}

void update_eta(VariationalState& s, const Matrix& x, const Matrix& u,
                double x_sq_norm, const Hyperparameters& h) {
  const auto [gm, gtg] = moments_g(s);
  const double cross = (gm * u).cwiseProduct(x).sum();
  const double quad = (u * u.transpose()).cwiseProduct(gtg).sum();
  const double resid = x_sq_norm - 2.0 * cross + quad;
  s.eta_shape = h.r1 + 0.5 * static_cast<double>(x.rows() * x.cols());
  s.eta_rate = h.r2 + 0.5 * resid;
  if (!(s.eta_rate > 0.0))
    throw NumericalInconsistency(
        "noise precision rate went non-positive; expected residual lost "
        "positivity");
}

std::pair<Matrix, Matrix> moments_g(const VariationalState& s) {
  Matrix gtg = s.g_mean.transpose() * s.g_mean;
  for (const Matrix& cov : s.g_cov) gtg += cov;
  return {s.g_mean, gtg};
}

}  // namespace mvl
