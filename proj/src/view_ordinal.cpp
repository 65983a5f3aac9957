#include "mvl/view_ordinal.hpp"

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

void update_c(VariationalState& s, const IntMatrix& z, const Matrix& u,
              const Hyperparameters& h) {
  const int q = static_cast<int>(z.rows());
  const int n = static_cast<int>(z.cols());
  s.c_mean_param = s.h_mean * u;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < q; ++i) {
      const int r = z(i, j);
      const TruncInterval iv{h.cutpoints_z[r], h.cutpoints_z[r + 1]};
      const TruncMoments m =
          trunc_norm_moments(s.c_mean_param(i, j), 1.0, iv);
      s.c_expect(i, j) = m.mean;
      s.c_sq_expect(i, j) = m.second;
      s.c_logz(i, j) = m.log_z;
    }
}

void update_h_rows(VariationalState& s, const Matrix& u,
                   const Hyperparameters& h) {
  const int q = static_cast<int>(s.h_mean.rows());
  const int k = static_cast<int>(u.rows());
  const Matrix uut = u * u.transpose();
  const Matrix uc = u * s.c_expect.transpose();  // column i = U <c_i>
  Matrix prec(k, k);
  for (int i = 0; i < q; ++i) {
    prec = uut;
    for (int j = 0; j < k; ++j)
      prec(j, j) +=
          s.alpha(i, j) / h.sigma1_sq + (1.0 - s.alpha(i, j)) / h.sigma2_sq;
    Eigen::LLT<Matrix> llt(prec);
    if (llt.info() != Eigen::Success)
      throw NumericalInconsistency(
          "row precision for the ordinal view lost positive definiteness");
    s.h_cov[i] = llt.solve(Matrix::Identity(k, k));
    s.h_cov_logdet(i) =
        -2.0 * llt.matrixLLT().diagonal().array().log().sum();
    s.h_mean.row(i) = (s.h_cov[i] * uc.col(i)).transpose();
  }
}

void update_s_h(VariationalState& s, const Hyperparameters& h) {
  const double log_var_ratio = 0.5 * std::log(h.sigma1_sq / h.sigma2_sq);
  const double prec_gap = 1.0 / h.sigma1_sq - 1.0 / h.sigma2_sq;
  const int q = static_cast<int>(s.h_mean.rows());
  const int k = static_cast<int>(s.h_mean.cols());
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < k; ++j) {
      const double h2 =
          s.h_mean(i, j) * s.h_mean(i, j) + s.h_cov[i](j, j);
      const double arg = s.elog_pi_h(i, j) - s.elog_1mpi_h(i, j) -
                         log_var_ratio - 0.5 * h2 * prec_gap;
      s.alpha(i, j) = logistic(arg);
    }
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < k; ++j) {
      const double a = h.d1 + s.alpha(i, j);
      const double b = h.d2 + 1.0 - s.alpha(i, j);
      s.dh1(i, j) = a;
      s.dh2(i, j) = b;
      const double dab = digamma(a + b);
      s.elog_pi_h(i, j) = digamma(a) - dab;
      s.elog_1mpi_h(i, j) = digamma(b) - dab;
    }
}

std::pair<Matrix, Matrix> moments_h(const VariationalState& s) {
  Matrix hth = s.h_mean.transpose() * s.h_mean;
  for (const Matrix& cov : s.h_cov) hth += cov;
  return {s.h_mean, hth};
}

}  // namespace mvl
