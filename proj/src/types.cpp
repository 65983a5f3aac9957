#include "mvl/types.hpp"

#include "mvl/special_math.hpp"

#include <cmath>
#include <sstream>

namespace mvl {

namespace {

void check_cutpoints(const std::vector<double>& c, const char* name) {
  if (c.size() < 2)
    throw std::invalid_argument(std::string(name) +
                                " needs at least two boundaries");
  if (!(std::isinf(c.front()) && c.front() < 0.0))
    throw std::invalid_argument(std::string(name) + " must start at -inf");
  if (!(std::isinf(c.back()) && c.back() > 0.0))
    throw std::invalid_argument(std::string(name) + " must end at +inf");
  for (size_t i = 1; i < c.size(); ++i) {
    if (std::isnan(c[i]) || !(c[i - 1] < c[i]))
      throw std::invalid_argument(std::string(name) +
                                  " must be strictly increasing");
  }
}

}  // namespace

void KernelSpec::validate() const {
  switch (family) {
    case KernelFamily::Linear:
      break;
    case KernelFamily::Rbf:
      if (!(lengthscale > 0.0) || !std::isfinite(lengthscale))
        throw std::invalid_argument("kernel lengthscale must be positive");
      break;
    case KernelFamily::Polynomial:
      if (degree < 1)
        throw std::invalid_argument("kernel degree must be at least 1");
      if (!(offset >= 0.0) || !std::isfinite(offset))
        throw std::invalid_argument("kernel offset must be non-negative");
      break;
  }
}

void Hyperparameters::validate() const {
  if (!(sigma2_sq > 0.0) || !(sigma1_sq > sigma2_sq))
    throw std::invalid_argument(
        "need slab variance sigma1_sq > spike variance sigma2_sq > 0");
  if (!(l1 > 0.0) || !(l2 > 0.0) || !(d1 > 0.0) || !(d2 > 0.0))
    throw std::invalid_argument("Beta hyperparameters must be positive");
  if (!(r1 > 0.0) || !(r2 > 0.0))
    throw std::invalid_argument("Gamma hyperparameters must be positive");
  if (k < 1) throw std::invalid_argument("latent dimension k must be >= 1");
  if (!(jitter > 0.0) || !std::isfinite(jitter))
    throw std::invalid_argument("jitter must be positive and finite");
  check_cutpoints(cutpoints_z, "cutpoints_z");
  check_cutpoints(cutpoints_y, "cutpoints_y");
  kernel.validate();
}

Dataset validate_dataset(Dataset d, const Hyperparameters& h) {
  h.validate();
  const int n = d.n(), p = d.p(), q = d.q();
  if (p < 1 || n < 1)
    throw std::invalid_argument("x must be a non-empty p x n matrix");
  if (q < 1) throw std::invalid_argument("z must be a non-empty q x n matrix");
  if (d.z.cols() != n) {
    std::ostringstream msg;
    msg << "x has " << n << " columns but z has " << d.z.cols()
        << "; both views must cover the same subjects";
    throw std::invalid_argument(msg.str());
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < p; ++i)
      if (!std::isfinite(d.x(i, j))) {
        std::ostringstream msg;
        msg << "x(" << i << "," << j << ") is not finite";
        throw std::invalid_argument(msg.str());
      }
  const int rz = h.levels_z();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < q; ++i)
      if (d.z(i, j) < 0 || d.z(i, j) >= rz) {
        std::ostringstream msg;
        msg << "z(" << i << "," << j << ") = " << d.z(i, j)
            << " outside the " << rz << " ordinal levels";
        throw std::invalid_argument(msg.str());
      }
  if (d.has_labels()) {
    if (d.y.size() != n) {
      std::ostringstream msg;
      msg << "y has " << d.y.size() << " entries for " << n << " subjects";
      throw std::invalid_argument(msg.str());
    }
    if (d.y_observed.size() != n)
      throw std::invalid_argument("y_observed must match y in length");
    const int ry = h.levels_y();
    for (int j = 0; j < n; ++j)
      if (d.y_observed(j) && (d.y(j) < 0 || d.y(j) >= ry)) {
        std::ostringstream msg;
        msg << "y(" << j << ") = " << d.y(j) << " outside the " << ry
            << " label levels";
        throw std::invalid_argument(msg.str());
      }
  } else if (d.y_observed.size() != 0) {
    throw std::invalid_argument("y_observed given without y");
  }
  return d;
}

VariationalState make_initial_state(int p, int q, int n, int n_gp,
                                    const Hyperparameters& h) {
  VariationalState s;
  const int k = h.k;

  auto init_view = [&](int rows, double b1, double b2, Matrix& mean,
                       std::vector<Matrix>& cov, Vector& cov_logdet,
                       Matrix& resp, Matrix& p1, Matrix& p2, Matrix& elog,
                       Matrix& elog1m) {
    mean = Matrix::Zero(rows, k);
    cov.assign(rows, h.sigma1_sq * Matrix::Identity(k, k));
    cov_logdet = Vector::Constant(rows, k * std::log(h.sigma1_sq));
    resp = Matrix::Constant(rows, k, 0.5);
    p1 = Matrix::Constant(rows, k, b1 + 0.5);
    p2 = Matrix::Constant(rows, k, b2 + 0.5);
    const auto lm = beta_log_moments(b1 + 0.5, b2 + 0.5);
    elog = Matrix::Constant(rows, k, lm.first);
    elog1m = Matrix::Constant(rows, k, lm.second);
  };

  init_view(p, h.l1, h.l2, s.g_mean, s.g_cov, s.g_cov_logdet, s.beta, s.lg1,
            s.lg2, s.elog_pi_g, s.elog_1mpi_g);
  init_view(q, h.d1, h.d2, s.h_mean, s.h_cov, s.h_cov_logdet, s.alpha, s.dh1,
            s.dh2, s.elog_pi_h, s.elog_1mpi_h);

  s.c_mean_param = Matrix::Zero(q, n);
  s.c_expect = Matrix::Zero(q, n);
  s.c_sq_expect = Matrix::Ones(q, n);
  s.c_logz = Matrix::Zero(q, n);

  s.eta_shape = h.r1;
  s.eta_rate = h.r2;

  s.f_bar = Vector::Zero(n_gp);
  s.f_var = Vector::Ones(n_gp);
  s.f_expect = Vector::Zero(n_gp);
  s.f_sq_expect = Vector::Ones(n_gp);
  return s;
}

}  // namespace mvl
