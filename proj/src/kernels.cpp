#include "mvl/kernels.hpp"

#include <cmath>
#include <sstream>

namespace mvl {

namespace {

Matrix gram(const Matrix& u1, const Matrix& u2, const KernelSpec& spec) {
  switch (spec.family) {
    case KernelFamily::Linear:
      return u1.transpose() * u2;
    case KernelFamily::Rbf: {
      // squared distances via the norm expansion; clamp rounding negatives
      const Vector n1 = u1.colwise().squaredNorm().transpose();
      const Vector n2 = u2.colwise().squaredNorm().transpose();
      Matrix d2 = -2.0 * (u1.transpose() * u2);
      d2.rowwise() += n2.transpose();
      d2.colwise() += n1;
      const double s = -0.5 / (spec.lengthscale * spec.lengthscale);
      return (d2.array().max(0.0) * s).exp().matrix();
    }
    case KernelFamily::Polynomial: {
      const Matrix base =
          ((u1.transpose() * u2).array() + spec.offset).matrix();
      return base.array().pow(static_cast<double>(spec.degree)).matrix();
    }
  }
  throw std::logic_error("unknown kernel family");
}

}  // namespace

Matrix kernel_cross(const Matrix& u1, const Matrix& u2,
                    const KernelSpec& spec) {
  spec.validate();
  if (u1.rows() != u2.rows())
    throw std::invalid_argument(
        "kernel_cross: inputs must share the latent dimension");
  return gram(u1, u2, spec);
}

KernelMatrix kernel_matrix(const Matrix& u, const KernelSpec& spec,
                           double jitter) {
  spec.validate();
  if (!(jitter > 0.0))
    throw std::invalid_argument("kernel_matrix: jitter must be positive");
  const int n = static_cast<int>(u.cols());
  Matrix base = gram(u, u, spec);
  base = 0.5 * (base + base.transpose()).eval();  // enforce exact symmetry

  KernelMatrix km;
  km.spec = spec;
  double eps = jitter;
  for (int attempt = 0; attempt <= 3; ++attempt, eps *= 10.0) {
    km.values = base + eps * Matrix::Identity(n, n);
    km.llt.compute(km.values);
    if (km.llt.info() == Eigen::Success) {
      km.jitter_applied = eps;
      km.log_det =
          2.0 * km.llt.matrixLLT().diagonal().array().log().sum();
      km.inv = km.llt.solve(Matrix::Identity(n, n));
      return km;
    }
  }
  std::ostringstream msg;
  msg << "kernel matrix of size " << n
      << " is not positive definite even with jitter " << eps / 10.0;
  throw IllConditionedKernel(msg.str());
}

Matrix kernel_grad_contract(const Matrix& u, const KernelSpec& spec,
                            const Matrix& w) {
  spec.validate();
  if (w.rows() != u.cols() || w.cols() != u.cols())
    throw std::invalid_argument(
        "kernel_grad_contract: weight matrix must be n x n");
  switch (spec.family) {
    case KernelFamily::Linear:
      return 2.0 * (u * w);
    case KernelFamily::Rbf: {
      const Matrix m = w.cwiseProduct(gram(u, u, spec));
      const Vector rs = m.rowwise().sum();
      const double c = 2.0 / (spec.lengthscale * spec.lengthscale);
      return c * (u * m - u * rs.asDiagonal());
    }
    case KernelFamily::Polynomial: {
      const Matrix base = ((u.transpose() * u).array() + spec.offset).matrix();
      const Matrix ring =
          (static_cast<double>(spec.degree) *
           base.array().pow(static_cast<double>(spec.degree - 1)))
              .matrix();
      return 2.0 * (u * w.cwiseProduct(ring));
    }
  }
  throw std::logic_error("unknown kernel family");
}

}  // namespace mvl
