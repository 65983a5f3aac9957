#include "mvl/latent_opt.hpp"

#include "mvl/kernels.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace mvl {

namespace {

constexpr double kInfD = std::numeric_limits<double>::infinity();

void check_shapes(const Matrix& u, const MStepMoments& m, const Matrix& x) {
  const int k = static_cast<int>(u.rows());
  const int n = static_cast<int>(u.cols());
  if (m.g_mean.cols() != k || m.h_mean.cols() != k)
    throw std::invalid_argument(
        "M-step moments disagree with u on the latent dimension");
  if (m.gtg.rows() != k || m.gtg.cols() != k || m.hth.rows() != k ||
      m.hth.cols() != k)
    throw std::invalid_argument("second-moment blocks must be k x k");
  if (x.rows() != m.g_mean.rows() || x.cols() != n)
    throw std::invalid_argument("x must be p x n");
  if (m.c_expect.rows() != m.h_mean.rows() || m.c_expect.cols() != n)
    throw std::invalid_argument("c_expect must be q x n");
  if (m.f_outer.size() != 0 &&
      (m.f_outer.rows() != m.f_outer.cols() || m.f_outer.rows() > n))
    throw std::invalid_argument(
        "f_outer must be square over a prefix of the columns");
}

// Shared precomputation: the objective without the label block is
// sum(A .* u) - sum((Q u) .* u)/2 with fixed A (k x n) and Q (k x k).
struct QuadraticPart {
  Matrix a;
  Matrix q;

  QuadraticPart(const MStepMoments& m, const Matrix& x) {
    a = m.eta_mean * (m.g_mean.transpose() * x) +
        m.h_mean.transpose() * m.c_expect;
    q = m.eta_mean * m.gtg + m.hth +
        Matrix::Identity(m.gtg.rows(), m.gtg.cols());
  }
};

// Objective and gradient in one pass; grad may be null. Factorization
// failures inside the label block surface as -inf objective so the line
// search backs away instead of aborting the fit.
double eval_objective(const Matrix& u, const MStepMoments& m,
                      const QuadraticPart& qp, Matrix* grad,
                      bool inf_on_failure) {
  const Matrix qu = qp.q * u;
  double f = u.cwiseProduct(qp.a).sum() - 0.5 * u.cwiseProduct(qu).sum();
  if (grad) *grad = qp.a - qu;

  const int ngp = static_cast<int>(m.f_outer.rows());
  if (ngp > 0) {
    KernelMatrix km;
    try {
      km = kernel_matrix(u.leftCols(ngp), m.kernel, m.jitter);
    } catch (const IllConditionedKernel&) {
      if (!inf_on_failure) throw;
      if (grad) grad->setZero();
      return -kInfD;
    }
    f += -0.5 * km.log_det - 0.5 * km.inv.cwiseProduct(m.f_outer).sum();
    if (grad) {
      const Matrix w = km.inv - km.inv * m.f_outer * km.inv;
      grad->leftCols(ngp) -=
          0.5 * kernel_grad_contract(u.leftCols(ngp), m.kernel, w);
    }
  }
  return f;
}

}  // namespace

double objective_f(const Matrix& u, const MStepMoments& m, const Matrix& x) {
  check_shapes(u, m, x);
  const QuadraticPart qp(m, x);
  return eval_objective(u, m, qp, nullptr, /*inf_on_failure=*/false);
}

Matrix gradient_f(const Matrix& u, const MStepMoments& m, const Matrix& x) {
  check_shapes(u, m, x);
  const QuadraticPart qp(m, x);
  Matrix grad(u.rows(), u.cols());
  eval_objective(u, m, qp, &grad, /*inf_on_failure=*/false);
  return grad;
}

OptimizeResult optimize_u(const Matrix& u0, const MStepMoments& m,
                          const Matrix& x, const OptimizeOptions& opts) {
  check_shapes(u0, m, x);
  const int k = static_cast<int>(u0.rows());
  const int n = static_cast<int>(u0.cols());
  const double gtol =
      opts.gtol > 0.0 ? opts.gtol : 1e-5 * std::sqrt(double(k) * double(n));
  const QuadraticPart qp(m, x);

  // internally a minimization of phi = -objective
  auto eval = [&](const Matrix& u, Matrix& grad) {
    const double f = eval_objective(u, m, qp, &grad, /*inf_on_failure=*/true);
    grad = (-grad).eval();
    return -f;
  };

  OptimizeResult out;
  Matrix u = u0;
  Matrix g(k, n);
  double phi = eval(u, g);
  if (std::isinf(phi)) {
    // cannot even evaluate at the start; report it rather than guess
    out.u = u0;
    out.value = -phi;
    out.line_search_failed = true;
    return out;
  }

  std::vector<Matrix> hist_s, hist_y;
  std::vector<double> hist_rho;
  const double c1 = 1e-4, c2 = 0.9;

  Matrix u_try(k, n), g_try(k, n);

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if (g.norm() <= gtol) break;

    // two-loop recursion for the search direction
    Matrix dir = g;
    const int hsize = static_cast<int>(hist_s.size());
    std::vector<double> coef(hsize);
    for (int i = hsize - 1; i >= 0; --i) {
      coef[i] = hist_rho[i] * hist_s[i].cwiseProduct(dir).sum();
      dir -= coef[i] * hist_y[i];
    }
    if (hsize > 0) {
      const double gamma = hist_s.back().cwiseProduct(hist_y.back()).sum() /
                           hist_y.back().squaredNorm();
      dir *= gamma;
    }
    for (int i = 0; i < hsize; ++i) {
      const double b = hist_rho[i] * hist_y[i].cwiseProduct(dir).sum();
      dir += (coef[i] - b) * hist_s[i];
    }
    dir = -dir;

    double dphi0 = dir.cwiseProduct(g).sum();
    if (dphi0 >= 0.0) {  // curvature went bad; fall back to steepest descent
      dir = -g;
      dphi0 = -g.squaredNorm();
    }

    // strong Wolfe line search (bracket then zoom)
    const double phi0 = phi;
    double alpha = (iter == 0) ? std::min(1.0, 1.0 / g.norm()) : 1.0;
    double alpha_prev = 0.0, phi_prev = phi0, dphi_prev = dphi0;
    double lo = -1.0, hi = -1.0, phi_lo = 0.0, dphi_lo = 0.0, phi_hi = 0.0;
    bool have_bracket = false, accepted = false;
    double phi_try = 0.0, dphi_try = 0.0;
    int evals = 0;

    auto probe = [&](double a) {
      u_try = u + a * dir;
      phi_try = eval(u_try, g_try);
      dphi_try = dir.cwiseProduct(g_try).sum();
      ++evals;
    };

    while (evals < opts.max_line_evals) {
      probe(alpha);
      if (phi_try > phi0 + c1 * alpha * dphi0 ||
          (evals > 1 && phi_try >= phi_prev)) {
        lo = alpha_prev; phi_lo = phi_prev; dphi_lo = dphi_prev;
        hi = alpha; phi_hi = phi_try;
        have_bracket = true;
        break;
      }
      if (std::abs(dphi_try) <= -c2 * dphi0) {
        accepted = true;
        break;
      }
      if (dphi_try >= 0.0) {
        lo = alpha; phi_lo = phi_try; dphi_lo = dphi_try;
        hi = alpha_prev; phi_hi = phi_prev;
        have_bracket = true;
        break;
      }
      alpha_prev = alpha; phi_prev = phi_try; dphi_prev = dphi_try;
      alpha *= 2.0;
    }

    if (have_bracket && !accepted) {
      while (evals < opts.max_line_evals + 30) {
        // quadratic interpolation off the lo end, bisection as fallback
        double cand;
        const double width = hi - lo;
        const double denom = phi_hi - phi_lo - dphi_lo * width;
        if (std::isfinite(denom) && denom != 0.0) {
          cand = lo - 0.5 * dphi_lo * width * width / denom;
          const double lb = std::min(lo, hi), ub = std::max(lo, hi);
          const double margin = 0.1 * std::abs(width);
          if (!(cand > lb + margin && cand < ub - margin))
            cand = 0.5 * (lo + hi);
        } else {
          cand = 0.5 * (lo + hi);
        }
        probe(cand);
        if (phi_try > phi0 + c1 * cand * dphi0 || phi_try >= phi_lo) {
          hi = cand; phi_hi = phi_try;
        } else {
          if (std::abs(dphi_try) <= -c2 * dphi0) {
            alpha = cand;
            accepted = true;
            break;
          }
          if (dphi_try * (hi - lo) >= 0.0) {
            hi = lo; phi_hi = phi_lo;
          }
          lo = cand; phi_lo = phi_try; dphi_lo = dphi_try;
        }
        if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) break;
      }
      if (!accepted && lo > 0.0 && phi_lo < phi0) {
        // Armijo-quality progress without the curvature condition; take it
        probe(lo);
        accepted = true;
        alpha = lo;
      }
    }

    if (!accepted) {
      out.line_search_failed = true;
      break;
    }

    const Matrix step_s = u_try - u;
    const Matrix step_y = g_try - g;
    const double sy = step_s.cwiseProduct(step_y).sum();
    if (sy > 1e-10 * step_s.norm() * step_y.norm()) {
      hist_s.push_back(step_s);
      hist_y.push_back(step_y);
      hist_rho.push_back(1.0 / sy);
      if (static_cast<int>(hist_s.size()) > opts.history) {
        hist_s.erase(hist_s.begin());
        hist_y.erase(hist_y.begin());
        hist_rho.erase(hist_rho.begin());
      }
    }
    u = u_try;
    g = g_try;
    phi = phi_try;
    out.iterations = iter + 1;
  }

  out.u = u;
  out.value = -phi;
  return out;
}

}  // namespace mvl
