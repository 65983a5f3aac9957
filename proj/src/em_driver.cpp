#include "mvl/em_driver.hpp"

#include "mvl/kernels.hpp"
#include "mvl/labels_gp.hpp"
#include "mvl/rng.hpp"
#include "mvl/special_math.hpp"
#include "mvl/view_continuous.hpp"
#include "mvl/view_ordinal.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

namespace mvl {

namespace {

constexpr double kLog2Pi = 1.83787706640934548;

MStepMoments gather_moments(const VariationalState& s,
                            const Hyperparameters& h, int n_gp) {
  MStepMoments m;
  m.eta_mean = s.eta_mean();
  std::tie(m.g_mean, m.gtg) = moments_g(s);
  std::tie(m.h_mean, m.hth) = moments_h(s);
  m.c_expect = s.c_expect;
  if (n_gp > 0) m.f_outer = f_moments(s).second;
  m.kernel = h.kernel;
  m.jitter = h.jitter;
  return m;
}

// spike-and-slab expected log density plus selector and Beta terms, shared
// by both views
double sparse_prior_terms(const Matrix& mean, const std::vector<Matrix>& cov,
                          const Matrix& resp, const Matrix& elog,
                          const Matrix& elog1m, double b1, double b2,
                          const Hyperparameters& h) {
  const double c_slab = -0.5 * (kLog2Pi + std::log(h.sigma1_sq));
  const double c_spike = -0.5 * (kLog2Pi + std::log(h.sigma2_sq));
  const double lb = log_beta_fn(b1, b2);
  double acc = 0.0;
  const int rows = static_cast<int>(mean.rows());
  const int k = static_cast<int>(mean.cols());
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < k; ++j) {
      const double m2 = mean(i, j) * mean(i, j) + cov[i](j, j);
      const double r = resp(i, j);
      acc += r * (c_slab - 0.5 * m2 / h.sigma1_sq) +
             (1.0 - r) * (c_spike - 0.5 * m2 / h.sigma2_sq);
      acc += r * elog(i, j) + (1.0 - r) * elog1m(i, j);
      acc += (b1 - 1.0) * elog(i, j) + (b2 - 1.0) * elog1m(i, j) - lb;
    }
  return acc;
}

double row_entropies(const Vector& logdet, const Matrix& resp,
                     const Matrix& p1, const Matrix& p2) {
  const int rows = static_cast<int>(resp.rows());
  const int k = static_cast<int>(resp.cols());
  double acc = 0.0;
  for (int i = 0; i < rows; ++i) {
    acc += 0.5 * (k * (1.0 + kLog2Pi) + logdet(i));
    for (int j = 0; j < k; ++j) {
      acc += bernoulli_entropy(resp(i, j));
      acc += beta_entropy(p1(i, j), p2(i, j));
    }
  }
  return acc;
}

}  // namespace

double elbo(const VariationalState& s, const Matrix& u, const Dataset& d,
            const Hyperparameters& h) {
  const int n = d.n(), p = d.p(), q = d.q();
  const int k = static_cast<int>(u.rows());
  const int ngp = s.n_gp();
  const double eta = s.eta_mean();
  const double elog_eta = digamma(s.eta_shape) - std::log(s.eta_rate);
  const Matrix uut = u * u.transpose();

  double L = 0.0;

  // continuous data term
  const auto [gm, gtg] = moments_g(s);
  const double resid_x = d.x.squaredNorm() -
                         2.0 * (gm * u).cwiseProduct(d.x).sum() +
                         uut.cwiseProduct(gtg).sum();
  L += 0.5 * double(n) * p * (elog_eta - kLog2Pi) - 0.5 * eta * resid_x;

  // ordinal data term (unit noise around the latent regression)
  const auto [hm, hth] = moments_h(s);
  const double resid_c = s.c_sq_expect.sum() -
                         2.0 * (hm * u).cwiseProduct(s.c_expect).sum() +
                         uut.cwiseProduct(hth).sum();
  L += -0.5 * double(q) * n * kLog2Pi - 0.5 * resid_c;

  // sparse loading priors, selector priors, Beta priors
  L += sparse_prior_terms(s.g_mean, s.g_cov, s.beta, s.elog_pi_g,
                          s.elog_1mpi_g, h.l1, h.l2, h);
  L += sparse_prior_terms(s.h_mean, s.h_cov, s.alpha, s.elog_pi_h,
                          s.elog_1mpi_h, h.d1, h.d2, h);

  // noise precision prior
  L += h.r1 * std::log(h.r2) - std::lgamma(h.r1) + (h.r1 - 1.0) * elog_eta -
       h.r2 * eta;

  // label-process prior over the leading block
  if (ngp > 0) {
    const KernelMatrix km = kernel_matrix(u.leftCols(ngp), h.kernel, h.jitter);
    const Matrix fft = f_moments(s).second;
    L += -0.5 * double(ngp) * kLog2Pi - 0.5 * km.log_det -
         0.5 * km.inv.cwiseProduct(fft).sum();
  }

  // latent feature prior
  L += -0.5 * double(k) * n * kLog2Pi - 0.5 * u.squaredNorm();

  // entropies
  L += row_entropies(s.g_cov_logdet, s.beta, s.lg1, s.lg2);
  L += row_entropies(s.h_cov_logdet, s.alpha, s.dh1, s.dh2);
  L += gamma_entropy(s.eta_shape, s.eta_rate);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < q; ++i) {
      const TruncMoments tm{s.c_expect(i, j), s.c_sq_expect(i, j),
                            s.c_logz(i, j)};
      L += trunc_norm_entropy(s.c_mean_param(i, j), 1.0, tm);
    }
  for (int i = 0; i < ngp; ++i) {
    double logz = 0.0;
    if (d.has_labels() && d.y_observed(i)) {
      const int r = d.y(i);
      logz = log_interval_prob(s.f_bar(i), std::sqrt(s.f_var(i)),
                               {h.cutpoints_y[r], h.cutpoints_y[r + 1]});
    }
    const double central = (s.f_sq_expect(i) - 2.0 * s.f_bar(i) * s.f_expect(i) +
                            s.f_bar(i) * s.f_bar(i)) /
                           s.f_var(i);
    L += 0.5 * (kLog2Pi + std::log(s.f_var(i))) + logz + 0.5 * central;
  }
  return L;
}

FitResult fit(const Dataset& d_in, const Hyperparameters& h,
              const FitOptions& opts) {
  const auto t_start = std::chrono::steady_clock::now();
  const Dataset d = validate_dataset(d_in, h);
  const int n = d.n(), p = d.p(), q = d.q(), k = h.k;

  int n_gp = opts.gp_columns;
  if (n_gp < 0) n_gp = n;
  if (n_gp > n)
    throw std::invalid_argument("gp_columns exceeds the number of subjects");
  if (d.has_labels())
    for (int j = n_gp; j < n; ++j)
      if (d.y_observed(j))
        throw std::invalid_argument(
            "labeled subject outside the label-process block");
  if (opts.f_sweeps < 1)
    throw std::invalid_argument("f_sweeps must be at least 1");
  if (opts.max_outer < 1)
    throw std::invalid_argument("max_outer must be at least 1");

  VariationalState s;
  if (opts.state0) {
    s = *opts.state0;
    if (s.g_mean.rows() != p || s.h_mean.rows() != q ||
        s.c_expect.cols() != n || s.g_mean.cols() != k ||
        s.h_mean.cols() != k || s.n_gp() != n_gp)
      throw std::invalid_argument(
          "state0 shape does not match the data, latent dimension, or "
          "label-process block");
  } else {
    s = make_initial_state(p, q, n, n_gp, h);
  }

  Matrix u(k, n);
  if (opts.u0) {
    if (opts.u0->rows() != k || opts.u0->cols() != n)
      throw std::invalid_argument("u0 must be k x n");
    u = *opts.u0;
  } else {
    NormalSampler rng(opts.seed);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < k; ++i) u(i, j) = 0.1 * rng();
  }

  const IntVector y_block =
      d.has_labels() ? IntVector(d.y.head(n_gp)) : IntVector();
  const BoolArray mask_block =
      d.has_labels() ? BoolArray(d.y_observed.head(n_gp)) : BoolArray();

  const double x_sq = d.x.squaredNorm();
  Vector trace(opts.max_outer);
  FitResult out;
  out.report.converged = false;
  int iters = 0, streak = 0;
  double prev = std::numeric_limits<double>::quiet_NaN();

  for (int t = 0; t < opts.max_outer; ++t) {
    update_g_rows(s, d.x, u, h);
    update_s_g(s, h);
    update_pi_g(s, h);
    update_eta(s, d.x, u, x_sq, h);

    update_c(s, d.z, u, h);
    update_h_rows(s, u, h);
    update_s_h(s, h);

    if (n_gp > 0) {
      const KernelMatrix km = kernel_matrix(u.leftCols(n_gp), h.kernel,
                                            h.jitter);
      for (int sweep = 0; sweep < opts.f_sweeps; ++sweep)
        update_f_sweep(s, y_block, mask_block, h.cutpoints_y, km);
    }

    const MStepMoments mm = gather_moments(s, h, n_gp);
    OptimizeResult step = optimize_u(u, mm, d.x, opts.mstep);
    u = std::move(step.u);

    const double e = elbo(s, u, d, h);
    trace(t) = e;
    iters = t + 1;
    if (opts.verbose)
      std::fprintf(stderr, "iter=%d elbo=%.10g delta=%.10g\n", t + 1, e,
                   e - prev);
    if (t > 0) {
      const double rel = std::abs(e - prev) / (1.0 + std::abs(e));
      streak = rel < opts.tol ? streak + 1 : 0;
      if (streak >= 2) {
        out.report.converged = true;
        break;
      }
    }
    prev = e;
  }

  out.u = std::move(u);
  out.state = std::move(s);
  out.report.elbo_trace = trace.head(iters);
  out.report.iterations = iters;
  out.report.selected_k = k;
  out.report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return out;
}

SelectKResult select_k(const Dataset& d, const Hyperparameters& base,
                       const std::vector<int>& candidates,
                       const FitOptions& opts) {
  if (candidates.empty())
    throw std::invalid_argument("select_k needs at least one candidate");
  SelectKResult out;
  double best = -std::numeric_limits<double>::infinity();
  for (const int k : candidates) {
    Hyperparameters h = base;
    h.k = k;
    const FitResult r = fit(d, h, opts);
    const double e = r.report.elbo_trace(r.report.iterations - 1);
    out.objective_by_k.emplace_back(k, e);
    if (e > best || (e == best && k < out.best_k)) {
      best = e;
      out.best_k = k;
    }
  }
  return out;
}

}  // namespace mvl
