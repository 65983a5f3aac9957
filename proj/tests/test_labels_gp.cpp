#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mvl/kernels.hpp"
#include "mvl/labels_gp.hpp"
#include "mvl/special_math.hpp"
#include "fixtures.hpp"

#include <cmath>
#include <limits>
#include <vector>

using namespace mvl;
using fixtures::random_matrix;

namespace {

constexpr double kInfD = std::numeric_limits<double>::infinity();

KernelMatrix factorize(const Matrix& values) {
  KernelMatrix km;
  km.values = values;
  km.llt.compute(values);
  REQUIRE(km.llt.info() == Eigen::Success);
  km.inv = km.llt.solve(Matrix::Identity(values.rows(), values.cols()));
  km.log_det = 2.0 * km.llt.matrixLLT().diagonal().array().log().sum();
  return km;
}

// direct leave-one-out conditional by explicit block solve
std::pair<double, double> loo_direct(const Matrix& k, const Vector& f,
                                     int i) {
  const int n = static_cast<int>(k.rows());
  Matrix knn(n - 1, n - 1);
  Vector kin(n - 1), fn(n - 1);
  int a = 0;
  for (int r = 0; r < n; ++r) {
    if (r == i) continue;
    kin(a) = k(i, r);
    fn(a) = f(r);
    int b = 0;
    for (int c = 0; c < n; ++c) {
      if (c == i) continue;
      knn(a, b++) = k(r, c);
    }
    ++a;
  }
  const Vector w = knn.llt().solve(kin);
  return {w.dot(fn), k(i, i) - w.dot(kin)};
}

VariationalState gp_state(int n) {
  Hyperparameters h;
  return make_initial_state(1, 1, n, n, h);
}

}  // namespace

TEST_CASE("single-site sweep on documented cases") {
  Matrix one(1, 1);
  one << 1.0;
  const KernelMatrix km = factorize(one);
  const std::vector<double> cut = {-kInfD, 0.0, kInfD};

  {
    auto s = gp_state(1);
    update_f_sweep(s, IntVector(), BoolArray(), cut, km);
    CHECK(s.f_expect(0) == 0.0);
    CHECK(s.f_bar(0) == 0.0);
    CHECK(s.f_var(0) == doctest::Approx(1.0));
    CHECK(s.f_sq_expect(0) == doctest::Approx(1.0));
  }
  {
    auto s = gp_state(1);
    IntVector y(1);
    y << 1;  // the positive region (0, inf)
    BoolArray obs = BoolArray::Constant(1, true);
    update_f_sweep(s, y, obs, cut, km);
    CHECK(s.f_expect(0) == doctest::Approx(0.7978845608).epsilon(1e-9));
    CHECK(s.f_sq_expect(0) == doctest::Approx(1.0).epsilon(1e-12));
    const auto [fe, fft] = f_moments(s);
    CHECK(fft.rows() == 1);
    CHECK(fft(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("identity kernel decouples the sites") {
  const KernelMatrix km = factorize(Matrix::Identity(3, 3));
  const std::vector<double> cut = {-kInfD, -1.0, 1.0, kInfD};
  auto s = gp_state(3);
  IntVector y(3);
  y << 0, 1, 2;
  BoolArray obs = BoolArray::Constant(3, true);
  update_f_sweep(s, y, obs, cut, km);
  for (int i = 0; i < 3; ++i) {
    CHECK(s.f_bar(i) == doctest::Approx(0.0));
    CHECK(s.f_var(i) == doctest::Approx(1.0));
    const auto want =
        trunc_norm_moments(0.0, 1.0, {cut[y(i)], cut[y(i) + 1]});
    CHECK(s.f_expect(i) == doctest::Approx(want.mean).epsilon(1e-12));
    CHECK(s.f_sq_expect(i) == doctest::Approx(want.second).epsilon(1e-12));
  }
}

TEST_CASE("incremental conditionals equal direct block solves") {
  NormalSampler rng(51);
  const int n = 10;
  const Matrix u = random_matrix(3, n, rng);
  KernelSpec spec;
  spec.family = KernelFamily::Rbf;
  spec.lengthscale = 1.4;
  const KernelMatrix km = kernel_matrix(u, spec, 1e-6);
  const std::vector<double> cut = {-kInfD, -1.0, 1.0, kInfD};

  IntVector y(n);
  BoolArray obs(n);
  for (int i = 0; i < n; ++i) {
    y(i) = static_cast<int>(rng.uniform() * 3);
    obs(i) = rng.uniform() < 0.7;
  }

  auto s = gp_state(n);
  for (int i = 0; i < n; ++i) s.f_expect(i) = rng();
  auto mirror = s;

  update_f_sweep(s, y, obs, cut, km);

  // replay the sweep against the explicit O(n^4) construction
  Vector f = mirror.f_expect;
  for (int i = 0; i < n; ++i) {
    const auto [mean, var] = loo_direct(km.values, f, i);
    CHECK(s.f_bar(i) == doctest::Approx(mean).epsilon(1e-9));
    CHECK(s.f_var(i) == doctest::Approx(var).epsilon(1e-9));
    if (obs(i)) {
      const auto m =
          trunc_norm_moments(mean, std::sqrt(var), {cut[y(i)], cut[y(i) + 1]});
      f(i) = m.mean;
    } else {
      f(i) = mean;
    }
    CHECK(s.f_expect(i) == doctest::Approx(f(i)).epsilon(1e-9));
  }
}

TEST_CASE("repeated sweeps settle on random instances") {
  NormalSampler rng(52);
  const std::vector<double> cut = {-kInfD, -1.0, 1.0, kInfD};
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 20;
    // 3-4 latent dims keep random points separated; nearly coincident
    // points give correlations ~1 and arbitrarily slow coordinate sweeps
    const Matrix u = random_matrix(3 + trial % 2, n, rng);
    KernelSpec spec;
    spec.family =
        (trial % 2 == 0) ? KernelFamily::Rbf : KernelFamily::Linear;
    spec.lengthscale = 0.7;
    const KernelMatrix km = kernel_matrix(u, spec, 1e-6);
    IntVector y(n);
    BoolArray obs(n);
    for (int i = 0; i < n; ++i) {
      y(i) = static_cast<int>(rng.uniform() * 3);
      obs(i) = rng.uniform() < 0.8;
    }
    auto s = gp_state(n);
    double delta = kInfD;
    int sweeps = 0;
    while (delta >= 1e-8 && sweeps < 100) {
      const Vector before = s.f_expect;
      update_f_sweep(s, y, obs, cut, km);
      delta = (s.f_expect - before).cwiseAbs().maxCoeff();
      ++sweeps;
    }
    CHECK(sweeps < 100);

    // converged state respects the truncation geometry
    for (int i = 0; i < n; ++i) {
      if (obs(i)) {
        CHECK(s.f_expect(i) > cut[y(i)]);
        CHECK(s.f_expect(i) < cut[y(i) + 1]);
      }
      CHECK(s.f_sq_expect(i) >= s.f_expect(i) * s.f_expect(i) - 1e-12);
    }
    const auto [fe, fft] = f_moments(s);
    CHECK((fft.diagonal() - s.f_sq_expect).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(fft);
    CHECK(eig.eigenvalues().minCoeff() > -1e-10);
  }
}

TEST_CASE("masked labels leave the zero state fixed") {
  NormalSampler rng(53);
  const int n = 6;
  const Matrix u = random_matrix(2, n, rng);
  KernelSpec spec;
  spec.family = KernelFamily::Rbf;
  const KernelMatrix km = kernel_matrix(u, spec, 1e-6);
  auto s = gp_state(n);
  IntVector y = IntVector::Zero(n);
  BoolArray obs = BoolArray::Constant(n, false);
  update_f_sweep(s, y, obs, {-kInfD, 0.0, kInfD}, km);
  CHECK(s.f_expect.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.f_bar.cwiseAbs().maxCoeff() == 0.0);

  const auto fft = f_moments(s).second;
  // with <f> = 0 the outer product is the diagonal of conditional seconds
  CHECK((fft.diagonal().array() > 0.0).all());
}

TEST_CASE("all unlabeled with identity kernel gives the identity moments") {
  const KernelMatrix km = factorize(Matrix::Identity(4, 4));
  auto s = gp_state(4);
  update_f_sweep(s, IntVector(), BoolArray(), {-kInfD, 0.0, kInfD}, km);
  const auto fft = f_moments(s).second;
  CHECK((fft - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("label block shape errors") {
  const KernelMatrix km = factorize(Matrix::Identity(3, 3));
  auto s = gp_state(4);  // mismatched block
  CHECK_THROWS_AS(
      update_f_sweep(s, IntVector(), BoolArray(), {-kInfD, 0.0, kInfD}, km),
      std::invalid_argument);

  auto s3 = gp_state(3);
  IntVector y(2);
  y << 0, 1;
  BoolArray obs = BoolArray::Constant(2, true);
  CHECK_THROWS_AS(update_f_sweep(s3, y, obs, {-kInfD, 0.0, kInfD}, km),
                  std::invalid_argument);
}
