#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mvl/io.hpp"
#include "mvl/rng.hpp"
#include "mvl/types.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

using namespace mvl;

namespace {

// scratch directory, wiped per test case
struct Scratch {
  std::filesystem::path dir;
  Scratch() {
    dir = std::filesystem::temp_directory_path() /
          ("mvl_core_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
  }
  ~Scratch() { std::filesystem::remove_all(dir); }
  std::string path(const std::string& name) const {
    return (dir / name).string();
  }
  void put(const std::string& name, const std::string& text) const {
    std::ofstream out(path(name));
    out << text;
  }
};

Dataset small_dataset() {
  Dataset d;
  d.x = Matrix::Zero(2, 3);
  d.x << 0.5, -1.0, 2.0, 1.5, 0.0, -0.25;
  d.z = IntMatrix(2, 3);
  d.z << 0, 1, 2, 2, 0, 1;
  d.y = IntVector(3);
  d.y << 0, 1, 2;
  d.y_observed = BoolArray::Constant(3, true);
  return d;
}

}  // namespace

TEST_CASE("defaults satisfy their own invariants") {
  Hyperparameters h;
  CHECK_NOTHROW(h.validate());
  CHECK(h.levels_z() == 3);
  CHECK(h.levels_y() == 3);
}

TEST_CASE("dataset validation accepts a consistent dataset") {
  const Hyperparameters h;
  CHECK_NOTHROW(validate_dataset(small_dataset(), h));
}

TEST_CASE("dataset validation names the offending entry") {
  const Hyperparameters h;

  Dataset bad_z = small_dataset();
  bad_z.z(1, 2) = 3;  // only levels 0..2 exist
  CHECK_THROWS_WITH_AS(validate_dataset(bad_z, h),
                       doctest::Contains("z(1,2)"), std::invalid_argument);

  Dataset bad_x = small_dataset();
  bad_x.x(0, 1) = std::nan("");
  CHECK_THROWS_WITH_AS(validate_dataset(bad_x, h),
                       doctest::Contains("x(0,1)"), std::invalid_argument);

  Dataset bad_y = small_dataset();
  bad_y.y(2) = -1;
  CHECK_THROWS_WITH_AS(validate_dataset(bad_y, h), doctest::Contains("y(2)"),
                       std::invalid_argument);

  Dataset ragged = small_dataset();
  ragged.z = IntMatrix::Zero(2, 4);
  CHECK_THROWS_WITH_AS(validate_dataset(ragged, h), doctest::Contains("4"),
                       std::invalid_argument);

  Dataset short_y = small_dataset();
  short_y.y = IntVector::Zero(2);
  short_y.y_observed = BoolArray::Constant(2, true);
  CHECK_THROWS_AS(validate_dataset(short_y, h), std::invalid_argument);
}

TEST_CASE("hyperparameter invariants") {
  Hyperparameters h;
  h.sigma2_sq = 2.0;  // spike wider than slab
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);

  h = Hyperparameters{};
  h.cutpoints_z = {-kInf, 1.0, -1.0, kInf};
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);

  h = Hyperparameters{};
  h.cutpoints_y = {-1.0, 1.0};  // missing sentinels
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);

  h = Hyperparameters{};
  h.l1 = 0.0;
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);

  h = Hyperparameters{};
  h.k = 0;
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);

  h = Hyperparameters{};
  h.jitter = 0.0;
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);
}

TEST_CASE("initial variational state carries the documented starting point") {
  Hyperparameters h;
  h.k = 4;
  const auto s = make_initial_state(3, 2, 6, 5, h);
  CHECK(s.g_mean.rows() == 3);
  CHECK(s.g_mean.cols() == 4);
  CHECK(s.g_mean.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.beta.minCoeff() == 0.5);
  CHECK(s.beta.maxCoeff() == 0.5);
  CHECK(s.alpha.minCoeff() == 0.5);
  REQUIRE(s.g_cov.size() == 3);
  CHECK((s.g_cov[0] - h.sigma1_sq * Matrix::Identity(4, 4))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK(s.lg1(0, 0) == h.l1 + 0.5);
  CHECK(s.dh2(1, 3) == h.d2 + 0.5);
  CHECK(s.eta_shape == h.r1);
  CHECK(s.eta_rate == h.r2);
  CHECK(s.n_gp() == 5);
  CHECK(s.f_expect.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.f_sq_expect.minCoeff() == 1.0);
  CHECK(s.c_expect.rows() == 2);
  CHECK(s.c_expect.cols() == 6);
  CHECK(s.eta_mean() == doctest::Approx(h.r1 / h.r2));
}

TEST_CASE("matrix csv round trip is bit exact") {
  Scratch tmp;
  NormalSampler rng(21);
  Matrix m(4, 3);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 4; ++i) m(i, j) = rng() * std::pow(10.0, j - 1);
  m(2, 1) = std::numeric_limits<double>::quiet_NaN();
  write_matrix_csv(tmp.path("m.csv"), m);
  const Matrix back = read_matrix_csv(tmp.path("m.csv"));
  REQUIRE(back.rows() == 4);
  REQUIRE(back.cols() == 3);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 4; ++i) {
      if (i == 2 && j == 1)
        CHECK(std::isnan(back(i, j)));
      else
        CHECK(back(i, j) == m(i, j));
    }
}

TEST_CASE("integer matrix and label round trips") {
  Scratch tmp;
  IntMatrix z(2, 3);
  z << 0, 2, 1, 1, 0, 2;
  write_int_matrix_csv(tmp.path("z.csv"), z);
  CHECK((read_int_matrix_csv(tmp.path("z.csv")) - z).cwiseAbs().maxCoeff() ==
        0);

  IntVector y(4);
  y << 1, 0, 0, 2;
  BoolArray obs(4);
  obs << true, false, true, true;
  write_labels_csv(tmp.path("y.csv"), y, obs);
  IntVector y2;
  BoolArray obs2;
  read_labels_csv(tmp.path("y.csv"), y2, obs2);
  REQUIRE(y2.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(obs2(i) == obs(i));
    if (obs(i)) CHECK(y2(i) == y(i));
  }
}

TEST_CASE("csv parse errors carry file and line") {
  Scratch tmp;
  tmp.put("ragged.csv", "1,2,3\n4,5\n");
  CHECK_THROWS_WITH_AS(read_matrix_csv(tmp.path("ragged.csv")),
                       doctest::Contains("ragged.csv:2"), IoError);

  tmp.put("alpha.csv", "1,2\n3,four\n");
  CHECK_THROWS_WITH_AS(read_matrix_csv(tmp.path("alpha.csv")),
                       doctest::Contains("four"), IoError);

  tmp.put("empty.csv", "\n\n");
  CHECK_THROWS_AS(read_matrix_csv(tmp.path("empty.csv")), IoError);

  CHECK_THROWS_AS(read_matrix_csv(tmp.path("absent.csv")), IoError);

  tmp.put("wide.csv", "1,2\n3,4\n");
  IntVector y;
  BoolArray obs;
  CHECK_THROWS_AS(read_labels_csv(tmp.path("wide.csv"), y, obs), IoError);
}

TEST_CASE("dataset loader ties the three files together") {
  Scratch tmp;
  const Dataset d = small_dataset();
  write_matrix_csv(tmp.path("x.csv"), d.x);
  write_int_matrix_csv(tmp.path("z.csv"), d.z);
  write_labels_csv(tmp.path("y.csv"), d.y, d.y_observed);

  const Dataset full =
      read_dataset(tmp.path("x.csv"), tmp.path("z.csv"), tmp.path("y.csv"));
  CHECK(full.has_labels());
  CHECK(full.n() == 3);
  CHECK((full.x - d.x).cwiseAbs().maxCoeff() == 0.0);

  const Dataset bare = read_dataset(tmp.path("x.csv"), tmp.path("z.csv"));
  CHECK_FALSE(bare.has_labels());
  CHECK(bare.y_observed.size() == 0);
}

TEST_CASE("config round trip is the identity") {
  Scratch tmp;
  FitConfig c;
  c.hyper.sigma1_sq = 2.5;
  c.hyper.sigma2_sq = 1e-7;
  c.hyper.l1 = 0.25;
  c.hyper.r2 = 4e-3;
  c.hyper.cutpoints_z = {-kInf, -0.5, 0.25, 1.5, kInf};
  c.hyper.cutpoints_y = {-kInf, 0.0, kInf};
  c.hyper.kernel.family = KernelFamily::Polynomial;
  c.hyper.kernel.degree = 3;
  c.hyper.kernel.offset = 0.125;
  c.hyper.kernel.lengthscale = 2.0;
  c.hyper.k = 7;
  c.hyper.jitter = 1e-5;
  c.seed = 91;
  c.tol = 2e-6;
  c.max_outer = 55;
  c.f_sweeps = 3;

  write_config(tmp.path("c.txt"), c);
  const FitConfig back = read_config(tmp.path("c.txt"));
  CHECK(back.hyper.sigma1_sq == c.hyper.sigma1_sq);
  CHECK(back.hyper.sigma2_sq == c.hyper.sigma2_sq);
  CHECK(back.hyper.l1 == c.hyper.l1);
  CHECK(back.hyper.r2 == c.hyper.r2);
  CHECK(back.hyper.cutpoints_z == c.hyper.cutpoints_z);
  CHECK(back.hyper.cutpoints_y == c.hyper.cutpoints_y);
  CHECK(back.hyper.kernel.family == KernelFamily::Polynomial);
  CHECK(back.hyper.kernel.degree == 3);
  CHECK(back.hyper.kernel.offset == 0.125);
  CHECK(back.hyper.kernel.lengthscale == 2.0);
  CHECK(back.hyper.k == 7);
  CHECK(back.hyper.jitter == 1e-5);
  CHECK(back.seed == 91);
  CHECK(back.tol == 2e-6);
  CHECK(back.max_outer == 55);
  CHECK(back.f_sweeps == 3);
}

TEST_CASE("partial config only overrides what it mentions") {
  Scratch tmp;
  tmp.put("part.txt",
          "# comment line\n"
          "k = 3\n"
          "cutpoints_y = -inf,0,inf  # binary labels\n");
  FitConfig base;
  base.tol = 7e-4;
  const FitConfig got = read_config(tmp.path("part.txt"), base);
  CHECK(got.hyper.k == 3);
  REQUIRE(got.hyper.cutpoints_y.size() == 3);
  CHECK(got.hyper.cutpoints_y[1] == 0.0);
  CHECK(got.tol == 7e-4);                  // untouched
  CHECK(got.hyper.sigma1_sq == 1.0);       // untouched default
}

TEST_CASE("config errors name the key and line") {
  Scratch tmp;
  tmp.put("bad.txt", "k = 3\nnot_a_key = 1\n");
  CHECK_THROWS_WITH_AS(read_config(tmp.path("bad.txt")),
                       doctest::Contains("not_a_key"), IoError);
  CHECK_THROWS_WITH_AS(read_config(tmp.path("bad.txt")),
                       doctest::Contains("bad.txt:2"), IoError);

  tmp.put("noeq.txt", "just words\n");
  CHECK_THROWS_AS(read_config(tmp.path("noeq.txt")), IoError);

  FitConfig c;
  CHECK_THROWS_AS(apply_config_entry(c, "kernel", "cubic"), IoError);
  CHECK_THROWS_AS(apply_config_entry(c, "tol", "fast"), IoError);
}

TEST_CASE("cutpoint text form") {
  const auto c = parse_cutpoints("-inf,-1,1,inf");
  REQUIRE(c.size() == 4);
  CHECK(std::isinf(c[0]));
  CHECK(c[0] < 0);
  CHECK(c[1] == -1.0);
  CHECK(c[2] == 1.0);
  CHECK(std::isinf(c[3]));
  CHECK(format_cutpoints(c) == "-inf,-1,1,inf");
  CHECK(parse_cutpoints(format_cutpoints({-kInf, 0.375, kInf})) ==
        std::vector<double>{-kInf, 0.375, kInf});
}

TEST_CASE("kernel family names") {
  CHECK(kernel_family_name(KernelFamily::Rbf) == "rbf");
  CHECK(parse_kernel_family("polynomial") == KernelFamily::Polynomial);
  CHECK_THROWS_AS(parse_kernel_family("cubic"), IoError);
}
