#include "mvl/special_math.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mvl {

namespace {

constexpr double kInfD = std::numeric_limits<double>::infinity();
constexpr double kInvSqrt2 = 0.70710678118654752;
constexpr double kSqrtPi = 1.77245385090551603;
constexpr double kSqrt2OverPi = 0.79788456080286536;
constexpr double kInvSqrt2Pi = 0.39894228040143268;
constexpr double kLog2Pi = 1.83787706640934548;
constexpr double kLn2 = 0.69314718055994531;

double phi(double t) {
  return std::isinf(t) ? 0.0 : kInvSqrt2Pi * std::exp(-0.5 * t * t);
}

struct StdMoments {
  double m1, m2, logz;
};

// Intervals this short get a midpoint expansion; the general formulas lose
// all digits to cancellation here.
constexpr double kNarrow = 1e-5;

StdMoments narrow_interval(double a, double b) {
  const double c = 0.5 * (a + b);
  const double w = b - a;
  const double w2 = w * w, c2 = c * c;
  StdMoments r;
  r.m1 = c * (1.0 - w2 / 12.0);
  r.m2 = c2 + w2 / 12.0 - c2 * w2 / 6.0;
  r.logz = std::log(w) - 0.5 * c2 - 0.5 * kLog2Pi +
           std::log1p((c2 - 1.0) * w2 / 24.0);
  return r;
}

// Standard-normal moments on (a, b). Strategy: reflect so the interval sits
// on the non-negative side whenever it does not straddle zero, then work in
// erfcx terms so tail masses never underflow against each other.
StdMoments std_moments(double a, double b) {
  const bool a_inf = std::isinf(a) && a < 0.0;
  const bool b_inf = std::isinf(b) && b > 0.0;
  if (a_inf && b_inf) return {0.0, 1.0, 0.0};
  if (b <= 0.0) {
    const StdMoments m = std_moments(-b, -a);
    return {-m.m1, m.m2, m.logz};
  }
  if (a >= 0.0) {
    if (!b_inf && b - a < kNarrow) return narrow_interval(a, b);
    // delta = (b^2 - a^2)/2, factored to avoid overflow until truly needed
    const double delta = b_inf ? kInfD : 0.5 * (b - a) * (b + a);
    const double edelta = std::isinf(delta) ? 0.0 : std::exp(-delta);
    const double tail_b =
        b_inf ? 0.0 : erfcx(b * kInvSqrt2) * edelta;
    const double d = erfcx(a * kInvSqrt2) - tail_b;
    const double bterm = b_inf ? 0.0 : b * edelta;
    StdMoments r;
    r.m1 = kSqrt2OverPi *
           (std::isinf(delta) ? 1.0 : -std::expm1(-delta)) / d;
    r.m2 = 1.0 + kSqrt2OverPi * (a - bterm) / d;
    r.logz = -0.5 * a * a + std::log(d) - kLn2;
    return r;
  }
  // a < 0 < b: the mass is order one, plain erf arithmetic is exact enough
  if (!a_inf && !b_inf && b - a < kNarrow) return narrow_interval(a, b);
  const double z = 0.5 * ((b_inf ? 1.0 : std::erf(b * kInvSqrt2)) +
                          (a_inf ? 1.0 : std::erf(-a * kInvSqrt2)));
  const double pa = phi(a), pb = phi(b);
  const double apa = a_inf ? 0.0 : a * pa;
  const double bpb = b_inf ? 0.0 : b * pb;
  return {(pa - pb) / z, 1.0 + (apa - bpb) / z, std::log(z)};
}

void check_args(double mu, double sigma, TruncInterval iv, const char* who) {
  if (!std::isfinite(mu))
    throw std::invalid_argument(std::string(who) + ": mu must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument(std::string(who) +
                                ": sigma must be positive and finite");
  if (!(iv.lo < iv.hi) || std::isnan(iv.lo) || std::isnan(iv.hi))
    throw std::invalid_argument(std::string(who) +
                                ": interval requires lo < hi");
}

}  // namespace

double erfcx(double x) {
  if (x <= 26.0) return std::exp(x * x) * std::erfc(x);
  // asymptotic series; truncation error is far below double precision here
  const double ix2 = 1.0 / (2.0 * x * x);
  double term = 1.0, sum = 1.0;
  for (int m = 1; m <= 8; ++m) {
    term *= -(2 * m - 1) * ix2;
    sum += term;
  }
  return sum / (x * kSqrtPi);
}

TruncMoments trunc_norm_moments(double mu, double sigma, TruncInterval iv) {
  check_args(mu, sigma, iv, "trunc_norm_moments");
  const double a = (iv.lo - mu) / sigma;
  const double b = (iv.hi - mu) / sigma;
  const StdMoments m = std_moments(a, b);

  TruncMoments out;
  out.mean = mu + sigma * m.m1;
  // keep the mean strictly interior; extreme tails can round onto a bound
  if (out.mean <= iv.lo) out.mean = std::nextafter(iv.lo, kInfD);
  if (out.mean >= iv.hi) out.mean = std::nextafter(iv.hi, -kInfD);
  out.second = mu * mu + 2.0 * mu * sigma * m.m1 + sigma * sigma * m.m2;
  if (out.second < out.mean * out.mean) out.second = out.mean * out.mean;
  out.log_z = m.logz;
  return out;
}

double trunc_norm_mean(double mu, double sigma, TruncInterval iv) {
  return trunc_norm_moments(mu, sigma, iv).mean;
}

double trunc_norm_second_moment(double mu, double sigma, TruncInterval iv) {
  return trunc_norm_moments(mu, sigma, iv).second;
}

double log_interval_prob(double mu, double sigma, TruncInterval iv) {
  check_args(mu, sigma, iv, "log_interval_prob");
  const double a = (iv.lo - mu) / sigma;
  const double b = (iv.hi - mu) / sigma;
  return std_moments(a, b).logz;
}

double trunc_norm_entropy(double mu, double sigma, const TruncMoments& m) {
  const double central =
      (m.second - 2.0 * mu * m.mean + mu * mu) / (sigma * sigma);
  return 0.5 * kLog2Pi + std::log(sigma) + m.log_z + 0.5 * central;
}

double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::invalid_argument("digamma: x must be positive and finite");
  double acc = 0.0;
  while (x < 8.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double v = inv * inv;
  // ln x - 1/(2x) - sum B_{2m}/(2m x^{2m}), Horner over 1/x^2
  const double series =
      v * (1.0 / 12.0 -
      v * (1.0 / 120.0 -
      v * (1.0 / 252.0 -
      v * (1.0 / 240.0 -
      v * (1.0 / 132.0 -
      v * (691.0 / 32760.0 -
      v * (1.0 / 12.0)))))));
  return acc + std::log(x) - 0.5 * inv - series;
}

std::pair<double, double> beta_log_moments(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument(
        "beta_log_moments: parameters must be positive and finite");
  const double dab = digamma(a + b);
  return {digamma(a) - dab, digamma(b) - dab};
}

double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double bernoulli_entropy(double p) {
  if (!(p >= 0.0) || !(p <= 1.0))
    throw std::invalid_argument("bernoulli_entropy: p must lie in [0, 1]");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
  return h;
}

double beta_entropy(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("beta_entropy: parameters must be positive");
  return log_beta_fn(a, b) - (a - 1.0) * digamma(a) - (b - 1.0) * digamma(b) +
         (a + b - 2.0) * digamma(a + b);
}

double gamma_entropy(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("gamma_entropy: parameters must be positive");
  return shape - std::log(rate) + std::lgamma(shape) +
         (1.0 - shape) * digamma(shape);
}

}  // namespace mvl
