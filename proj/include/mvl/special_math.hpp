#pragma once

#include <utility>

namespace mvl {

// Truncation interval; lo < hi, either side may be infinite.
struct TruncInterval {
  double lo;
  double hi;
};

// First and second moments plus log normalizing mass of a Normal(mu, sigma^2)
// restricted to an interval. All three come out of one pass because callers
// almost always need them together.
struct TruncMoments {
  double mean;
  double second;  // E[x^2], not the variance
  double log_z;   // log P(lo < x < hi)
};

// Stable for standardized bounds far into the tails (|bound| up to ~37 and
// beyond); interior cancellation is avoided via the scaled complementary
// error function.
TruncMoments trunc_norm_moments(double mu, double sigma, TruncInterval iv);

double trunc_norm_mean(double mu, double sigma, TruncInterval iv);
double trunc_norm_second_moment(double mu, double sigma, TruncInterval iv);

// log(Phi((hi-mu)/sigma) - Phi((lo-mu)/sigma)) without catastrophic
// cancellation.
double log_interval_prob(double mu, double sigma, TruncInterval iv);

// Differential entropy of the truncated normal with base parameters
// (mu, sigma) and the moments already computed for its interval.
double trunc_norm_entropy(double mu, double sigma, const TruncMoments& m);

// exp(x^2) * erfc(x), computed without overflow for large positive x.
double erfcx(double x);

// Digamma for x > 0, absolute error below 1e-12 over [1e-3, 1e6].
double digamma(double x);

// (E[log p], E[log(1-p)]) under Beta(a, b); both are strictly negative.
std::pair<double, double> beta_log_moments(double a, double b);

double log_beta_fn(double a, double b);

// Entropies of the variational factor families. Bernoulli takes the success
// probability, Beta its two shape parameters, Gamma shape and rate.
double bernoulli_entropy(double p);
double beta_entropy(double a, double b);
double gamma_entropy(double shape, double rate);

}  // namespace mvl
