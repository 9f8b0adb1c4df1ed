#pragma once

namespace stochlog::normal {

// Gaussian helpers parametrized by mean and variance.

double pdf(double mean, double variance, double x);
double log_pdf(double mean, double variance, double x);

/// P(N(mean, variance) <= x).
double cdf(double mean, double variance, double x);

/// log P(N(mean, variance) <= x), accurate far into the lower tail.
double log_cdf(double mean, double variance, double x);

/// log Phi(z) for the standard normal.
double log_std_cdf(double z);

}  // namespace stochlog::normal
