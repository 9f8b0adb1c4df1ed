#include "stochlog/normal.hpp"

#include <cmath>
#include <numbers>

namespace stochlog::normal {

namespace {
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2 pi))
}

double log_pdf(double mean, double variance, double x) {
  const double d = x - mean;
  return -0.5 * d * d / variance - 0.5 * std::log(variance) - kLogSqrt2Pi;
}

double pdf(double mean, double variance, double x) { return std::exp(log_pdf(mean, variance, x)); }

double cdf(double mean, double variance, double x) {
  const double z = (x - mean) / std::sqrt(variance);
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double log_std_cdf(double z) {
  if (z > 0.0) return std::log1p(-0.5 * std::erfc(z / std::numbers::sqrt2));
  if (z > -30.0) return std::log(0.5 * std::erfc(-z / std::numbers::sqrt2));
  // Asymptotic expansion of the Mills ratio; truncation error < 1e-12 here.
  const double r = 1.0 / (z * z);
  const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
  return -0.5 * z * z - std::log(-z) - kLogSqrt2Pi + std::log(series);
}

double log_cdf(double mean, double variance, double x) {
  return log_std_cdf((x - mean) / std::sqrt(variance));
}

}  // namespace stochlog::normal
