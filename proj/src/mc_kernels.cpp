#include "stochlog/mc_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace stochlog {

EulerGaussian euler_gaussian(const Params& p, double x, double delta) {
  if (!(x > 0.0) || !(delta > 0.0)) throw ConfigError("euler_gaussian: need x > 0 and delta > 0");
  return euler_gaussian(LogisticCoefficients{p}, x, delta);
}

namespace detail {

LogMean log_mean_exp(std::span<const double> logs) {
  double top = kNegInf;
  for (double l : logs) {
    if (std::isnan(l)) throw NumericalError("NaN log-weight in kernel estimator");
    top = std::max(top, l);
  }
  if (top == kNegInf || logs.empty()) return {0.0, 0};
  std::vector<double> terms(logs.size());
  std::size_t underflow = 0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    terms[i] = std::exp(logs[i] - top);
    if (terms[i] == 0.0 && logs[i] != kNegInf) ++underflow;
  }
  const double mean = pairwise_sum(terms) / static_cast<double>(logs.size());
  return {std::exp(top + std::log(mean)), underflow};
}

}  // namespace detail

double silverman_bandwidth(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n == 0) throw ConfigError("silverman_bandwidth: empty sample");
  double mean = 0.0;
  for (double v : sample) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : sample) ss += (v - mean) * (v - mean);
  const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;

  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, n - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  // Degenerate samples (one survivor, ties): fall back to a tenth of the level.
  if (!(spread > 0.0)) spread = 0.1 * std::max(std::abs(mean), 1e-12);
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

double reflected_kde(std::span<const double> sample, double bandwidth, double y) {
  if (!(bandwidth > 0.0)) throw ConfigError("reflected_kde: bandwidth must be > 0");
  if (sample.empty()) return 0.0;
  const double norm = 1.0 / (bandwidth * std::sqrt(2.0 * std::numbers::pi));
  std::vector<double> terms(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double u = (y - sample[i]) / bandwidth;
    const double v = (y + sample[i]) / bandwidth;
    terms[i] = std::exp(-0.5 * u * u) + std::exp(-0.5 * v * v);
  }
  return norm * pairwise_sum(terms) / static_cast<double>(sample.size());
}

KernelEstimate pedersen_density(const Params& p, double x, double y, const McSettings& s, Exec exec) {
  return pedersen_density(LogisticCoefficients{p}, x, y, s, exec);
}

KernelEstimate bridge_density(const Params& p, double x, double y, const McSettings& s, BridgeVariant variant,
                              Exec exec) {
  return bridge_density(LogisticCoefficients{p}, x, y, s, variant, exec);
}

KernelEstimate nonparam_density(const Params& p, double x, double y, const McSettings& s,
                                std::optional<double> bandwidth, Exec exec) {
  return nonparam_density(LogisticCoefficients{p}, x, y, s, bandwidth, exec);
}

}  // namespace stochlog
