#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "stochlog/errors.hpp"
#include "stochlog/model.hpp"
#include "stochlog/normal.hpp"
#include "stochlog/parallel.hpp"
#include "stochlog/rng.hpp"
#include "stochlog/sde_sim.hpp"

namespace stochlog {

/// Gaussian part of the truncated Euler kernel K_delta(. | x), x > 0:
/// mean x + delta b(x), variance delta a(x).
struct EulerGaussian {
  double mean;
  double variance;

  /// Mass sent to 0 by the clamp, Phi(-mean / sd).
  double atom() const { return normal::cdf(mean, variance, 0.0); }
  double log_atom() const { return normal::log_cdf(mean, variance, 0.0); }
  /// Density of the continuous part at z > 0.
  double density(double z) const { return normal::pdf(mean, variance, z); }
};

template <DiffusionCoefficients C>
EulerGaussian euler_gaussian(const C& c, double x, double delta) {
  return {x + delta * c.drift(x), delta * c.diffusion_sq(x)};
}

EulerGaussian euler_gaussian(const Params& p, double x, double delta);

/// Monte Carlo estimate of the density of Q_Delta(. | x) with respect to
/// delta_0 + Lebesgue, at one query point.
struct KernelEstimate {
  double value = 0.0;
  bool at_atom = false;
  std::size_t n_survivors = 0;
  std::size_t n_paths = 0;
  /// Paths whose finite log-contribution underflowed to 0 in the average.
  std::size_t n_underflow = 0;
  /// Nonparametric estimator only: y > 0 but every path was absorbed.
  bool no_survivors = false;
};

struct McSettings {
  double delta_obs;
  double delta;
  std::size_t n_paths;
  std::uint64_t seed;
  /// Replicate or observation index; selects an independent family of streams.
  std::uint64_t stream = 0;
};

enum class BridgeVariant { plain, modified };

namespace detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log of the final one-step factor k_delta(y | xi) of K_delta.
template <DiffusionCoefficients C>
double log_last_step(const C& c, double xi, double y, double delta) {
  if (xi == 0.0) return y == 0.0 ? 0.0 : kNegInf;
  const EulerGaussian g = euler_gaussian(c, xi, delta);
  return y == 0.0 ? g.log_atom() : normal::log_pdf(g.mean, g.variance, y);
}

/// (1/N) sum exp(logs[i]), shifted by the maximum. Finite terms that vanish
/// after the shift are counted as underflows.
struct LogMean {
  double value;
  std::size_t underflow;
};
LogMean log_mean_exp(std::span<const double> logs);

template <class PathFn>
std::vector<double> per_path(std::size_t n_paths, Exec exec, PathFn&& fn) {
  std::vector<double> out(n_paths);
  const auto count = static_cast<std::ptrdiff_t>(n_paths);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
  return out;
}

inline void check_settings(const McSettings& s, double x, double y) {
  if (!(x >= 0.0) || !(y >= 0.0)) throw ConfigError("kernel estimators need x, y >= 0");
  if (s.n_paths == 0) throw ConfigError("kernel estimators need N >= 1");
  if (step_count(s.delta_obs, s.delta) == 0) throw ConfigError("observation spacing must exceed the time step");
}

inline std::size_t count_alive(std::span<const double> xs) {
  return static_cast<std::size_t>(std::count_if(xs.begin(), xs.end(), [](double v) { return v != 0.0; }));
}

}  // namespace detail

/// Pedersen estimator: N truncated Euler paths to Delta - delta, then the
/// exact last-step density k_delta(y | X_{n-1}) averaged over paths.
template <DiffusionCoefficients C>
KernelEstimate pedersen_density(const C& c, double x, double y, const McSettings& s, Exec exec = Exec::parallel) {
  detail::check_settings(s, x, y);
  const std::size_t n = step_count(s.delta_obs, s.delta);
  std::vector<double> last(s.n_paths);
  std::vector<double> logs = detail::per_path(s.n_paths, exec, [&](std::size_t i) {
    double xi = x;
    if (xi != 0.0 && n > 1) {
      Engine eng = make_engine(s.seed, {stream_tag::kPedersen, s.stream, i});
      std::normal_distribution<double> gauss;
      for (std::size_t j = 1; j < n && xi != 0.0; ++j) xi = em_step(c, xi, s.delta, gauss(eng));
    }
    last[i] = xi;
    return detail::log_last_step(c, xi, y, s.delta);
  });
  const auto [value, underflow] = detail::log_mean_exp(logs);
  return {value, y == 0.0, detail::count_alive(last), s.n_paths, underflow, false};
}

/// Importance sampling with a (modified) Brownian bridge proposal pulled
/// towards y. Each step multiplies the weight by the ratio of the Euler and
/// bridge step densities at the realized point (or of their masses at 0
/// when the proposal is clamped); absorbed paths keep their weight.
template <DiffusionCoefficients C>
KernelEstimate bridge_density(const C& c, double x, double y, const McSettings& s, BridgeVariant variant,
                              Exec exec = Exec::parallel) {
  detail::check_settings(s, x, y);
  const std::size_t n = step_count(s.delta_obs, s.delta);
  const double delta = s.delta;
  std::vector<double> last(s.n_paths);
  std::vector<double> logs = detail::per_path(s.n_paths, exec, [&](std::size_t i) {
    double xi = x;
    double log_w = 0.0;
    if (xi != 0.0 && n > 1) {
      Engine eng = make_engine(s.seed, {stream_tag::kBridge, s.stream, i});
      std::normal_distribution<double> gauss;
      for (std::size_t j = 1; j < n && xi != 0.0; ++j) {
        const double remaining = s.delta_obs - static_cast<double>(j - 1) * delta;
        const EulerGaussian euler = euler_gaussian(c, xi, delta);
        const double bridge_mean = xi + delta * (y - xi) / remaining;
        const double damp = variant == BridgeVariant::modified ? 1.0 - delta / remaining : 1.0;
        const double bridge_var = euler.variance * damp * damp;
        const double proposal = bridge_mean + std::sqrt(bridge_var) * gauss(eng);
        if (proposal > 0.0) {
          log_w += normal::log_pdf(euler.mean, euler.variance, proposal) -
                   normal::log_pdf(bridge_mean, bridge_var, proposal);
          xi = proposal;
        } else {
          log_w += euler.log_atom() - normal::log_cdf(bridge_mean, bridge_var, 0.0);
          xi = 0.0;
        }
      }
    }
    last[i] = xi;
    const double tail = detail::log_last_step(c, xi, y, delta);
    return tail == detail::kNegInf ? tail : log_w + tail;
  });
  const auto [value, underflow] = detail::log_mean_exp(logs);
  return {value, y == 0.0, detail::count_alive(last), s.n_paths, underflow, false};
}

/// Silverman's rule 0.9 min(sd, IQR / 1.34) n^(-1/5).
double silverman_bandwidth(std::span<const double> sample);

/// Kernel density estimate on [0, inf) with reflection about 0; integrates
/// to 1 over the half line.
double reflected_kde(std::span<const double> sample, double bandwidth, double y);

/// Nonparametric estimator: N truncated Euler endpoints at Delta; zeros give
/// the atom, survivors feed a reflected Gaussian KDE scaled by N_s / N.
template <DiffusionCoefficients C>
KernelEstimate nonparam_density(const C& c, double x, double y, const McSettings& s,
                                std::optional<double> bandwidth = std::nullopt, Exec exec = Exec::parallel) {
  detail::check_settings(s, x, y);
  const std::size_t n = step_count(s.delta_obs, s.delta);
  std::vector<double> ends = detail::per_path(s.n_paths, exec, [&](std::size_t i) {
    double xi = x;
    if (xi == 0.0) return 0.0;
    Engine eng = make_engine(s.seed, {stream_tag::kNonparametric, s.stream, i});
    std::normal_distribution<double> gauss;
    for (std::size_t j = 0; j < n && xi != 0.0; ++j) xi = em_step(c, xi, s.delta, gauss(eng));
    return xi;
  });
  std::vector<double> survivors;
  std::copy_if(ends.begin(), ends.end(), std::back_inserter(survivors), [](double v) { return v != 0.0; });
  const double n_total = static_cast<double>(s.n_paths);
  const double n_alive = static_cast<double>(survivors.size());

  KernelEstimate est{0.0, y == 0.0, survivors.size(), s.n_paths, 0, false};
  if (y == 0.0) {
    est.value = (n_total - n_alive) / n_total;
  } else if (survivors.empty()) {
    est.no_survivors = true;
  } else {
    const double bw = bandwidth.value_or(silverman_bandwidth(survivors));
    est.value = n_alive / n_total * reflected_kde(survivors, bw, y);
  }
  return est;
}

KernelEstimate pedersen_density(const Params& p, double x, double y, const McSettings& s, Exec exec = Exec::parallel);
KernelEstimate bridge_density(const Params& p, double x, double y, const McSettings& s, BridgeVariant variant,
                              Exec exec = Exec::parallel);
KernelEstimate nonparam_density(const Params& p, double x, double y, const McSettings& s,
                                std::optional<double> bandwidth = std::nullopt, Exec exec = Exec::parallel);

}  // namespace stochlog
