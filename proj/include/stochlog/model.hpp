#pragma once

#include <concepts>
#include <cstdint>

namespace stochlog {

/// Parameters of the stochastic logistic SDE
///   dX = (lambda - mu - alpha X) X dt + rho sqrt((lambda + mu + alpha X) X) dB.
/// All four are strictly positive; the constructor enforces it.
struct Params {
  double lambda;
  double mu;
  double alpha;
  double rho;

  Params(double lambda, double mu, double alpha, double rho);

  /// lambda = 20, mu = 18, alpha = 1, rho = 0.1.
  static Params reference_scenario();

  double growth_rate() const noexcept { return lambda - mu; }
  /// K = (lambda - mu) / alpha; non-positive when the population is subcritical.
  double carrying_capacity() const noexcept { return (lambda - mu) / alpha; }

  friend bool operator==(const Params&, const Params&) = default;
};

/// Microscopic birth-death parameters; kappa is the population scale.
struct MicroParams {
  double lambda;
  double mu;
  double alpha;
  double kappa;

  MicroParams(double lambda, double mu, double alpha, double kappa);

  /// Diffusion limit: rho = kappa^(-1/2).
  Params to_params() const;
};

double drift(const Params& p, double x);
double diffusion_sq(const Params& p, double x);
double diffusion(const Params& p, double x);

struct BoundaryDerivatives {
  double b_prime_0;
  double a_prime_0;
  double a_second_0;
};

BoundaryDerivatives boundary_derivatives(const Params& p);

/// log s(y), s(y) = (e^y (lambda + mu + alpha y)^(-2 lambda / alpha))^(2 / rho^2).
/// Defined for y >= 0 (the y -> 0+ limit is finite).
double log_scale_density(const Params& p, double y);

/// exp(log_scale_density). Throws ScaleOverflow when the value overflows or
/// underflows a double, which is the normal case for small rho.
double scale_density(const Params& p, double y);

/// log of the integral of s over [a, b], 0 <= a <= b.
double log_scale_integral(const Params& p, double a, double b);

/// P_x(tau_0 < tau_{x_r}) for 0 < x < x_r. Throws NumericalError when the
/// adaptive quadrature misses its relative tolerance (1e-8).
double hitting_probability(const Params& p, double x, double x_r);

struct BdRates {
  double birth;
  double death;
};

/// Birth lambda n, death (mu + (alpha / kappa) n) n.
BdRates bd_rates(const MicroParams& mp, std::int64_t n);

/// Drift and squared diffusion coefficient of a scalar SDE on [0, inf) with
/// an absorbing boundary at 0. The Monte Carlo kernels are written against
/// this so tests can substitute simpler coefficient sets.
template <class C>
concept DiffusionCoefficients = requires(const C& c, double x) {
  { c.drift(x) } -> std::convertible_to<double>;
  { c.diffusion_sq(x) } -> std::convertible_to<double>;
};

struct LogisticCoefficients {
  Params params;

  double drift(double x) const { return stochlog::drift(params, x); }
  double diffusion_sq(double x) const { return stochlog::diffusion_sq(params, x); }
};

}  // namespace stochlog
