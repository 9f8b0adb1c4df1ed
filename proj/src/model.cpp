#include "stochlog/model.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stochlog/errors.hpp"

namespace stochlog {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string(name) + " must be finite and > 0, got " + std::to_string(v));
  }
}

constexpr double kQuadratureRelTol = 1e-8;

}  // namespace

Params::Params(double lambda_, double mu_, double alpha_, double rho_)
    : lambda(lambda_), mu(mu_), alpha(alpha_), rho(rho_) {
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  require_positive(alpha, "alpha");
  require_positive(rho, "rho");
}

Params Params::reference_scenario() { return Params(20.0, 18.0, 1.0, 0.1); }

MicroParams::MicroParams(double lambda_, double mu_, double alpha_, double kappa_)
    : lambda(lambda_), mu(mu_), alpha(alpha_), kappa(kappa_) {
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  require_positive(alpha, "alpha");
  require_positive(kappa, "kappa");
}

Params MicroParams::to_params() const { return Params(lambda, mu, alpha, 1.0 / std::sqrt(kappa)); }

double drift(const Params& p, double x) { return (p.lambda - p.mu - p.alpha * x) * x; }

double diffusion_sq(const Params& p, double x) {
  return p.rho * p.rho * (p.lambda + p.mu + p.alpha * x) * x;
}

double diffusion(const Params& p, double x) { return std::sqrt(diffusion_sq(p, x)); }

BoundaryDerivatives boundary_derivatives(const Params& p) {
  const double r2 = p.rho * p.rho;
  return {p.lambda - p.mu, r2 * (p.lambda + p.mu), 2.0 * r2 * p.alpha};
}

double log_scale_density(const Params& p, double y) {
  const double power = 2.0 / (p.rho * p.rho);
  return power * (y - (2.0 * p.lambda / p.alpha) * std::log(p.lambda + p.mu + p.alpha * y));
}

double scale_density(const Params& p, double y) {
  const double ls = log_scale_density(p, y);
  const double v = std::exp(ls);
  if (!std::isfinite(v) || v < std::numeric_limits<double>::min()) throw ScaleOverflow(ls);
  return v;
}

// log s is convex on [0, inf), so its maximum over [a, b] sits at an endpoint.
// The integrand is shifted by that maximum and integrated in [0, 1] range.
double log_scale_integral(const Params& p, double a, double b) {
  if (!(a >= 0.0) || !(b >= a)) throw ConfigError("log_scale_integral: need 0 <= a <= b");
  if (a == b) return -std::numeric_limits<double>::infinity();
  const double shift = std::max(log_scale_density(p, a), log_scale_density(p, b));
  auto f = [&](double y) { return std::exp(log_scale_density(p, y) - shift); };
  double error = 0.0;
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, kQuadratureRelTol, &error);
  if (!(integral > 0.0) || error > kQuadratureRelTol * integral) {
    throw NumericalError("scale integral did not converge", error);
  }
  return shift + std::log(integral);
}

double hitting_probability(const Params& p, double x, double x_r) {
  if (!(x > 0.0) || !(x_r > x)) throw ConfigError("hitting_probability: need 0 < x < x_r");
  // Same shift for numerator and denominator: the constant cancels.
  const double shift = std::max(log_scale_density(p, 0.0), log_scale_density(p, x_r));
  auto f = [&](double y) { return std::exp(log_scale_density(p, y) - shift); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double err_upper = 0.0;
  double err_total = 0.0;
  const double upper = GK::integrate(f, x, x_r, 20, kQuadratureRelTol, &err_upper);
  const double lower = GK::integrate(f, 0.0, x, 20, kQuadratureRelTol, &err_total);
  const double total = upper + lower;
  const double err = err_upper + err_total;
  if (!(total > 0.0) || err > kQuadratureRelTol * total) {
    throw NumericalError("hitting probability quadrature did not converge", err);
  }
  return std::clamp(upper / total, 0.0, 1.0);
}

BdRates bd_rates(const MicroParams& mp, std::int64_t n) {
  if (n < 0) throw ConfigError("bd_rates: negative population");
  const auto nn = static_cast<double>(n);
  return {mp.lambda * nn, (mp.mu + mp.alpha / mp.kappa * nn) * nn};
}

}  // namespace stochlog
