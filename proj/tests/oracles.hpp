#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library's numerical code.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline double log_scale(double lambda, double mu, double alpha, double rho, double y) {
  return 2.0 / (rho * rho) * (y - 2.0 * lambda / alpha * std::log(lambda + mu + alpha * y));
}

/// Composite Simpson rule in long double.
inline long double simpson(const std::function<long double(long double)>& f, long double a, long double b,
                           std::size_t n) {
  if (n % 2) ++n;
  const long double h = (b - a) / static_cast<long double>(n);
  long double s = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0L : 2.0L) * f(a + h * static_cast<long double>(i));
  return s * h / 3.0L;
}

/// P_x(hit 0 before x_r) from the scale density, integrated by Simpson with
/// the integrand shifted by its value at 0 (the maximum on [0, x_r] for the
/// logistic model with x_r below the right maximum).
inline double hitting_probability(double lambda, double mu, double alpha, double rho, double x, double x_r,
                                  std::size_t n = 400000) {
  const double ref = std::max(log_scale(lambda, mu, alpha, rho, 0.0), log_scale(lambda, mu, alpha, rho, x_r));
  auto f = [&](long double y) {
    return std::exp(static_cast<long double>(log_scale(lambda, mu, alpha, rho, static_cast<double>(y)) - ref));
  };
  const long double num = simpson(f, x, x_r, n);
  const long double den = simpson(f, 0.0L, x, n) + num;
  return static_cast<double>(num / den);
}

inline double normal_pdf(double m, double v, double x) {
  return std::exp(-0.5 * (x - m) * (x - m) / v) / std::sqrt(2.0 * std::numbers::pi * v);
}

inline double normal_cdf(double m, double v, double x) {
  return 0.5 * std::erfc(-(x - m) / std::sqrt(2.0 * v));
}

/// Dense matrix exponential by scaling and squaring with a Taylor series;
/// row-major n x n.
inline std::vector<double> expm(std::vector<double> A, std::size_t n) {
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(A[i * n + j]);
    norm = std::max(norm, row);
  }
  int squarings = 0;
  while (norm > 0.5) {
    norm /= 2.0;
    ++squarings;
  }
  const double scale = std::ldexp(1.0, -squarings);
  for (double& a : A) a *= scale;
  auto mul = [n](const std::vector<double>& X, const std::vector<double>& Y) {
    std::vector<double> Z(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const double xik = X[i * n + k];
        if (xik == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) Z[i * n + j] += xik * Y[k * n + j];
      }
    return Z;
  };
  std::vector<double> E(n * n, 0.0), term(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) E[i * n + i] = term[i * n + i] = 1.0;
  for (int k = 1; k <= 20; ++k) {
    term = mul(term, A);
    for (double& t : term) t /= k;
    for (std::size_t i = 0; i < n * n; ++i) E[i] += term[i];
  }
  for (int s = 0; s < squarings; ++s) E = mul(E, E);
  return E;
}

// E[estimate] for n = 2 Euler steps: integral of K(dy1 | x) k(y | y1).
template <class B, class A>
double two_step(B b, A a, double x, double y, double delta) {
  const double m = x + delta * b(x), v = delta * a(x);
  auto k = [&](double y1) {
    const double m1 = y1 + delta * b(y1), v1 = delta * a(y1);
    if (v1 <= 0.0) return y == 0.0 ? (m1 <= 0.0 ? 1.0 : 0.0) : 0.0;
    return y == 0.0 ? oracle::normal_cdf(m1, v1, 0.0) : oracle::normal_pdf(m1, v1, y);
  };
  const double hi = m + 14.0 * std::sqrt(v);
  const long double cont = oracle::simpson(
      [&](long double y1) { return static_cast<long double>(oracle::normal_pdf(m, v, double(y1)) * k(double(y1))); },
      0.0L, hi, 200000);
  const double atom = oracle::normal_cdf(m, v, 0.0);
  return static_cast<double>(cont) + (y == 0.0 ? atom : 0.0);
}

}  // namespace oracle
