#include "stochlog/tridiag.hpp"

#include <cmath>

#include "stochlog/errors.hpp"

namespace stochlog {

TridiagonalFactor::TridiagonalFactor(std::span<const double> sub, std::span<const double> diag,
                                     std::span<const double> super)
    : sub_(sub.begin(), sub.end()), inv_pivot_(diag.size()), c_prime_(diag.size()) {
  const std::size_t n = diag.size();
  if (n == 0 || sub.size() != n || super.size() != n) {
    throw ConfigError("tridiagonal factor: band sizes must match and be non-empty");
  }
  double pivot = diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) pivot = diag[i] - sub[i] * c_prime_[i - 1];
    if (!(std::abs(pivot) > 0.0) || !std::isfinite(pivot)) {
      throw NumericalError("tridiagonal factor: zero or non-finite pivot", pivot);
    }
    inv_pivot_[i] = 1.0 / pivot;
    c_prime_[i] = (i + 1 < n) ? super[i] * inv_pivot_[i] : 0.0;
  }
}

void TridiagonalFactor::solve(std::span<double> x) const {
  const std::size_t n = size();
  x[0] *= inv_pivot_[0];
  for (std::size_t i = 1; i < n; ++i) x[i] = (x[i] - sub_[i] * x[i - 1]) * inv_pivot_[i];
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c_prime_[i] * x[i + 1];
}

void TridiagonalFactor::solve_block(std::span<double> block) const {
  constexpr std::size_t W = kBlockWidth;
  const std::size_t n = size();
  double* b = block.data();
  for (std::size_t j = 0; j < W; ++j) b[j] *= inv_pivot_[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double s = sub_[i];
    const double inv = inv_pivot_[i];
    double* row = b + i * W;
    const double* prev = row - W;
#pragma omp simd
    for (std::size_t j = 0; j < W; ++j) row[j] = (row[j] - s * prev[j]) * inv;
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    const double c = c_prime_[i];
    double* row = b + i * W;
    const double* next = row + W;
#pragma omp simd
    for (std::size_t j = 0; j < W; ++j) row[j] -= c * next[j];
  }
}

std::vector<double> thomas_solve(std::span<const double> sub, std::span<const double> diag,
                                 std::span<const double> super, std::span<const double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n), d(n);
  double pivot = diag[0];
  c[0] = n > 1 ? super[0] / pivot : 0.0;
  d[0] = rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = diag[i] - sub[i] * c[i - 1];
    if (!(std::abs(pivot) > 0.0)) throw NumericalError("thomas_solve: zero pivot", pivot);
    c[i] = (i + 1 < n) ? super[i] / pivot : 0.0;
    d[i] = (rhs[i] - sub[i] * d[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
  return d;
}

}  // namespace stochlog
