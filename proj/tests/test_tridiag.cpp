#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "stochlog/errors.hpp"
#include "stochlog/tridiag.hpp"

using namespace stochlog;

namespace {

struct System {
  std::vector<double> sub, diag, super, rhs;
};

System random_system(std::size_t n, unsigned seed) {
  std::mt19937 eng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  System s{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    s.sub[i] = i ? u(eng) : 0.0;
    s.super[i] = i + 1 < n ? u(eng) : 0.0;
    s.diag[i] = std::abs(s.sub[i]) + std::abs(s.super[i]) + 0.5 + std::abs(u(eng));
    s.rhs[i] = u(eng);
  }
  return s;
}

// Dense Gaussian elimination with partial pivoting.
std::vector<double> dense_solve(const System& s) {
  const std::size_t n = s.diag.size();
  std::vector<double> A(n * n, 0.0), b = s.rhs;
  for (std::size_t i = 0; i < n; ++i) {
    A[i * n + i] = s.diag[i];
    if (i) A[i * n + i - 1] = s.sub[i];
    if (i + 1 < n) A[i * n + i + 1] = s.super[i];
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(A[i * n + k]) > std::abs(A[piv * n + k])) piv = i;
    for (std::size_t j = 0; j < n; ++j) std::swap(A[k * n + j], A[piv * n + j]);
    std::swap(b[k], b[piv]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = A[i * n + k] / A[k * n + k];
      for (std::size_t j = k; j < n; ++j) A[i * n + j] -= f * A[k * n + j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s2 = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s2 -= A[i * n + j] * x[j];
    x[i] = s2 / A[i * n + i];
  }
  return x;
}

}  // namespace

TEST_SUITE("tridiag") {

TEST_CASE("factor, reference Thomas and dense elimination agree") {
  for (std::size_t n : {1u, 2u, 3u, 17u, 200u}) {
    const System s = random_system(n, static_cast<unsigned>(n));
    const std::vector<double> ref = dense_solve(s);
    const std::vector<double> th = thomas_solve(s.sub, s.diag, s.super, s.rhs);
    const TridiagonalFactor f(s.sub, s.diag, s.super);
    std::vector<double> x = s.rhs;
    f.solve(x);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(th[i] == doctest::Approx(ref[i]).epsilon(1e-12));
      CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("block solve matches lane-by-lane solves") {
  constexpr std::size_t W = TridiagonalFactor::kBlockWidth;
  const std::size_t n = 300;
  const System s = random_system(n, 42);
  const TridiagonalFactor f(s.sub, s.diag, s.super);
  std::mt19937 eng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> block(n * W);
  for (double& v : block) v = u(eng);
  std::vector<std::vector<double>> lanes(W, std::vector<double>(n));
  for (std::size_t l = 0; l < W; ++l)
    for (std::size_t i = 0; i < n; ++i) lanes[l][i] = block[i * W + l];
  f.solve_block(block);
  for (std::size_t l = 0; l < W; ++l) {
    f.solve(lanes[l]);
    for (std::size_t i = 0; i < n; ++i) CHECK(block[i * W + l] == doctest::Approx(lanes[l][i]).epsilon(1e-14));
  }
}

TEST_CASE("singular pivots are reported") {
  const std::vector<double> sub{0.0, 1.0}, diag{0.0, 1.0}, super{1.0, 0.0};
  CHECK_THROWS_AS(TridiagonalFactor(sub, diag, super), NumericalError);
}

}
